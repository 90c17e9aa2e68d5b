"""Homogeneous Ricci flow: unnormalized, normalized, and projected to the simplex.

The projected flow is the polynomial vector field (u, v) on the open simplex
x, y > 0, x + y < 1 (with z = 1 - x - y).  It is a positive time
reparametrization of the trace-normalized flow, so times reported by
:func:`integrate` run on the polynomial field's clock, not the Ricci-flow
clock.  Finite-time statements are unaffected.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .curvature import CurvatureSignature, family_ricci_numerators, ricci_components, signature, wallach_ricci_numerators
from .polynomial import RatPoly
from .spaces import FlagSpace, SimplexPoint

log = logging.getLogger(__name__)

FORWARD, BACKWARD = "forward", "backward"
CONVERGED, COLLAR, HORIZON = "converged", "boundary-collar", "horizon"

_x, _y, _m, _p = RatPoly.symbols("x y m p")


# -- projected vector fields --------------------------------------------------

class Field2:
    """Planar polynomial field (u, v) over exact rationals.

    Calling the field evaluates it in floating point.  When the field is
    exactly symmetric under swapping the first two summands (u(y, x) = v(x, y))
    v is evaluated as u with swapped arguments, which keeps the diagonal
    x = y invariant bit-for-bit under any numerical scheme acting
    componentwise.  Without that, round-off near the saddle on the diagonal
    grows at the saddle's unstable rate and pushes trajectories off it.
    """

    def __init__(self, u: RatPoly, v: RatPoly, name: str = ""):
        self.u = u
        self.v = v
        self.name = name
        self.parameters = tuple(s for s in ("m", "p") if s in u.used_variables() + v.used_variables())
        self.swap_symmetric = (u.substitute({"x": _y, "y": _x}) - v).is_zero() if "x" in u.variables and "y" in u.variables else False
        if not self.parameters:
            self._uf = u.compile(("x", "y"))
            self._vf = v.compile(("x", "y"))

    def __call__(self, x, y):
        if self.parameters:
            raise TypeError(f"field is parametric in {self.parameters}; call specialize() first")
        u = self._uf(x, y)
        v = self._uf(y, x) if self.swap_symmetric else self._vf(x, y)
        return u, v

    def specialize(self, m: int, p: int) -> "Field2":
        bind = {k: val for k, val in (("m", m), ("p", p)) if k in self.u.variables}
        bind_v = {k: val for k, val in (("m", m), ("p", p)) if k in self.v.variables}
        return Field2(self.u.substitute(bind).with_variables(("x", "y")),
                      self.v.substitute(bind_v).with_variables(("x", "y")),
                      name=f"{self.name}[m={m},p={p}]")

    def exact(self, x, y) -> tuple:
        pt = {"x": x, "y": y}
        return self.u.evaluate(pt), self.v.evaluate(pt)

    def jacobian_polys(self) -> tuple[tuple[RatPoly, RatPoly], tuple[RatPoly, RatPoly]]:
        return ((self.u.diff("x"), self.u.diff("y")), (self.v.diff("x"), self.v.diff("y")))

    def negated(self) -> "Field2":
        return Field2(-self.u, -self.v, name=f"-{self.name}")

    def __repr__(self):
        return f"Field2({self.name!r}, u={self.u}, v={self.v})"


def wallach_field() -> Field2:
    x, y = _x, _y
    u = 2 * x * (x ** 2 * (2 - 12 * y) - 3 * x * (4 * y ** 2 - 6 * y + 1) + 6 * y ** 2 - 6 * y + 1)
    v = -2 * y * (2 * y - 1) * (6 * x ** 2 + 6 * x * (y - 1) - y + 1)
    return Field2(u.with_variables(("x", "y")), v.with_variables(("x", "y")), name="wallach")


def family_field() -> Field2:
    """The family field, symbolic in m and p."""
    x, y, m, p = _x, _y, _m, _p
    u = -x * (2 * x - 1) * (m * (4 * y - 1) * (x + y - 1) + p * (x * (8 * y - 1) + 8 * y ** 2 - 7 * y + 1))
    v = -y * (2 * y - 1) * (m * (4 * x - 1) * (x + y - 1) + p * (8 * x ** 2 + x * (8 * y - 7) - y + 1))
    order = ("x", "y", "m", "p")
    return Field2(u.with_variables(order), v.with_variables(order), name="family")


def projected_field(space: Optional[FlagSpace]) -> Field2:
    """Projected Ricci flow field; ``None`` gives the family field with symbolic (m, p)."""
    if space is None:
        return family_field()
    if space.is_wallach:
        return wallach_field()
    return family_field().specialize(space.m, space.p)


# -- unnormalized and normalized flows ----------------------------------------

def unnormalized_field(space: FlagSpace, g) -> tuple:
    """dx_k/dt = -2 x_k r_k."""
    r = ricci_components(space, g)
    return tuple(-2 * xk * rk for xk, rk in zip(g, r.values))


@dataclass(frozen=True)
class WeightSpec:
    """Positive weight W, homogeneous of degree ``alpha`` != 0, with its gradient."""

    func: Callable
    grad: Callable
    alpha: float
    name: str = ""

    def __post_init__(self):
        if self.alpha == 0:
            raise ValueError("weight must have non-zero homogeneity degree")

    def euler_residual(self, x) -> float:
        """|W'(x) x - alpha W(x)|, zero for a correctly specified weight."""
        x = np.asarray(x, dtype=float)
        return abs(float(np.dot(self.grad(x), x)) - self.alpha * self.func(x))


def simplex_weight() -> WeightSpec:
    return WeightSpec(func=lambda x: float(np.sum(x)), grad=lambda x: np.ones(len(x)), alpha=1.0, name="trace")


def volume_weight(space: FlagSpace) -> WeightSpec:
    """prod x_i^(n_i / n), homogeneous of degree 1 (a volume-type normalization)."""
    e = np.array(space.multiplicities, dtype=float) / space.dim

    def func(x):
        return float(np.prod(np.asarray(x, dtype=float) ** e))

    def grad(x):
        x = np.asarray(x, dtype=float)
        return func(x) * e / x

    return WeightSpec(func=func, grad=grad, alpha=1.0, name="volume")


def normalize_field(R: Callable, W: WeightSpec) -> Callable:
    """x -> R(x) - rho(x) x with rho(x) = W'(x) R(x) / alpha."""

    def normalized(x):
        x = np.asarray(x, dtype=float)
        r = np.asarray(R(x), dtype=float)
        rho = float(np.dot(W.grad(x), r)) / W.alpha
        return r - rho * x

    return normalized


def cleared_projection(space: Optional[FlagSpace]) -> tuple[RatPoly, RatPoly]:
    """Trace-normalized flow times its positive common denominator, in (x, y).

    Uses D = 12xyz (Wallach) or 4(m+2p)xyz (family; symbolic when ``space`` is
    None), so R_k D = -2 x_k P_k with polynomial P_k, and the normalized field
    R - (sum R) x scaled by D becomes polynomial after z = 1 - x - y.
    """
    if space is not None and space.is_wallach:
        P = wallach_ricci_numerators()
    else:
        P = family_ricci_numerators(space)
    x, y, z = RatPoly.symbols("x y z")
    coords = (x, y, z)
    RD = [-2 * c * Pk for c, Pk in zip(coords, P)]
    total = RD[0] + RD[1] + RD[2]
    onto = {"z": 1 - x - y}
    Nx = (RD[0] - total * x).substitute(onto)
    Ny = (RD[1] - total * y).substitute(onto)
    return Nx, Ny


@dataclass
class ConsistencyReport:
    samples: int
    skipped: int
    max_angle: float
    min_ratio: float
    max_ratio: float

    @property
    def parallel(self) -> bool:
        return self.min_ratio > 0


def field_consistency(space: FlagSpace, samples: Sequence, zero_tol: float = 1e-14) -> ConsistencyReport:
    """Compare the polynomial field with the trace-normalized generic flow on the simplex.

    ``max_angle`` is the largest |sin| of the angle between the two planar
    vectors, and the ratios are <polynomial, generic> / |generic|^2.
    """
    F = projected_field(space)
    W = simplex_weight()
    R = lambda g: unnormalized_field(space, tuple(float(c) for c in g))
    N = normalize_field(R, W)
    max_angle, ratios, skipped = 0.0, [], 0
    for s in samples:
        sx, sy = (float(c) for c in s)
        a = np.array(F(sx, sy))
        b = N(np.array([sx, sy, 1 - sx - sy]))[:2]
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na < zero_tol or nb < zero_tol:
            skipped += 1
            continue
        max_angle = max(max_angle, abs(a[0] * b[1] - a[1] * b[0]) / (na * nb))
        ratios.append(float(np.dot(a, b) / nb ** 2))
    if not ratios:
        return ConsistencyReport(len(samples), skipped, 0.0, math.nan, math.nan)
    return ConsistencyReport(len(samples), skipped, max_angle, min(ratios), max(ratios))


# -- integration --------------------------------------------------------------

# Dormand-Prince 5(4)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = _A[6] + (0.0,)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def dp54_step(f: Callable, y: tuple, h: float, k1: Optional[tuple] = None):
    """One Dormand-Prince step; returns (y_new, error_vector, f(y_new))."""
    k = [k1 if k1 is not None else f(*y)]
    for s in range(1, 7):
        a = _A[s]
        ys = tuple(yi + h * sum(a[j] * k[j][i] for j in range(s)) for i, yi in enumerate(y))
        k.append(f(*ys))
    # the last stage is evaluated at the 5th-order solution (FSAL)
    y_new = ys
    err = tuple(h * sum(_E[j] * k[j][i] for j in range(7)) for i in range(len(y)))
    return y_new, err, k[6]


# below this the error estimate is pure round-off and can vanish on sub-ulp steps
_RTOL_FLOOR = 100 * np.finfo(float).eps


class StepSizeUnderflow(RuntimeError):
    """The adaptive step fell below the representable minimum."""

    def __init__(self, message, time, state, trajectory=None):
        super().__init__(message)
        self.time = time
        self.state = state
        self.trajectory = trajectory


class InvalidStart(ValueError):
    pass


@dataclass
class Sample:
    time: float
    point: SimplexPoint
    signature: CurvatureSignature


@dataclass
class Event:
    name: str
    time: float
    x: float
    y: float
    before: float = math.nan
    after: float = math.nan


SIGNATURE_COLUMNS = ("r_x", "r_y", "r_z", "scalar", "min_sec",
                     "ricd_min_1", "ricd_min_2", "ricd_min_3", "ricd_min_4")


@dataclass
class Trajectory:
    space: FlagSpace
    direction: str
    samples: list = field(default_factory=list)
    events: list = field(default_factory=list)
    status: str = ""
    steps: int = 0
    rejected: int = 0

    @property
    def end(self) -> Sample:
        return self.samples[-1]

    def events_named(self, name: str) -> list:
        return [e for e in self.events if e.name == name]

    def first_event(self, name: str) -> Optional[Event]:
        ev = self.events_named(name)
        return ev[0] if ev else None

    def min_distance_to(self, point) -> float:
        px, py = (float(c) for c in point)
        return min(math.hypot(float(s.point.x) - px, float(s.point.y) - py) for s in self.samples)

    def csv_header(self) -> list[str]:
        cols = ["time", "x", "y", "z", "r_x", "r_y", "r_z", "scalar", "min_sec",
                "ricd1", "ricd2", "ricd3", "ricd4"]
        return cols + [f"dpos{d}" for d in range(1, self.space.dim + 1)]

    def to_csv(self, fh=None) -> str:
        out = fh if fh is not None else io.StringIO()
        out.write(",".join(self.csv_header()) + "\n")
        fmt = lambda v: "" if v is None else repr(float(v))
        for s in self.samples:
            sc = s.signature.scalars()
            row = [s.time, s.point.x, s.point.y, s.point.z] + [sc[c] for c in SIGNATURE_COLUMNS]
            row += list(s.signature.dpos)
            out.write(",".join(fmt(v) for v in row) + "\n")
        for e in self.events:
            out.write(f"# event,{e.name},{e.time!r},{e.x!r},{e.y!r}\n")
        return out.getvalue() if fh is None else ""


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _rms_norm(err, y0, y1, rtol, atol) -> float:
    acc = 0.0
    for e, a, b in zip(err, y0, y1):
        sc = atol + rtol * max(abs(a), abs(b))
        acc += (e / sc) ** 2
    return math.sqrt(acc / len(err))


def _margin(y) -> float:
    return min(y[0], y[1], 1.0 - y[0] - y[1])


def integrate(space: FlagSpace, start, direction: str = FORWARD, horizon: float = 200.0,
              rtol: float = 1e-10, atol: float = 1e-12, *, stride: float = 0.05,
              collar: float = 1e-3, converge_field: float = 1e-12, converge_radius: float = 1e-8,
              event_tol: float = 1e-10, equilibria: Optional[Sequence] = None,
              track_events: bool = True, max_steps: int = 1_000_000) -> Trajectory:
    """Integrate the projected flow from ``start`` with Dormand-Prince 5(4).

    Samples are taken every ``stride`` time units (plus the start and the
    terminal point).  A run ends when ``horizon`` is reached, when the point
    enters the boundary collar ``min(x, y, 1-x-y) < collar`` (located by
    bisection), or when the field drops below ``converge_field`` within
    ``converge_radius`` of a known equilibrium.  Each curvature scalar is
    monitored between accepted steps; sign changes are located by bisection
    on fresh Runge-Kutta steps to ``event_tol`` in time.  Backward runs
    integrate the negated field and report negative times.
    """
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"direction must be {FORWARD!r} or {BACKWARD!r}")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if rtol < _RTOL_FLOOR:
        log.warning("rtol %g is below the round-off floor; using %g", rtol, _RTOL_FLOOR)
        rtol = _RTOL_FLOOR
    try:
        sp0 = start if isinstance(start, SimplexPoint) else SimplexPoint(*start)
    except (TypeError, ValueError) as exc:
        raise InvalidStart(str(exc)) from None
    if _margin((float(sp0.x), float(sp0.y))) < collar:
        raise InvalidStart(f"start {tuple(sp0)} lies inside the boundary collar")

    F = projected_field(space)
    sgn = 1.0 if direction == FORWARD else -1.0
    if direction == FORWARD:
        f = F
    else:
        f = lambda x, y: tuple(-c for c in F(x, y))
    if equilibria is None:
        from .dynamics import find_equilibria
        equilibria = [tuple(float(c) for c in e.point) for e in find_equilibria(space)]

    def sig_at(y):
        return signature(space, (y[0], y[1], 1.0 - y[0] - y[1]))

    def scalars(sig):
        return {k: v for k, v in sig.scalars().items() if v is not None}

    traj = Trajectory(space=space, direction=direction)

    def record(s, y, sig=None):
        traj.samples.append(Sample(sgn * s, SimplexPoint(y[0], y[1]), sig or sig_at(y)))

    y = (float(sp0.x), float(sp0.y))
    s = 0.0
    sig = sig_at(y)
    record(s, y, sig)
    prev_vals = scalars(sig)
    next_out = stride
    k1 = f(*y)
    h = min(0.01, horizon)
    h_min = 1e-14
    # long steps near an attractor leave the state jittering at the atol level
    h_max = 1.0

    for _ in range(max_steps):
        if s >= horizon:
            traj.status = HORIZON
            break
        h = min(h, h_max, horizon - s)
        y_new, err, k_new = dp54_step(f, y, h, k1)
        en = _rms_norm(err, y, y_new, rtol, atol)
        if not all(math.isfinite(c) for c in y_new) or en > 1.0:
            traj.rejected += 1
            fac = 0.2 if not math.isfinite(en) else max(0.2, 0.9 * en ** -0.2)
            h *= fac
            if h < h_min * max(1.0, s):
                raise StepSizeUnderflow(f"step size underflow at s={s}", sgn * s, y, traj)
            continue
        traj.steps += 1
        left, s_left, k_left, h_acc = y, s, k1, h
        step_to = lambda tau: left if tau == 0 else dp54_step(f, left, tau, k_left)[0]

        # boundary collar: truncate the step at the crossing
        terminal = None
        if _margin(y_new) < collar:
            lo, hi = 0.0, h_acc
            while hi - lo > event_tol:
                mid = 0.5 * (lo + hi)
                if _margin(step_to(mid)) < collar:
                    hi = mid
                else:
                    lo = mid
            h_acc = hi
            y_new = step_to(hi)
            terminal = COLLAR

        s_new = s_left + h_acc
        # dense samples
        while next_out < s_new - 1e-12 * max(1.0, s_new):
            record(next_out, step_to(next_out - s_left))
            next_out += stride
        new_sig = sig_at(y_new)
        new_vals = scalars(new_sig)

        if track_events:
            found = []
            for name, v_new in new_vals.items():
                v_old = prev_vals.get(name)
                if v_old is None or _sign(v_old) == 0 or _sign(v_old) == _sign(v_new):
                    continue
                lo, hi = 0.0, h_acc
                if _sign(v_new) != 0:
                    while hi - lo > event_tol:
                        mid = 0.5 * (lo + hi)
                        if _sign(scalars(sig_at(step_to(mid)))[name]) == _sign(v_old):
                            lo = mid
                        else:
                            hi = mid
                tau = 0.5 * (lo + hi) if _sign(v_new) != 0 else h_acc
                pt = step_to(tau)
                found.append(Event(name, sgn * (s_left + tau), pt[0], pt[1], float(v_old), float(v_new)))
            found.sort(key=lambda e: abs(e.time))
            traj.events.extend(found)

        y, s, k1, prev_vals = y_new, s_new, k_new, new_vals

        if terminal:
            record(s, y, new_sig)
            traj.status = terminal
            break
        fx, fy = F(*y)
        if math.hypot(fx, fy) < converge_field and any(
                math.hypot(y[0] - ex, y[1] - ey) < converge_radius for ex, ey in equilibria):
            record(s, y, new_sig)
            traj.status = CONVERGED
            break
        if s >= horizon:
            record(s, y, new_sig)
            traj.status = HORIZON
            break

        fac = 5.0 if en == 0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
        h = h_acc * fac
    else:
        traj.status = HORIZON
        log.warning("max_steps reached before the horizon")
    return traj
