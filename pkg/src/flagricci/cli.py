"""Command-line entry point.

Subcommands::

    flagricci curvature --space 1,1 --metric 1,1,1
    flagricci theorem {ricci-mixed,ricd-loss,family-dpos} [--t0 v] [--space m,p]
    flagricci portrait --grid 20 [--out field.csv]
    flagricci verify --space {m,p | symbolic}
    flagricci trajectory --start 0.2,0.2 --direction bwd [--out traj.csv]
    flagricci equilibria --space 2,1

Exit codes: 0 success, 1 scenario or verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import curvature as cv
from . import lie_algebra as la
from .dynamics import AffineLine, find_equilibria, invariant_line_verify
from .flow import (BACKWARD, FORWARD, Field2, InvalidStart, StepSizeUnderflow,
                   Trajectory, cleared_projection, family_field, field_consistency, integrate,
                   projected_field, wallach_field)
from .polynomial import RatPoly
from .spaces import FlagSpace, Metric3, submersion_metric

log = logging.getLogger("flagricci")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- argument parsing helpers -------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _tuple(text: str, n: int, what: str) -> tuple[Fraction, ...]:
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"{what} needs {n} comma-separated values, got {text!r}")
    return tuple(_fraction(p) for p in parts)


def _space(text: str) -> FlagSpace:
    try:
        return FlagSpace.parse(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _direction(text: str) -> str:
    return {"fwd": FORWARD, "forward": FORWARD, "bwd": BACKWARD, "backward": BACKWARD}[text]


def _fmt(v) -> str:
    return repr(float(v))


# -- scenarios ----------------------------------------------------------------

@dataclass
class ScenarioConfig:
    name: str
    space: FlagSpace
    t0: Fraction
    horizon: float = 200.0
    rtol: float = 1e-10
    atol: float = 1e-12
    out: Optional[str] = None


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}" + (f"  {self.detail}" if self.detail else "")


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    events: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name, ok, detail=""):
        self.checks.append(Check(name, bool(ok), detail))

    def to_json_dict(self) -> dict:
        return {
            "title": self.title,
            "success": self.ok,
            "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks],
            "notes": self.notes,
            "events": self.events,
        }

    def render(self) -> str:
        lines = [self.title]
        lines += [c.line() for c in self.checks]
        lines += [f"note: {n}" for n in self.notes]
        lines.append("result: " + ("success" if self.ok else "failure"))
        return "\n".join(lines)


# scenario name -> (space restriction, default t0, open interval for t0, direction)
SCENARIOS = {
    "ricci-mixed": ("wallach", Fraction(1, 5), (Fraction(1, 8), Fraction(1, 4))),
    "ricd-loss": ("wallach", Fraction(8, 25), (Fraction(5, 16), Fraction(1, 3))),
    "family-dpos": ("any", Fraction(1, 5), (Fraction(1, 8), Fraction(1, 3))),
}
DEFAULT_SPACE = {"ricci-mixed": FlagSpace(1, 1), "ricd-loss": FlagSpace(1, 1), "family-dpos": FlagSpace(2, 1)}
EVENT_TOL = 1e-6


def _validate(cfg: ScenarioConfig) -> None:
    restriction, _, (lo, hi) = SCENARIOS[cfg.name]
    if restriction == "wallach" and not cfg.space.is_wallach:
        raise UsageError(f"scenario {cfg.name} is defined on SU(3)/T^2 only (--space 1,1)")
    if not lo < cfg.t0 < hi:
        raise UsageError(f"t0 must lie in ({lo}, {hi}) for {cfg.name}, got {cfg.t0}")
    if cfg.horizon <= 0 or cfg.rtol <= 0 or cfg.atol <= 0:
        raise UsageError("horizon and tolerances must be positive")


def _run(cfg: ScenarioConfig, direction: str) -> Trajectory:
    t = float(cfg.t0)
    return integrate(cfg.space, (t, t), direction, cfg.horizon, cfg.rtol, cfg.atol)


def _event_dicts(traj: Trajectory) -> list[dict]:
    return [{"name": e.name, "time": e.time, "x": e.x, "y": e.y, "direction": traj.direction}
            for e in traj.events]


def _sample_after(traj: Trajectory, time: float):
    for s in traj.samples:
        if abs(s.time) > abs(time):
            return s
    return traj.end


def _near(ev, target, tol=EVENT_TOL) -> bool:
    return ev is not None and abs(ev.x - float(target)) <= tol and abs(ev.y - float(target)) <= tol


def scenario_ricci_mixed(cfg: ScenarioConfig) -> tuple[Report, Trajectory]:
    rep = Report(f"theorem ricci-mixed  space={cfg.space.m},{cfg.space.p}  t0={float(cfg.t0)!r}")
    lo, hi = cv.submersion_root(cfg.space, "r_x")
    target = (lo + hi) / 2
    rep.notes.append(f"r_x root on the submersion segment: {lo}" if lo == hi else
                     f"r_x root bracket: [{float(lo)!r}, {float(hi)!r}]")

    back = _run(cfg, BACKWARD)
    ev = back.first_event("r_x")
    rep.add("backward r_x sign change", _near(ev, target),
            "none" if ev is None else f"t={ev.x!r} time={ev.time!r}")
    if ev is not None:
        after = _sample_after(back, ev.time)
        vals = after.signature.ricci.values
        rep.add("mixed Ricci after the event", after.signature.mixed_ricci,
                f"time={after.time!r} ricci=({', '.join(_fmt(v) for v in vals)})")

    fwd = _run(cfg, FORWARD)
    a = Fraction(1, 4)
    dist = fwd.min_distance_to((a, a))
    rep.notes.append(f"forward run: status={fwd.status} end time={fwd.end.time!r} "
                     f"distance to (1/4,1/4)={dist:.3e}")
    rep.events = _event_dicts(back) + _event_dicts(fwd)
    return rep, back


def scenario_ricd_loss(cfg: ScenarioConfig) -> tuple[Report, Trajectory]:
    rep = Report(f"theorem ricd-loss  space=1,1  t0={float(cfg.t0)!r}")
    fwd = _run(cfg, FORWARD)
    for d in (1, 2, 3):
        t_d = cv.ric_d_threshold(d)
        ev = fwd.first_event(f"ricd_min_{d}")
        rep.add(f"Ric_{d} loss at t={t_d}", _near(ev, t_d),
                "none" if ev is None else f"t={ev.x!r} time={ev.time!r}")
    t4 = cv.ric_d_threshold(4)
    last = fwd.end.signature.ricd_min[4]
    rep.add(f"Ric_4 stays positive (threshold {t4})",
            fwd.first_event("ricd_min_4") is None and last > 0,
            f"status={fwd.status} end value={_fmt(last)}")
    bad = cv.f_d((0, 2, 1), Fraction(3, 10))
    rep.notes.append(f"f_3 for counts (0,2,1) at t=3/10 equals {bad}, not 0; "
                     f"the d=3 threshold is {cv.ric_d_threshold(3)}")
    rep.events = _event_dicts(fwd)
    return rep, fwd


def scenario_family_dpos(cfg: ScenarioConfig) -> tuple[Report, Trajectory]:
    m, p = cfg.space.m, cfg.space.p
    rep = Report(f"theorem family-dpos  space={m},{p}  t0={float(cfg.t0)!r}")
    t1 = Fraction(p, 2 * m + 6 * p)
    s_lo, s_hi = cv.submersion_root(cfg.space, "scalar")
    s_target = (s_lo + s_hi) / 2
    poly = cv.submersion_polynomials(cfg.space)["scalar"]
    rep.notes.append(f"cleared S(t) = {poly}")
    rep.notes.append(f"S root: {s_lo}" if s_lo == s_hi else
                     f"S root is irrational; bracket [{float(s_lo)!r}, {float(s_hi)!r}]")

    back = _run(cfg, BACKWARD)
    ev1 = back.first_event("dpos_1")
    rep.add(f"dpos_1 loss at t={t1}", _near(ev1, t1),
            "none" if ev1 is None else f"t={ev1.x!r} time={ev1.time!r}")
    evs = back.first_event("scalar")
    later = ev1 is not None and evs is not None and abs(evs.time) > abs(ev1.time)
    rep.add(f"scalar zero at t={float(s_target)!r}, after dpos_1", _near(evs, s_target) and later,
            "none" if evs is None else f"t={evs.x!r} time={evs.time!r}")
    rep.notes.append(f"backward run: status={back.status} end time={back.end.time!r}")
    rep.events = _event_dicts(back)
    return rep, back


RUNNERS: dict[str, Callable] = {
    "ricci-mixed": scenario_ricci_mixed,
    "ricd-loss": scenario_ricd_loss,
    "family-dpos": scenario_family_dpos,
}


def run_scenario(cfg: ScenarioConfig) -> tuple[Report, Trajectory]:
    _validate(cfg)
    return RUNNERS[cfg.name](cfg)


# -- verification suite -------------------------------------------------------

def _corrupted(F: Field2) -> Field2:
    x, y = RatPoly.symbols("x y")
    return Field2(F.u + Fraction(1, 1000) * x * x * y, F.v, name=F.name + "*")


def _rational_samples(n: int, seed: int = 7) -> list[tuple[Fraction, Fraction]]:
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        x, y = Fraction(rng.randint(1, 98), 100), Fraction(rng.randint(1, 98), 100)
        if x + y < 1:
            out.append((x, y))
    return out


def verification_checks(space: Optional[FlagSpace], corrupt: bool = False):
    """Yield (name, ok, detail) for each identity; ``space=None`` is symbolic (m, p)."""
    F = projected_field(space)
    if corrupt:
        F = _corrupted(F)
    x, y = RatPoly.symbols("x y")

    ok, res = invariant_line_verify(F, AffineLine.diagonal())
    yield "diagonal x=y invariant", ok, "" if ok else f"residual {res}"
    swap = F.u.substitute({"x": y, "y": x}) - F.v
    yield "swap symmetry u(y,x)=v(x,y)", swap.is_zero(), ""
    for name, line in (("line x=1/2 invariant", AffineLine.vertical(Fraction(1, 2))),
                       ("line y=1/2 invariant", AffineLine.horizontal(Fraction(1, 2)))):
        ok, res = invariant_line_verify(F, line)
        yield name, ok, "" if ok else f"residual {res}"

    fam11 = family_field().specialize(1, 1)
    W = wallach_field()
    yield "family field at (1,1) equals the Wallach field", \
        (fam11.u - W.u).is_zero() and (fam11.v - W.v).is_zero(), ""

    Nx, Ny = cleared_projection(space)
    yield "cleared trace-normalized flow equals 2(u,v)", \
        (Nx - 2 * F.u).is_zero() and (Ny - 2 * F.v).is_zero(), ""

    if space is None:
        # (m, p) -> (p(1-4t), p(2t-1)) has Einstein coordinate (m+p)/(2(m+2p)) = t; the
        # field is linear in (m, p), so this exact substitution tests u(t,t) = 0 there
        t, p = RatPoly.symbols("t p")
        bind = {"x": t, "y": t, "m": p * (1 - 4 * t), "p": p * (2 * t - 1)}
        yield "diagonal Einstein point is an equilibrium", \
            F.u.substitute(bind).is_zero() and F.v.substitute(bind).is_zero(), ""
        return

    K = space.diagonal_einstein()
    u0, v0 = F.exact(K, K)
    yield f"diagonal Einstein point ({K},{K}) is an equilibrium", u0 == 0 and v0 == 0, ""

    num = cv.family_ricci_numerators(space)
    D = 4 * (space.m + 2 * space.p)
    coherent = True
    for sx, sy in _rational_samples(20):
        g = (sx, sy, 1 - sx - sy)
        r = cv.ricci_components(space, g).values
        pt = {"x": g[0], "y": g[1], "z": g[2]}
        coherent &= all(n.evaluate(pt) == D * g[0] * g[1] * g[2] * rk for n, rk in zip(num, r))
    yield "cleared Ricci numerators match the Ricci components", coherent, ""

    rep = field_consistency(space, [tuple(float(c) for c in s) for s in _rational_samples(50, seed=11)])
    yield "projected field parallel to the normalized flow", \
        rep.parallel and rep.max_angle < 1e-9, f"max|sin|={rep.max_angle:.1e} ratio>={rep.min_ratio:.3g}"

    if not space.is_wallach:
        return
    rng = np.random.default_rng(3)
    worst_k = worst_r = 0.0
    for _ in range(20):
        g = tuple(rng.uniform(0.1, 2.0, 3))
        K6 = la.sectional_matrix(g)
        tab = cv.sectional_table(g)
        worst_k = max(worst_k, max(abs(K6[i - 1, j - 1] - tab[i, j])
                                   for i in range(1, 7) for j in range(1, 7) if i != j))
        ric = np.array(cv.ricci_components(space, g).values, dtype=float)
        worst_r = max(worst_r, float(np.max(np.abs(la.ricci_oracle(g) - la.KILLING_SCALE * np.repeat(ric, 2)))))
    yield "sectional table matches the matrix model", worst_k < 1e-10, f"max err {worst_k:.1e}"
    yield "row sums of K equal 3 r", worst_r < 1e-10, f"max err {worst_r:.1e}"

    eps = Fraction(1, 10**6)
    good = True
    for d in range(1, 6):
        t = cv.ric_d_threshold(d)
        above = cv.ric_d_min(submersion_metric(t + eps), d)
        at = cv.ric_d_min(submersion_metric(t), d)
        good &= above > 0 and at <= 0
    yield "Ric_d thresholds are sharp on the submersion segment", good, ""


# -- commands -----------------------------------------------------------------

def cmd_curvature(args) -> int:
    space = _space(args.space)
    vals = _tuple(args.metric, 3, "--metric")
    try:
        g = Metric3(*vals)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"invalid metric: {exc}") from None
    sig = cv.signature(space, tuple(g))
    scal = sig.scalars()
    out = {
        "space": [space.m, space.p],
        "metric": [float(v) for v in vals],
        "signature": sig.to_json_dict(),
        "ricci_positive": sig.ricci_positive,
        "mixed_ricci": sig.mixed_ricci,
        "vanishing": [k for k, v in scal.items() if v is not None and v == 0],
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_theorem(args) -> int:
    space = _space(args.space) if args.space else DEFAULT_SPACE[args.name]
    t0 = _fraction(args.t0) if args.t0 is not None else SCENARIOS[args.name][1]
    cfg = ScenarioConfig(args.name, space, t0, args.horizon, args.rtol, args.atol, args.out)
    rep, traj = run_scenario(cfg)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            traj.to_csv(fh)
    print(json.dumps(rep.to_json_dict(), indent=2) if args.json else rep.render())
    return EXIT_OK if rep.ok else EXIT_FAIL


def portrait_rows(space: FlagSpace, n: int):
    """Exact field values at (i/n, j/n), i, j >= 1, i + j < n, row-major in i."""
    F = projected_field(space)
    for i in range(1, n):
        for j in range(1, n - i):
            x, y = Fraction(i, n), Fraction(j, n)
            u, v = F.exact(x, y)
            yield x, y, u, v


def cmd_portrait(args) -> int:
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    space = _space(args.space)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "u", "v"])
        for row in portrait_rows(space, args.grid):
            w.writerow([_fmt(c) for c in row])
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    space = None if args.space == "symbolic" else _space(args.space)
    label = "symbolic (m,p)" if space is None else f"{space.m},{space.p}"
    results = []
    for name, ok, detail in verification_checks(space, corrupt=args.corrupt):
        results.append({"name": name, "ok": bool(ok), "detail": detail})
        if not args.json:
            print(Check(name, ok, detail).line())
    failed = [r["name"] for r in results if not r["ok"]]
    if args.json:
        print(json.dumps({"space": label, "checks": results, "success": not failed}, indent=2))
    if failed:
        print(f"verification failed: {failed[0]}", file=sys.stderr)
        return EXIT_FAIL
    if not args.json:
        print(f"all {len(results)} checks passed for space {label}")
    return EXIT_OK


def cmd_trajectory(args) -> int:
    space = _space(args.space)
    start = _tuple(args.start, 2, "--start")
    try:
        traj = integrate(space, tuple(float(c) for c in start), _direction(args.direction),
                         args.horizon, args.rtol, args.atol)
    except InvalidStart as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        with open(args.out, "w", newline="") as fh:
            traj.to_csv(fh)
    summary = {"status": traj.status, "end_time": traj.end.time,
               "end": [float(traj.end.point.x), float(traj.end.point.y)],
               "steps": traj.steps, "events": _event_dicts(traj)}
    if args.json:
        print(json.dumps(summary, indent=2))
    elif not args.out:
        traj.to_csv(sys.stdout)
    else:
        print(f"status={traj.status} end_time={traj.end.time!r} events={len(traj.events)}")
    return EXIT_OK


def cmd_equilibria(args) -> int:
    space = _space(args.space)
    eqs = find_equilibria(space, grid=args.grid or 40)
    if args.json:
        print(json.dumps([e.to_json_dict() for e in eqs], indent=2))
    else:
        for e in eqs:
            eig = ", ".join(f"{ev.real:.6g}" + (f"{ev.imag:+.6g}i" if ev.imag else "") for ev in e.eigenvalues)
            print(f"{e.label or '-':2} ({float(e.point.x):.10f}, {float(e.point.y):.10f})  {e.kind:10} [{eig}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    integ = argparse.ArgumentParser(add_help=False)
    integ.add_argument("--horizon", type=float, default=200.0)
    integ.add_argument("--rtol", type=float, default=1e-10)
    integ.add_argument("--atol", type=float, default=1e-12)
    integ.add_argument("--out", help="write the trajectory as CSV")

    ap = argparse.ArgumentParser(prog="flagricci", description=__doc__.split("\n\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", parents=[common], help="curvature signature of a metric (JSON)")
    p.add_argument("--space", default="1,1")
    p.add_argument("--metric", required=True, help="x,y,z")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("theorem", parents=[common, integ], help="run a named scenario")
    p.add_argument("name", choices=sorted(SCENARIOS))
    p.add_argument("--space", default=None, help="m,p (scenario default if omitted)")
    p.add_argument("--t0", default=None, help="start (t0, t0) on the diagonal")
    p.set_defaults(func=cmd_theorem)

    p = sub.add_parser("portrait", help="CSV of field values on an interior grid")
    p.add_argument("--space", default="1,1")
    p.add_argument("--grid", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_portrait)

    p = sub.add_parser("verify", parents=[common], help="exact identity and oracle checks")
    p.add_argument("--space", default="1,1", help="m,p or 'symbolic'")
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trajectory", parents=[common, integ], help="integrate from a start point")
    p.add_argument("--space", default="1,1")
    p.add_argument("--start", required=True, help="x,y")
    p.add_argument("--direction", choices=("fwd", "bwd"), default="fwd")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("equilibria", parents=[common], help="interior equilibria and their types")
    p.add_argument("--space", default="1,1")
    p.add_argument("--grid", type=int, default=40)
    p.set_defaults(func=cmd_equilibria)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"flagricci: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StepSizeUnderflow as exc:
        print(f"flagricci: integration failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
