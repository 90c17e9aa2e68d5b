"""Equilibria of the projected flow and exact invariant-line checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .flow import Field2, projected_field
from .polynomial import RatPoly
from .spaces import FlagSpace, SimplexPoint

REPELLER, ATTRACTOR, SADDLE, DEGENERATE = "repeller", "attractor", "saddle", "degenerate"

WALLACH_LABELS = {
    "A": (Fraction(1, 4), Fraction(1, 4)),
    "B": (Fraction(1, 3), Fraction(1, 3)),
    "C": (Fraction(1, 4), Fraction(1, 2)),
    "D": (Fraction(1, 2), Fraction(1, 4)),
}


@dataclass(frozen=True)
class Equilibrium:
    point: SimplexPoint
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    kind: str
    label: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "x": float(self.point.x),
            "y": float(self.point.y),
            "eigenvalues": [{"re": float(e.real), "im": float(e.imag)} for e in self.eigenvalues],
            "kind": self.kind,
        }


@dataclass(frozen=True)
class AffineLine:
    """s -> (x0 + a s, y0 + b s) with normal vector w."""

    x0: Fraction
    a: Fraction
    y0: Fraction
    b: Fraction
    normal: tuple

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise ValueError("line direction must be non-zero")
        w1, w2 = self.normal
        if w1 * self.a + w2 * self.b != 0:
            raise ValueError("normal vector is not orthogonal to the direction")

    @classmethod
    def diagonal(cls) -> "AffineLine":
        return cls(Fraction(0), Fraction(1), Fraction(0), Fraction(1), (-1, 1))

    @classmethod
    def vertical(cls, c) -> "AffineLine":
        """The line x = c."""
        return cls(Fraction(c), Fraction(0), Fraction(0), Fraction(1), (1, 0))

    @classmethod
    def horizontal(cls, c) -> "AffineLine":
        """The line y = c."""
        return cls(Fraction(0), Fraction(1), Fraction(c), Fraction(0), (0, 1))


def classify(eigenvalues, band: float = 1e-9) -> str:
    re = np.real(eigenvalues)
    if np.any(np.abs(re) < band):
        return DEGENERATE
    if np.all(re > 0):
        return REPELLER
    if np.all(re < 0):
        return ATTRACTOR
    return SADDLE


def _field(space_or_field) -> Field2:
    if isinstance(space_or_field, Field2):
        return space_or_field
    return projected_field(space_or_field)


def jacobian(space: FlagSpace, at) -> np.ndarray:
    """Jacobian of (u, v) from exact partial derivatives, evaluated at ``at``."""
    (ux, uy), (vx, vy) = _field(space).jacobian_polys()
    px, py = at
    pt = {"x": px, "y": py}
    return np.array([[float(ux.evaluate(pt)), float(uy.evaluate(pt))],
                     [float(vx.evaluate(pt)), float(vy.evaluate(pt))]])


def invariant_line_verify(space_or_field, line: AffineLine) -> tuple[bool, RatPoly]:
    """Exact test of w . (u, v) = 0 along the line.

    Returns the verdict and the residual polynomial in the line parameter
    ``t`` (and in m, p for the symbolic family field).
    """
    F = _field(space_or_field)
    t = RatPoly.var("t")
    param = {"x": line.x0 + line.a * t, "y": line.y0 + line.b * t}
    w1, w2 = line.normal
    residual = w1 * F.u.substitute(param) + w2 * F.v.substitute(param)
    return residual.is_zero(), residual


def _labels(space: FlagSpace) -> dict:
    if space.is_wallach:
        return WALLACH_LABELS
    k = space.diagonal_einstein()
    return {"K": (k, k)}


def _newton(F: Field2, seeds: np.ndarray, iters: int = 80, tol: float = 1e-15):
    (ux, uy), (vx, vy) = F.jacobian_polys()
    order = ("x", "y")
    Ju = [ux.compile(order), uy.compile(order), vx.compile(order), vy.compile(order)]
    uf, vf = F.u.compile(order), F.v.compile(order)
    X = seeds[:, 0].copy()
    Y = seeds[:, 1].copy()
    ok = np.ones(len(X), dtype=bool)

    def resid(X, Y):
        return np.hypot(uf(X, Y), vf(X, Y))

    r = resid(X, Y)
    with np.errstate(all="ignore"):
        for _ in range(iters):
            a, b, c, d = (f(X, Y) for f in Ju)
            det = a * d - b * c
            fu, fv = uf(X, Y), vf(X, Y)
            dx = (d * fu - b * fv) / det
            dy = (-c * fu + a * fv) / det
            ok &= np.isfinite(dx) & np.isfinite(dy)
            dx = np.where(ok, dx, 0.0)
            dy = np.where(ok, dy, 0.0)
            lam = np.ones_like(X)
            Xn, Yn = X - dx, Y - dy
            rn = resid(Xn, Yn)
            # backtracking: halve the step where the residual did not drop
            for _ in range(30):
                bad = ~(rn < r) & (r > tol)
                if not bad.any():
                    break
                lam = np.where(bad, lam / 2, lam)
                Xn = np.where(bad, X - lam * dx, Xn)
                Yn = np.where(bad, Y - lam * dy, Yn)
                rn = np.where(bad, resid(Xn, Yn), rn)
            accept = rn <= r
            X = np.where(accept, Xn, X)
            Y = np.where(accept, Yn, Y)
            r = np.where(accept, rn, r)
            if np.all((r < tol) | ~ok):
                break
    return X, Y, r, ok


def find_equilibria(space: FlagSpace, grid: int = 40, merge_tol: float = 1e-8,
                    residual_tol: float = 1e-12, interior_margin: float = 1e-9) -> list[Equilibrium]:
    """Interior equilibria by damped Newton from a grid of seeds.

    Seeds are the cell centres of a ``grid`` x ``grid`` lattice lying in the
    open simplex.  Non-converging seeds are dropped, roots on or outside the
    boundary discarded, and duplicates within ``merge_tol`` merged.
    """
    return list(_find_equilibria(space, grid, merge_tol, residual_tol, interior_margin))


@lru_cache(maxsize=32)
def _find_equilibria(space, grid, merge_tol, residual_tol, interior_margin) -> tuple:
    F = projected_field(space)
    g = (np.arange(grid) + 0.5) / grid
    XX, YY = np.meshgrid(g, g, indexing="ij")
    mask = XX + YY < 1
    seeds = np.column_stack([XX[mask], YY[mask]])
    X, Y, r, ok = _newton(F, seeds)
    found: list[tuple[float, float]] = []
    for x, y, res, good in zip(X, Y, r, ok):
        if not good or not res < residual_tol:
            continue
        if min(x, y, 1 - x - y) <= interior_margin:
            continue
        if any(np.hypot(x - a, y - b) < merge_tol for a, b in found):
            continue
        found.append((float(x), float(y)))
    found.sort()
    labels = _labels(space)
    out = []
    for x, y in found:
        u, v = F(x, y)
        if max(abs(u), abs(v)) >= residual_tol:
            continue
        J = jacobian(space, (x, y))
        eig = np.linalg.eigvals(J)
        eig = eig[np.lexsort((eig.imag, eig.real))]
        label = next((name for name, (lx, ly) in labels.items()
                      if abs(x - float(lx)) < 1e-9 and abs(y - float(ly)) < 1e-9), None)
        out.append(Equilibrium(SimplexPoint(x, y), J, eig, classify(eig), label))
    return tuple(out)


def label_lookup(equilibria, label: str) -> Equilibrium:
    for e in equilibria:
        if e.label == label:
            return e
    raise KeyError(label)

