"""Closed-form curvature of invariant metrics on the three-summand flag spaces.

Conventions
-----------
* Sectional curvatures (``sectional_table``) use the background form for
  which g(A_12/2, A_12/2) = x; they agree with :mod:`flagricci.lie_algebra`.
* Ricci eigenvalues (``ricci_components``) use the negative Killing form,
  which is 3 times the background form.  Consequently
  ``sum_j K(X_i, X_j) == 3 * r`` for the summand of X_i.  Signs, zero sets and
  thresholds are unaffected by this constant.

Every function accepts floats or exact rationals; ints are promoted to
:class:`~fractions.Fraction` so exact inputs stay exact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral
from typing import Optional

from .polynomial import RatPoly, bisect_root
from .spaces import FlagSpace

WALLACH = FlagSpace(1, 1)

# a variant of row (2,5) with coefficient 1/8 on (z-x)^2/xyz circulates;
# the matrix model gives 1/16 like the symmetric rows (1,5), (1,6), (2,6)
VARIANT_ROW_25_COEFF = Fraction(1, 8)


def _num(v):
    return Fraction(v) if isinstance(v, Integral) else v


def _xyz(g):
    x, y, z = g
    return _num(x), _num(y), _num(z)


# -- sectional curvature ------------------------------------------------------

def _mixed_12(x, y, z, sq_coeff=Fraction(1, 16)):
    # plane spanned by one vector of summand 1 and one of summand 2
    return -Fraction(3, 16) * z / (x * y) + 1 / (8 * x) + 1 / (8 * y) + sq_coeff * (x - y) ** 2 / (x * y * z)


def _mixed_13(x, y, z, sq_coeff=Fraction(1, 16)):
    return -Fraction(3, 16) * y / (x * z) + 1 / (8 * x) + 1 / (8 * z) + sq_coeff * (z - x) ** 2 / (x * y * z)


def _mixed_23(x, y, z, sq_coeff=Fraction(1, 16)):
    return -Fraction(3, 16) * x / (y * z) + 1 / (8 * y) + 1 / (8 * z) + sq_coeff * (y - z) ** 2 / (x * y * z)


SUMMAND = (0, 0, 1, 1, 2, 2)


@dataclass(frozen=True)
class SectionalTable:
    """The 15 basis-plane curvatures K_ij, 1 <= i < j <= 6 (1-based, symmetric)."""

    values: dict

    def __getitem__(self, ij):
        i, j = ij
        if i == j:
            raise KeyError("K_ii is undefined")
        return self.values[(min(i, j), max(i, j))]

    def minimum(self):
        return min(self.values.values())

    def row(self, i: int) -> list:
        return [self[i, j] for j in range(1, 7) if j != i]


def sectional_table(g, space: FlagSpace = WALLACH, variant_row_25: bool = False) -> SectionalTable:
    """Closed-form basis-plane sectional curvatures of SU(3)/T^2.

    With ``variant_row_25=True`` the (2,5) entry uses the coefficient 1/8
    instead of the symmetric 1/16.  The matrix model rejects that variant; it
    is kept only to report the discrepancy.
    """
    if not space.is_wallach:
        raise ValueError(f"sectional table is only available for SU(3)/T^2, not {space}")
    x, y, z = _xyz(g)
    same = (1 / x, 1 / y, 1 / z)
    mixed = {
        (0, 1): _mixed_12(x, y, z),
        (0, 2): _mixed_13(x, y, z),
        (1, 2): _mixed_23(x, y, z),
    }
    vals = {}
    for i in range(1, 7):
        for j in range(i + 1, 7):
            a, b = SUMMAND[i - 1], SUMMAND[j - 1]
            vals[(i, j)] = same[a] if a == b else mixed[(a, b)]
    if variant_row_25:
        vals[(2, 5)] = _mixed_13(x, y, z, VARIANT_ROW_25_COEFF)
    return SectionalTable(vals)


# -- Ricci curvature ----------------------------------------------------------

@dataclass(frozen=True)
class RicciSpectrum:
    """Ricci eigenvalues per summand with their multiplicities."""

    r_x: object
    r_y: object
    r_z: object
    n1: int
    n2: int
    n3: int

    @property
    def values(self):
        return (self.r_x, self.r_y, self.r_z)

    @property
    def multiplicities(self):
        return (self.n1, self.n2, self.n3)

    def eigenvalues(self) -> list:
        """Full spectrum with multiplicity, ascending."""
        out = []
        for r, n in zip(self.values, self.multiplicities):
            out.extend([r] * n)
        return sorted(out)


def _wallach_ricci(x, y, z):
    r_x = 1 / (2 * x) + Fraction(1, 12) * (x / (y * z) - z / (x * y) - y / (x * z))
    r_y = 1 / (2 * y) + Fraction(1, 12) * (-x / (y * z) - z / (x * y) + y / (x * z))
    r_z = 1 / (2 * z) + Fraction(1, 12) * (-x / (y * z) + z / (x * y) - y / (x * z))
    return r_x, r_y, r_z


def _family_ricci(m, p, x, y, z):
    cp = Fraction(p, 4 * (m + 2 * p))
    cm = Fraction(m, 4 * (m + 2 * p))
    r_x = 1 / (2 * x) + cp * (x / (y * z) - z / (x * y) - y / (x * z))
    r_y = 1 / (2 * y) + cp * (-x / (y * z) - z / (x * y) + y / (x * z))
    r_z = 1 / (2 * z) + cm * (-x / (y * z) + z / (x * y) - y / (x * z))
    return r_x, r_y, r_z


def ricci_components(space: FlagSpace, g) -> RicciSpectrum:
    x, y, z = _xyz(g)
    if space.is_wallach:
        r = _wallach_ricci(x, y, z)
    else:
        r = _family_ricci(space.m, space.p, x, y, z)
    return RicciSpectrum(*r, *space.multiplicities)


def scalar_curvature(space: FlagSpace, g):
    ric = ricci_components(space, g)
    return sum(n * r for n, r in zip(ric.multiplicities, ric.values))


def d_positive_sum(space: FlagSpace, g, d: int):
    """Sum of the d smallest Ricci eigenvalues, counted with multiplicity."""
    if not 1 <= d <= space.dim:
        raise ValueError(f"d must lie in 1..{space.dim}, got {d}")
    return sum(ricci_components(space, g).eigenvalues()[:d])


def _dpos_all(ric: RicciSpectrum) -> list:
    return list(itertools.accumulate(ric.eigenvalues()))


# cleared-denominator forms ---------------------------------------------------

_X, _Y, _Z, _T, _M, _P = RatPoly.symbols("x y z t m p")


def wallach_ricci_numerators() -> tuple[RatPoly, RatPoly, RatPoly]:
    """12xyz * (r_x, r_y, r_z) for SU(3)/T^2 as polynomials in x, y, z."""
    x, y, z = _X, _Y, _Z
    return (6 * y * z + x ** 2 - z ** 2 - y ** 2,
            6 * x * z - x ** 2 - z ** 2 + y ** 2,
            6 * x * y - x ** 2 + z ** 2 - y ** 2)


def family_ricci_numerators(space: Optional[FlagSpace] = None) -> tuple[RatPoly, RatPoly, RatPoly]:
    """4(m+2p)xyz * (r_x, r_y, r_z); symbolic in m, p when ``space`` is None."""
    x, y, z = _X, _Y, _Z
    m, p = (_M, _P) if space is None else (RatPoly.const(space.m), RatPoly.const(space.p))
    half = 2 * (m + 2 * p)
    return (half * y * z + p * (x ** 2 - z ** 2 - y ** 2),
            half * x * z + p * (-x ** 2 - z ** 2 + y ** 2),
            half * x * y + m * (-x ** 2 + z ** 2 - y ** 2))


def submersion_polynomials(space: FlagSpace) -> dict[str, RatPoly]:
    """Cleared numerators of r_x, r_z and S along (t, t, 1 - 2t).

    Each is the true quantity times a factor positive on 0 < t < 1/2, so the
    roots and signs coincide.
    """
    num = family_ricci_numerators(space)
    seg = {"x": _T, "y": _T, "z": 1 - 2 * _T}
    rx, ry, rz = (n.substitute(seg) for n in num)
    n1, n2, n3 = space.multiplicities
    return {"r_x": rx, "r_y": ry, "r_z": rz, "scalar": n1 * rx + n2 * ry + n3 * rz}


def submersion_root(space: FlagSpace, quantity: str, lo=Fraction(0), hi=Fraction(1, 4),
                    tol=Fraction(1, 10**15)) -> tuple[Fraction, Fraction]:
    """Bracket the sign change of ``r_x``/``r_z``/``scalar`` on the segment.

    Exact bisection on the cleared numerator; a rational root is returned as
    ``(r, r)``.  The default bracket (0, 1/4) holds the r_x and scalar roots
    for every member of the family.
    """
    return bisect_root(submersion_polynomials(space)[quantity], lo, hi, tol)


# -- intermediate Ricci curvature ---------------------------------------------

@dataclass(frozen=True)
class RicDChoice:
    """A basis vector X_i plus d partners, as an index subset or as counts (a, b, c).

    ``a`` counts the partner in X_i's own summand, ``b`` and ``c`` the partners
    in the two other summands, in increasing summand order.
    """

    i: int
    subset: Optional[tuple] = None
    counts: Optional[tuple] = None

    def __post_init__(self):
        if not 1 <= self.i <= 6:
            raise ValueError(f"basis index must lie in 1..6, got {self.i}")
        if (self.subset is None) == (self.counts is None):
            raise ValueError("give exactly one of subset or counts")
        if self.subset is not None:
            s = tuple(self.subset)
            if len(set(s)) != len(s) or self.i in s or not all(1 <= j <= 6 for j in s) or not s:
                raise ValueError(f"invalid partner subset {s} for X_{self.i}")
            object.__setattr__(self, "subset", tuple(sorted(s)))
        else:
            a, b, c = self.counts
            if a not in (0, 1) or b not in (0, 1, 2) or c not in (0, 1, 2) or a + b + c == 0:
                raise ValueError(f"invalid counts {self.counts}")

    @property
    def d(self) -> int:
        return len(self.subset) if self.subset is not None else sum(self.counts)

    def to_counts(self) -> tuple[int, int, int]:
        if self.counts is not None:
            return tuple(self.counts)
        own = SUMMAND[self.i - 1]
        others = [s for s in range(3) if s != own]
        tally = [0, 0, 0]
        for j in self.subset:
            sj = SUMMAND[j - 1]
            tally[0 if sj == own else 1 + others.index(sj)] += 1
        return tuple(tally)


def ric_d_basis(g, choice: RicDChoice):
    """Ric_d(X_i) for the chosen partners."""
    if choice.subset is not None:
        K = sectional_table(g)
        return sum(K[choice.i, j] for j in choice.subset)
    x, y, z = _xyz(g)
    a, b, c = choice.counts
    own = SUMMAND[choice.i - 1]
    if own == 0:
        return a / x + b * _mixed_12(x, y, z) + c * _mixed_13(x, y, z)
    if own == 1:
        return a / y + b * _mixed_12(x, y, z) + c * _mixed_23(x, y, z)
    return a / z + b * _mixed_13(x, y, z) + c * _mixed_23(x, y, z)


def _ric_d_mins(K: SectionalTable) -> dict[int, object]:
    # for fixed i the smallest d-subset sum is the sum of the d smallest row entries
    rows = [sorted(K.row(i)) for i in range(1, 7)]
    return {d: min(sum(r[:d]) for r in rows) for d in range(1, 6)}


def ric_d_min(g, d: int):
    """Minimum of Ric_d over all basis vectors and all d-subsets of partners."""
    if not 1 <= d <= 5:
        raise ValueError(f"d must lie in 1..5, got {d}")
    return _ric_d_mins(sectional_table(g))[d]


def valid_counts(d: int) -> list[tuple[int, int, int]]:
    return [(a, b, c) for a in (0, 1) for b in (0, 1, 2) for c in (0, 1, 2) if a + b + c == d]


def f_d(counts, t):
    """Ric_d(X_i), i = 1..4, on (t, t, 1-2t), times 16 t^2 > 0: -3b + c + 2(8a + 5b - c) t."""
    a, b, c = counts
    t = _num(t)
    return -3 * b + c + 2 * (8 * a + 5 * b - c) * t


def g_d(counts, t):
    """Ric_d(X_i), i = 5, 6, on (t, t, 1-2t), times 16 t^2 (1-2t) > 0.

    Equals (b + c)(1 - 2t)^2 + 16 a t^2.  The shorthand
    (d - a)(1 - 4t) + 4(2a + d) t^2 differs from this when a = 1.
    """
    a, b, c = counts
    t = _num(t)
    return (b + c) - 4 * (b + c) * t + 4 * (4 * a + b + c) * t ** 2


def g_d_shorthand(counts, t):
    a, b, c = counts
    d = a + b + c
    t = _num(t)
    return (d - a) * (1 - 4 * t) + 4 * (2 * a + d) * t ** 2


def _sup_nonpositive(coeffs: list[Fraction], lo: Fraction, hi: Fraction) -> Optional[Fraction]:
    """Largest t in (lo, hi) with q(t) <= 0 for q of degree <= 2 (None if q > 0 there)."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if not coeffs:
        return hi
    if len(coeffs) == 1:
        return hi if coeffs[0] <= 0 else None
    if len(coeffs) == 2:
        c0, c1 = coeffs
        root = -c0 / c1
        if c1 > 0:
            return min(root, hi) if root > lo else None
        return hi if root < hi else None
    c0, c1, c2 = coeffs
    disc = c1 * c1 - 4 * c0 * c2
    if c2 > 0 and disc < 0:
        return None
    # exact roots are only needed when the quadratic can vanish on (lo, hi)
    if c2 > 0 and disc >= 0:
        sq = Fraction(math.isqrt(disc.numerator), math.isqrt(disc.denominator))
        if sq * sq != disc:
            raise ArithmeticError("irrational root in threshold computation")
        r_hi = (-c1 + sq) / (2 * c2)
        r_lo = (-c1 - sq) / (2 * c2)
        if r_hi <= lo or r_lo >= hi:
            return None
        return min(r_hi, hi)
    raise ArithmeticError("concave quadratic constraint not supported")


def ric_d_threshold(d: int) -> Fraction:
    """Infimum t* with min Ric_d > 0 on (t*, 1/2) along the submersion segment.

    Exact: every (a, b, c) yields a linear form (i = 1..4) or a quadratic
    (i = 5, 6) in t, and t* is the largest point of (0, 1/2) where one of
    them is non-positive.
    """
    if not 1 <= d <= 5:
        raise ValueError(f"d must lie in 1..5, got {d}")
    lo, hi = Fraction(0), Fraction(1, 2)
    best = lo
    for counts in valid_counts(d):
        a, b, c = counts
        lin = [Fraction(-3 * b + c), Fraction(2 * (8 * a + 5 * b - c))]
        quad = [Fraction(b + c), Fraction(-4 * (b + c)), Fraction(4 * (4 * a + b + c))]
        for coeffs in (lin, quad):
            s = _sup_nonpositive(coeffs, lo, hi)
            if s is not None and s > best:
                best = s
    return best


def binding_choice(d: int) -> tuple[int, int, int]:
    """Counts (a, b, c) whose linear form vanishes at ``ric_d_threshold(d)``."""
    t = ric_d_threshold(d)
    for counts in valid_counts(d):
        if f_d(counts, t) == 0:
            return counts
    raise LookupError(f"no linear form vanishes at t = {t}")


# -- aggregate ----------------------------------------------------------------

@dataclass
class CurvatureSignature:
    """All tracked curvature scalars of one metric."""

    ricci: RicciSpectrum
    scalar: object
    dpos: list
    min_sec: object = None
    ricd_min: dict = field(default_factory=dict)

    def scalars(self) -> dict[str, object]:
        """Flat mapping with the fixed JSON field names (None where undefined)."""
        out = {"r_x": self.ricci.r_x, "r_y": self.ricci.r_y, "r_z": self.ricci.r_z,
               "scalar": self.scalar, "min_sec": self.min_sec}
        for d in range(1, 6):
            out[f"ricd_min_{d}"] = self.ricd_min.get(d)
        for d, v in enumerate(self.dpos, start=1):
            out[f"dpos_{d}"] = v
        return out

    def to_json_dict(self) -> dict[str, Optional[float]]:
        return {k: (None if v is None else float(v)) for k, v in self.scalars().items()}

    @property
    def ricci_positive(self) -> bool:
        return min(self.ricci.values) > 0

    @property
    def mixed_ricci(self) -> bool:
        return min(self.ricci.values) < 0 < max(self.ricci.values)


def signature(space: FlagSpace, g) -> CurvatureSignature:
    ric = ricci_components(space, g)
    scalar = sum(n * r for n, r in zip(ric.multiplicities, ric.values))
    sig = CurvatureSignature(ricci=ric, scalar=scalar, dpos=_dpos_all(ric))
    if space.is_wallach:
        K = sectional_table(g)
        sig.min_sec = K.minimum()
        sig.ricd_min = _ric_d_mins(K)
    return sig

