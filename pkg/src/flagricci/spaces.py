"""Geometric settings and metric coordinates.

Two settings are supported: the Wallach space SU(3)/T^2, and the flag family
SU(m+2p)/S(U(m) x U(p) x U(p)) with m >= p >= 1.  Both have three isotropy
summands, so an invariant metric is a positive triple ``(x, y, z)``.  The
Wallach space is the member ``(m, p) = (1, 1)`` of the family.

Values may be floats or :class:`fractions.Fraction`; exact inputs give exact
outputs throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Real


@dataclass(frozen=True)
class FlagSpace:
    """SU(m+2p)/S(U(m) x U(p) x U(p)); ``FlagSpace(1, 1)`` is SU(3)/T^2."""

    m: int = 1
    p: int = 1

    def __post_init__(self):
        if not (isinstance(self.m, int) and isinstance(self.p, int)):
            raise TypeError("m and p must be integers")
        if not self.m >= self.p >= 1:
            raise ValueError(f"need m >= p >= 1, got (m, p) = ({self.m}, {self.p})")

    @classmethod
    def wallach(cls) -> "FlagSpace":
        return cls(1, 1)

    @classmethod
    def parse(cls, text: str) -> "FlagSpace":
        try:
            m, p = (int(s) for s in text.split(","))
        except ValueError:
            raise ValueError(f"space must look like 'm,p', got {text!r}") from None
        return cls(m, p)

    @property
    def is_wallach(self) -> bool:
        return self.m == 1 and self.p == 1

    @property
    def multiplicities(self) -> tuple[int, int, int]:
        """Real dimensions (n1, n2, n3) of the three isotropy summands."""
        return 2 * self.m * self.p, 2 * self.m * self.p, 2 * self.p * self.p

    @property
    def dim(self) -> int:
        return 4 * self.m * self.p + 2 * self.p * self.p

    def diagonal_einstein(self) -> Fraction:
        """Diagonal coordinate (m+p)/(2(m+2p)) of the Einstein point K."""
        return Fraction(self.m + self.p, 2 * (self.m + 2 * self.p))

    def __str__(self):
        return "SU(3)/T^2" if self.is_wallach else f"SU({self.m + 2 * self.p})/S(U({self.m})xU({self.p})xU({self.p}))"


def _check_positive(**vals):
    for name, v in vals.items():
        if not isinstance(v, Real):
            raise TypeError(f"{name} must be real, got {type(v).__name__}")
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class Metric3:
    """Invariant metric: one positive coefficient per isotropy summand."""

    x: Real
    y: Real
    z: Real

    def __post_init__(self):
        _check_positive(x=self.x, y=self.y, z=self.z)

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def scaled(self, c) -> "Metric3":
        return Metric3(c * self.x, c * self.y, c * self.z)

    @property
    def trace(self):
        return self.x + self.y + self.z


@dataclass(frozen=True)
class SimplexPoint:
    """Point (x, y) of the open simplex x, y > 0, x + y < 1."""

    x: Real
    y: Real

    def __post_init__(self):
        _check_positive(x=self.x, y=self.y)
        if not self.x + self.y < 1:
            raise ValueError(f"need x + y < 1, got x + y = {self.x + self.y}")

    def __iter__(self):
        return iter((self.x, self.y))

    @property
    def z(self):
        return 1 - self.x - self.y


def project(g: Metric3) -> SimplexPoint:
    x, y, z = (Fraction(c) if isinstance(c, Integral) else c for c in g)
    s = x + y + z
    return SimplexPoint(x / s, y / s)


def lift(s: SimplexPoint) -> Metric3:
    return Metric3(s.x, s.y, 1 - s.x - s.y)


def submersion_metric(t) -> Metric3:
    """The Riemannian submersion metric (t, t, 1 - 2t), 0 < t < 1/2."""
    if not 0 < t < Fraction(1, 2):
        raise ValueError(f"submersion parameter must lie in (0, 1/2), got {t}")
    return Metric3(t, t, 1 - 2 * t)
