"""Sparse multivariate polynomials with exact rational coefficients.

Coefficients are :class:`fractions.Fraction` (arbitrary-precision integers
underneath), terms are keyed by exponent tuples aligned with an ordered list
of variable names.  Binary operations take the union of the variable lists
by name, so ``x + y`` built from two single-variable polynomials is a
polynomial in ``(x, y)``.

Instances are immutable; every operation returns a new polynomial.
"""
from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]
Scalar = Union[int, Fraction, float]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, numbers.Integral):
        return Fraction(int(c))
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


def _is_exact(v) -> bool:
    return isinstance(v, (Fraction, numbers.Integral)) and not isinstance(v, bool)


class RatPoly:
    """Polynomial over Q in named variables.

    >>> x, y = RatPoly.symbols("x y")
    >>> (x + y) * (x - y)
    RatPoly('x^2 - y^2')
    """

    __slots__ = ("_vars", "_terms", "_hash")

    def __init__(self, variables: Iterable[str] = (), terms: Mapping[tuple, Number] | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise ValueError(f"exponent vector {exps} does not match variables {variables}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = _as_fraction(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self._vars = variables
        self._terms = clean
        self._hash = None

    # construction helpers

    @classmethod
    def const(cls, c: Number, variables: Iterable[str] = ()) -> "RatPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str) -> "RatPoly":
        return cls((name,), {(1,): 1})

    @classmethod
    def symbols(cls, names: str) -> tuple["RatPoly", ...]:
        return tuple(cls.var(n) for n in names.replace(",", " ").split())

    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    @property
    def terms(self) -> dict[tuple, Fraction]:
        return dict(self._terms)

    # alignment

    def _aligned(self, variables: tuple[str, ...]) -> dict[tuple, Fraction]:
        if variables == self._vars:
            return self._terms
        idx = [variables.index(v) for v in self._vars]
        out = {}
        for exps, c in self._terms.items():
            e = [0] * len(variables)
            for i, k in enumerate(idx):
                e[k] = exps[i]
            out[tuple(e)] = c
        return out

    def with_variables(self, variables: Iterable[str]) -> "RatPoly":
        """Re-express over ``variables``, which must contain every variable actually used."""
        variables = tuple(variables)
        missing = [v for v in self.used_variables() if v not in variables]
        if missing:
            raise ValueError(f"variables {missing} occur in the polynomial")
        pos = [variables.index(v) if v in variables else None for v in self._vars]
        out = {}
        for exps, c in self._terms.items():
            e = [0] * len(variables)
            for k, n in zip(pos, exps):
                if n:
                    e[k] = n
            out[tuple(e)] = c
        return RatPoly(variables, out)

    def used_variables(self) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self._vars) if any(e[i] for e in self._terms))

    @staticmethod
    def _union(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
        return a + tuple(v for v in b if v not in a)

    def _coerce(self, other) -> "RatPoly":
        if isinstance(other, RatPoly):
            return other
        if _is_exact(other):
            return RatPoly.const(other)
        return NotImplemented

    # ring operations

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        vs = self._union(self._vars, other._vars)
        out = dict(self._aligned(vs))
        for e, c in other._aligned(vs).items():
            out[e] = out.get(e, Fraction(0)) + c
        return RatPoly(vs, out)

    __radd__ = __add__

    def __neg__(self):
        return RatPoly(self._vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        vs = self._union(self._vars, other._vars)
        a, b = self._aligned(vs), other._aligned(vs)
        out: dict[tuple, Fraction] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(i + j for i, j in zip(ea, eb))
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return RatPoly(vs, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # division by exact scalars only
        if not _is_exact(other):
            return NotImplemented
        d = _as_fraction(other)
        if not d:
            raise ZeroDivisionError("polynomial division by zero")
        return RatPoly(self._vars, {e: c / d for e, c in self._terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, numbers.Integral) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = RatPoly.const(1, self._vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return not self.is_zero()

    def _canonical(self):
        vs = tuple(sorted(self.used_variables()))
        return vs, frozenset(self.with_variables(vs)._terms.items())

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._canonical() == other._canonical()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._canonical())
        return self._hash

    # calculus and composition

    def partial_derivative(self, var: str) -> "RatPoly":
        if var not in self._vars:
            raise KeyError(f"{var!r} is not a variable of this polynomial")
        k = self._vars.index(var)
        out = {}
        for e, c in self._terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                out[tuple(ne)] = c * e[k]
        return RatPoly(self._vars, out)

    diff = partial_derivative

    def substitute(self, bindings: Mapping[str, "RatPoly | Number"]) -> "RatPoly":
        """Compose: replace each bound variable by a polynomial (or exact number)."""
        unknown = [v for v in bindings if v not in self._vars]
        if unknown:
            raise KeyError(f"cannot bind {unknown}: not variables of this polynomial")
        subs = {v: (b if isinstance(b, RatPoly) else RatPoly.const(b)) for v, b in bindings.items()}
        free = tuple(v for v in self._vars if v not in subs)
        vs = free
        for b in subs.values():
            vs = self._union(vs, b._vars)
        powers: dict[tuple[str, int], RatPoly] = {}

        def pw(v, n):
            key = (v, n)
            if key not in powers:
                powers[key] = subs[v] ** n
            return powers[key]

        result = RatPoly((), {}) if not vs else RatPoly(vs, {})
        for e, c in self._terms.items():
            mono_exps = [0] * len(vs)
            term = RatPoly.const(c, vs)
            for v, n in zip(self._vars, e):
                if v in subs:
                    if n:
                        term = term * pw(v, n)
                else:
                    mono_exps[vs.index(v)] = n
            term = term * RatPoly(vs, {tuple(mono_exps): 1})
            result = result + term
        return result.with_variables(vs) if vs else result

    def evaluate(self, point: Mapping[str, Scalar]):
        """Evaluate at a full binding; exact when every bound value is exact.

        Values may also be floats or numpy arrays, in which case ordinary
        floating evaluation is used.
        """
        missing = [v for v in self.used_variables() if v not in point]
        if missing:
            raise KeyError(f"unbound variables {missing}")
        vals = [point.get(v, 0) for v in self._vars]
        exact = all(_is_exact(point[v]) for v in self.used_variables())
        if exact:
            vals = [_as_fraction(v) for v in vals]
            total = Fraction(0)
            for e, c in self._terms.items():
                term = c
                for v, n in zip(vals, e):
                    if n:
                        term *= v ** n
                total += term
            return total
        total = 0.0
        for e, c in self.sorted_terms():
            term = float(c)
            for v, n in zip(vals, e):
                if n:
                    term = term * v ** n
            total = total + term
        return total

    __call__ = evaluate

    def compile(self, order: Iterable[str]):
        """Return a fast float function of positional arguments in ``order``."""
        order = tuple(order)
        missing = [v for v in self.used_variables() if v not in order]
        if missing:
            raise ValueError(f"order misses variables {missing}")
        p = self.with_variables(order)
        terms = [(float(c), e) for e, c in p.sorted_terms()]

        def f(*args):
            total = 0.0
            for c, e in terms:
                term = c
                for a, n in zip(args, e):
                    if n:
                        term = term * a ** n
                total = total + term
            return total

        return f

    # inspection

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def degree(self, var: str) -> int:
        k = self._vars.index(var)
        return max((e[k] for e in self._terms), default=-1)

    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        """Terms in graded-lexicographic order, highest first."""
        return sorted(self._terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def coefficients(self, var: str) -> list[Fraction]:
        """Dense coefficient list (constant first) of a univariate polynomial."""
        used = self.used_variables()
        if used and used != (var,):
            raise ValueError(f"polynomial is not univariate in {var!r}: uses {used}")
        if var not in self._vars:
            return [self._terms.get((), Fraction(0))] if self._terms else []
        k = self._vars.index(var)
        deg = self.degree(var)
        out = [Fraction(0)] * (deg + 1)
        for e, c in self._terms.items():
            out[e[k]] = c
        return out

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if n == 1 else f"{v}^{n}" for v, n in zip(self._vars, e) if n)
            mag = abs(c)
            if mono:
                s = mono if mag == 1 else f"{mag}*{mono}"
            else:
                s = str(mag)
            parts.append(("-" if c < 0 else "+", s))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f" {sgn} {s}" for sgn, s in parts[1:])

    def __repr__(self):
        return f"RatPoly('{self}')"


def bisect_root(p: RatPoly, lo: Number, hi: Number, tol: Number = Fraction(1, 10**15),
                max_denominator: int = 10**6) -> tuple[Fraction, Fraction]:
    """Bracket a root of a univariate polynomial by exact bisection.

    Requires a strict sign change on ``[lo, hi]``.  Returns ``(a, b)`` with
    ``b - a <= tol``; when the root is rational with a small denominator it is
    recovered exactly and returned as ``(r, r)``.
    """
    (var,) = p.used_variables() or ("t",)
    lo, hi, tol = _as_fraction(lo), _as_fraction(hi), _as_fraction(tol)
    f = lambda s: p.evaluate({var: s}) if p.used_variables() else p.evaluate({})
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        guess = mid.limit_denominator(max_denominator)
        if lo <= guess <= hi and f(guess) == 0:
            return guess, guess
    return lo, hi
