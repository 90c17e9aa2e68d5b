from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from flagricci.flow import family_field, wallach_field
from flagricci.polynomial import RatPoly, bisect_root

x, y, z, t = RatPoly.symbols("x y z t")

VARS = ("x", "y", "z")
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
monomials = st.tuples(*[st.integers(0, 3)] * 3)


@st.composite
def polys(draw, max_terms=5):
    terms = draw(st.dictionaries(monomials, coeffs, max_size=max_terms))
    return RatPoly(VARS, terms)


points = st.tuples(*[st.fractions(min_value=-3, max_value=3, max_denominator=9)] * 3)


def to_sympy(p: RatPoly):
    syms = sympy.symbols(p.variables)
    if not isinstance(syms, tuple):
        syms = (syms,)
    expr = sympy.Integer(0)
    for e, c in p.terms.items():
        mono = sympy.Rational(c.numerator, c.denominator)
        for s, n in zip(syms, e):
            mono *= s ** n
        expr += mono
    return sympy.expand(expr)


# -- examples -------------------------------------------------------------------

def test_additive_inverse_is_zero():
    assert (x + (-x)).is_zero()
    assert (x - x) == RatPoly()


def test_like_terms_merge():
    p = 2 * x ** 2 * y + 3 * x ** 2 * y
    assert p == 5 * x ** 2 * y
    assert len(p.terms) == 1


def test_difference_of_squares():
    assert (x + y) * (x - y) == x ** 2 - y ** 2


def test_zero_absorbs():
    p = 3 * x ** 2 - y + 7
    assert (RatPoly() * p).is_zero()
    assert (0 * p).is_zero()


def test_zero_coefficients_are_not_stored():
    p = RatPoly(("x",), {(1,): 0, (0,): 2})
    assert p.terms == {(0,): Fraction(2)}


def test_wallach_u_plus_v_vanishes_at_A():
    F = wallach_field()
    a = Fraction(1, 4)
    assert (F.u + F.v).evaluate({"x": a, "y": a}) == 0


def test_factored_v_expands_to_wallach_v():
    cofactor = 6 * x ** 2 + 6 * x * (y - 1) - y + 1
    assert -2 * y * (2 * y - 1) * cofactor == wallach_field().v


def test_diagonal_substitution_of_wallach_u():
    u_diag = wallach_field().u.substitute({"x": t, "y": t})
    assert u_diag == 2 * t * (-24 * t ** 3 + 26 * t ** 2 - 9 * t + 1)


def test_line_x_half_kills_wallach_u():
    res = wallach_field().u.substitute({"x": Fraction(1, 2)})
    assert res.is_zero()


def test_family_diagonal_substitution():
    m, p = RatPoly.symbols("m p")
    u_diag = family_field().u.substitute({"x": t, "y": t})
    expected = -t * (1 - 6 * t + 8 * t ** 2) * (m * (-1 + 2 * t) + p * (-1 + 4 * t))
    assert u_diag == expected
    assert set(u_diag.used_variables()) == {"t", "m", "p"}


def test_power_rule():
    assert (x ** 2 * y).diff("x") == 2 * x * y


def test_derivative_of_constant():
    assert RatPoly.const(7, ("x", "y")).diff("y").is_zero()


def test_wallach_jacobian_at_B_is_repelling():
    F = wallach_field()
    b = Fraction(1, 3)
    pt = {"x": b, "y": b}
    J = np.array([[float(F.u.diff(a).evaluate(pt)) for a in "xy"],
                  [float(F.v.diff(a).evaluate(pt)) for a in "xy"]])
    assert np.all(np.linalg.eigvals(J).real > 0)


def test_u_vanishes_at_C():
    assert wallach_field().u.evaluate({"x": Fraction(1, 4), "y": Fraction(1, 2)}) == 0


def test_u_at_one_fifth():
    val = wallach_field().u.evaluate({"x": Fraction(1, 5), "y": Fraction(1, 5)})
    assert val == Fraction(12, 625)
    assert float(val) == 0.0192


def test_all_zero_bindings_give_constant_term():
    p = 3 * x ** 2 * y - 4 * z + Fraction(5, 7)
    assert p.evaluate({"x": 0, "y": 0, "z": 0}) == Fraction(5, 7)


def test_float_evaluation_and_arrays():
    p = x ** 2 - 3 * y
    assert p.evaluate({"x": 0.5, "y": 1}) == pytest.approx(-2.75)
    arr = p.evaluate({"x": np.array([1.0, 2.0]), "y": np.array([0.0, 1.0])})
    np.testing.assert_allclose(arr, [1.0, 1.0])


def test_compile_matches_evaluate():
    F = wallach_field()
    f = F.u.compile(("x", "y"))
    assert f(0.2, 0.3) == pytest.approx(float(F.u.evaluate({"x": Fraction(1, 5), "y": Fraction(3, 10)})), abs=1e-16)


def test_unbound_variable_raises():
    with pytest.raises(KeyError):
        (x + y).evaluate({"x": 1})


def test_substitute_rejects_foreign_variable():
    with pytest.raises(KeyError):
        x.substitute({"q": 1})


def test_inexact_coefficient_rejected():
    with pytest.raises(TypeError):
        RatPoly(("x",), {(1,): 0.5})


def test_big_integers_do_not_overflow():
    p = (x + 1) ** 60
    assert p.evaluate({"x": 1}) == 2 ** 60
    assert p.terms[(30,)] == 118264581564861424


def test_string_form_uses_exact_fractions():
    assert str(Fraction(1, 3) * x ** 2 - y) == "1/3*x^2 - y"
    assert str(RatPoly()) == "0"


def test_variable_union_by_name():
    p = x + RatPoly.var("w")
    assert set(p.variables) == {"x", "w"}
    assert p == RatPoly.var("w") + x


def test_division_by_scalar():
    assert (4 * x) / 8 == Fraction(1, 2) * x
    with pytest.raises(ZeroDivisionError):
        x / 0


def test_degrees_and_ordering():
    p = x ** 3 * y + y ** 2 - 1
    assert p.total_degree() == 4
    assert p.degree("y") == 2
    assert p.sorted_terms()[0][0] == (3, 1)


def test_bisect_root_recovers_rationals():
    assert bisect_root(8 * t - 1, 0, 1) == (Fraction(1, 8), Fraction(1, 8))
    assert bisect_root((10 * t - 1) * (t + 3), 0, Fraction(1, 2)) == (Fraction(1, 10), Fraction(1, 10))


def test_bisect_root_brackets_irrationals():
    lo, hi = bisect_root(t ** 2 - 2, 1, 2)
    assert hi - lo <= Fraction(1, 10 ** 15)
    assert lo ** 2 < 2 < hi ** 2


def test_bisect_root_needs_sign_change():
    with pytest.raises(ValueError):
        bisect_root(t ** 2 + 1, -1, 1)


def test_sympy_cross_check_of_family_field():
    m, p = sympy.symbols("m p")
    xs, ys = sympy.symbols("x y")
    u_ref = -xs * (2 * xs - 1) * (m * (4 * ys - 1) * (xs + ys - 1)
                                  + p * (xs * (8 * ys - 1) + 8 * ys ** 2 - 7 * ys + 1))
    assert sympy.expand(to_sympy(family_field().u) - u_ref) == 0


# -- properties -----------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(polys(), points)
def test_evaluation_is_a_ring_homomorphism(a, pt):
    b = a * a - 3 * a
    env = dict(zip(VARS, pt))
    va = a.evaluate(env)
    assert b.evaluate(env) == va * va - 3 * va


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=4), polys(max_terms=3), polys(max_terms=3), points)
def test_substitute_then_evaluate(p, f, g, pt):
    env = dict(zip(VARS, pt))
    composed = p.substitute({"x": f, "y": g})
    inner = {"x": f.evaluate(env), "y": g.evaluate(env), "z": env["z"]}
    assert composed.evaluate(env) == p.evaluate(inner)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), st.sampled_from(VARS))
def test_product_rule(a, b, v):
    assert (a * b).diff(v) == a.diff(v) * b + a * b.diff(v)


@settings(max_examples=60, deadline=None)
@given(polys())
def test_zero_iff_empty_term_map(a):
    assert (a - a).is_zero()
    assert (a - a).terms == {}
    assert a.is_zero() == (len(a.terms) == 0)


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_arithmetic_agrees_with_sympy(a, b):
    assert sympy.expand(to_sympy(a * b - a) - (to_sympy(a) * to_sympy(b) - to_sympy(a))) == 0
