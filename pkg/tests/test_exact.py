from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from eisencont.merocont import (InconsistentFamilyError, Poly, RationalFamily, UnderdeterminedFamilyError,
                                demo_family, solve_rational_family, square_free_factorization)
from eisencont.merocont.demos import numeric_solution

S = Poly.s()
ONE = Poly.const(1)
X = sympy.Symbol("s")


def to_sympy(p: Poly):
    return sum((sympy.Rational(c.numerator, c.denominator) * X ** i for i, c in enumerate(p.c)), sympy.Integer(0))


def test_polynomial_arithmetic():
    p = (S - 2) * (S * S + 1)
    assert p.c == (-2, 1, -2, 1)
    q, r = p.divmod(S - 2)
    assert q == S * S + 1 and r.is_zero()
    assert p.derivative() == Poly((1, -4, 3))
    assert p(Fraction(1, 2)) == Fraction(-15, 8)


def test_identity_family():
    sol = solve_rational_family(RationalFamily([[ONE, Poly()], [Poly(), ONE]], [S, S * S]))
    assert sol.values[0].num == S and sol.values[1].num == S * S
    assert sol.denominator == ONE and sol.poles() == []


def test_two_by_two_exact():
    sol = solve_rational_family(demo_family("twobytwo"))
    assert sol(Fraction(1, 3)) == [Fraction(9, 8), Fraction(-3, 8)]
    assert sol.denominator == S * S - 1
    v0, v1 = sol.values
    assert v0.num == Poly.const(-1) and v0.den == S * S - 1
    assert v1.num == S and v1.den == S * S - 1
    assert sorted(p.real for p in sol.poles()) == [-1.0, 1.0]


def test_rational3_matches_numeric_mode():
    fam = demo_family("rational3")
    exact = solve_rational_family(fam)
    assert sympy.expand(to_sympy(exact.denominator) - (X - 2) * (X ** 2 + 1)) == 0
    sol = numeric_solution(fam)
    rng = np.random.default_rng(5)
    for s in rng.uniform(-3, 3, 20) + 1j * rng.uniform(-3, 3, 20):
        v_ex = np.array([complex(v) for v in exact(complex(s))])
        assert np.linalg.norm(sol.value(s) - v_ex) <= 1e-9 * np.linalg.norm(v_ex)


def test_overdetermined_consistent():
    sol = solve_rational_family(demo_family("overdetermined"))
    assert sol.denominator == S * S - 1


def test_inconsistent_family():
    fam = RationalFamily([[ONE], [ONE]], [S, S + 1])
    with pytest.raises(InconsistentFamilyError):
        solve_rational_family(fam)


def test_underdetermined_family():
    fam = RationalFamily([[ONE, S], [S, S * S]], [ONE, S])
    with pytest.raises(UnderdeterminedFamilyError):
        solve_rational_family(fam)


def test_square_free_factorization_against_sympy():
    p = (S - 1) ** 3 * (S * S + 1) ** 2 * (S + Fraction(1, 2))
    ours = {(tuple(f.c), m) for f, m in square_free_factorization(p)}
    _, factors = sympy.sqf_list(to_sympy(p))
    theirs = set()
    for f, m in factors:
        poly = sympy.Poly(f, X).monic()
        coeffs = tuple(Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs()))
        theirs.add((coeffs, m))
    assert ours == theirs


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(1, 3)), min_size=1, max_size=3))
@settings(max_examples=40)
def test_square_free_factorization_reassembles(roots):
    p = ONE
    for r, m in roots:
        p = p * (S - r) ** m
    factors = square_free_factorization(p)
    prod = ONE
    for f, m in factors:
        prod = prod * f ** m
        # square-free factors have no repeated roots
        assert sympy.degree(sympy.gcd(to_sympy(f), sympy.diff(to_sympy(f), X)), X) == 0
    assert prod == p.monic()


@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4), st.lists(st.integers(-5, 5), min_size=2, max_size=2))
@settings(max_examples=30)
def test_random_linear_families_match_sympy(entries, rhs):
    a, b, c, d = entries
    A = [[Poly((a, 1)), Poly.const(b)], [Poly.const(c), Poly((d, 0, 1))]]
    bvec = [Poly.const(rhs[0]), Poly((0, rhs[1]))]
    sol = solve_rational_family(RationalFamily(A, bvec))
    Ms = sympy.Matrix([[a + X, b], [c, d + X ** 2]])
    ref = Ms.LUsolve(sympy.Matrix([rhs[0], rhs[1] * X]))
    for mine, theirs in zip(sol.values, ref):
        assert sympy.simplify(to_sympy(mine.num) / to_sympy(mine.den) - theirs) == 0
