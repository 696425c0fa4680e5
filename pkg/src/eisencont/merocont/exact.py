"""Exact mode: linear systems whose entries lie in Q[s], solved over Q(s).

Polynomials are tuples of Fractions (constant term first).  Elimination is
fraction-free (Bareiss) so every intermediate entry stays a polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class InconsistentFamilyError(ValueError):
    pass


class UnderdeterminedFamilyError(ValueError):
    pass


class Poly:
    """Immutable univariate polynomial over Q."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        cs = [Fraction(x) for x in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.c = tuple(cs)

    @classmethod
    def const(cls, a) -> "Poly":
        return cls((a,))

    @classmethod
    def s(cls) -> "Poly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lead(self) -> Fraction:
        return self.c[-1]

    def __eq__(self, other):
        other = _lift(other)
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other):
        other = _lift(other)
        n = max(len(self.c), len(other.c))
        a = self.c + (Fraction(0),) * (n - len(self.c))
        b = other.c + (Fraction(0),) * (n - len(other.c))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-x for x in self.c)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        q = [Fraction(0)] * max(len(rem) - len(other.c) + 1, 0)
        lead = other.lead()
        for i in range(len(q) - 1, -1, -1):
            f = rem[i + len(other.c) - 1] / lead
            q[i] = f
            if f:
                for j, b in enumerate(other.c):
                    rem[i + j] -= f * b
        return Poly(q), Poly(rem)

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self) -> "Poly":
        return self if self.is_zero() else Poly(x / self.lead() for x in self.c)

    def derivative(self) -> "Poly":
        return Poly(i * a for i, a in enumerate(self.c) if i)

    def __call__(self, s):
        if isinstance(s, (Fraction, int)):
            acc = Fraction(0)
            for a in reversed(self.c):
                acc = acc * s + a
            return acc
        return self.evaluate(s)

    def evaluate(self, s) -> complex:
        acc = 0j
        for a in reversed(self.c):
            acc = acc * s + float(a)
        return acc

    def roots(self):
        import numpy as np
        if self.degree < 1:
            return []
        return list(np.roots([float(a) for a in reversed(self.c)]))

    def __repr__(self):
        if not self.c:
            return "0"
        terms = []
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            mon = "" if i == 0 else ("s" if i == 1 else f"s^{i}")
            coef = str(a)
            if mon and a == 1:
                coef = ""
            elif mon and a == -1:
                coef = "-"
            elif mon and ("/" in coef or coef.startswith("-")):
                coef = f"({coef})*"
            elif mon:
                coef += "*"
            terms.append(coef + mon)
        return " + ".join(reversed(terms)).replace("+ -", "- ")


def _lift(x) -> Poly:
    return x if isinstance(x, Poly) else Poly.const(x)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def square_free_factorization(p: Poly) -> list:
    """Yun's algorithm: [(factor, multiplicity)] with monic square-free factors."""
    if p.degree < 1:
        return []
    p = p.monic()
    out = []
    a = poly_gcd(p, p.derivative())
    b = p.exact_div(a)
    c = p.derivative().exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        g = poly_gcd(b, d)
        if g.degree > 0:
            out.append((g, i))
        b = b.exact_div(g)
        c = d.exact_div(g)
        d = c - b.derivative()
        i += 1
    return out


@dataclass(frozen=True)
class RationalFunction:
    num: Poly
    den: Poly

    @classmethod
    def make(cls, num: Poly, den: Poly) -> "RationalFunction":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = poly_gcd(num, den) if not num.is_zero() else den.monic()
        num, den = num.exact_div(g), den.exact_div(g)
        lead = den.lead()
        return cls(Poly(x / lead for x in num.c), Poly(x / lead for x in den.c))

    def __call__(self, s):
        return self.num(s) / self.den(s)

    def __repr__(self):
        return f"({self.num}) / ({self.den})"


@dataclass
class RationalFamily:
    """Equations A(s) v = b(s) with polynomial entries (rows may exceed dim)."""

    A: list  # list of rows, each a list of Poly
    b: list

    def __post_init__(self):
        self.A = [[_lift(x) for x in row] for row in self.A]
        self.b = [_lift(x) for x in self.b]
        if len(self.A) != len(self.b):
            raise ValueError("matrix and rhs have different numbers of rows")
        widths = {len(r) for r in self.A}
        if len(widths) != 1:
            raise ValueError("ragged matrix")

    @property
    def dim(self) -> int:
        return len(self.A[0])

    def at(self, s):
        import numpy as np
        A = np.array([[p.evaluate(s) for p in row] for row in self.A])
        b = np.array([p.evaluate(s) for p in self.b])
        return A, b

    def to_analytic(self):
        from .family import AnalyticLinearFamily
        return AnalyticLinearFamily.from_matrix(lambda s: self.at(s)[0], lambda s: self.at(s)[1], self.dim,
                                                name="rational")


@dataclass
class ExactSolution:
    values: list  # RationalFunction per coordinate
    denominator: Poly  # lcm of the coordinate denominators, monic
    numerators: list  # Poly per coordinate, v_i = numerators[i] / denominator
    pole_divisor: list  # square-free factorization of the denominator

    def __call__(self, s):
        return [v(s) for v in self.values]

    def poles(self):
        def clean(r):
            r = complex(r)
            tiny = 1e-12 * max(abs(r), 1.0)
            return complex(0.0 if abs(r.real) < tiny else r.real, 0.0 if abs(r.imag) < tiny else r.imag)
        return [clean(r) for f, _ in self.pole_divisor for r in f.roots()]

    def as_dict(self) -> dict:
        fr = lambda p: [str(c) for c in p.c]
        return {"numerators": [fr(p) for p in self.numerators], "denominator": fr(self.denominator),
                "pole_divisor": [{"factor": fr(f), "multiplicity": m} for f, m in self.pole_divisor]}


def _rank_at(A, s: Fraction) -> int:
    M = [[p(s) for p in row] for row in A]
    rank, rows, cols = 0, len(M), len(M[0]) if M else 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(rows):
            if r != rank and M[r][col] != 0:
                f = M[r][col] / M[rank][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def solve_rational_family(fam: RationalFamily) -> ExactSolution:
    """Unique solution over Q(s) by fraction-free elimination."""
    n = fam.dim
    probes = [Fraction(k, 7) for k in (3, 11, -5, 23, 2, -13, 31)]
    if not any(_rank_at(fam.A, s) == n for s in probes):
        raise UnderdeterminedFamilyError("no rational sample point has a unique solution")
    M = [list(row) + [rhs] for row, rhs in zip(fam.A, fam.b)]
    m = len(M)
    prev = Poly.const(1)
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if not M[i][col].is_zero()), None)
        if piv is None:
            raise UnderdeterminedFamilyError(f"column {col} has no pivot over Q(s)")
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, m):
            for j in range(col + 1, n + 1):
                M[i][j] = (M[r][col] * M[i][j] - M[i][col] * M[r][j]).exact_div(prev)
            M[i][col] = Poly()
        prev = M[r][col]
        pivots.append(col)
        r += 1
    for i in range(r, m):
        if not M[i][n].is_zero():
            raise InconsistentFamilyError(f"equation {i} is inconsistent after elimination")
    # back substitution over Q(s): x_i = (b_i - sum_j a_ij x_j) / a_ii with x_j = p_j / q_j
    nums = [Poly()] * n
    dens = [Poly.const(1)] * n
    for i in range(n - 1, -1, -1):
        num, den = M[i][n], Poly.const(1)
        for j in range(i + 1, n):
            if M[i][j].is_zero() or nums[j].is_zero():
                continue
            # num/den - a_ij * p_j/q_j
            num = num * dens[j] - M[i][j] * nums[j] * den
            den = den * dens[j]
            g = poly_gcd(num, den) if not num.is_zero() else den.monic()
            num, den = num.exact_div(g), den.exact_div(g)
        rf = RationalFunction.make(num, den * M[i][i])
        nums[i], dens[i] = rf.num, rf.den
    values = [RationalFunction.make(p, q) for p, q in zip(nums, dens)]
    lcm = Poly.const(1)
    for v in values:
        lcm = (lcm * v.den).exact_div(poly_gcd(lcm, v.den))
    lcm = lcm.monic()
    numerators = [v.num * lcm.exact_div(v.den) for v in values]
    return ExactSolution(values, lcm, numerators, square_free_factorization(lcm))


def poly_matrix(rows: Sequence[Sequence]) -> list:
    """Convenience: nested lists of coefficient tuples/ints -> Poly entries."""
    return [[x if isinstance(x, Poly) else Poly(x) if isinstance(x, (tuple, list)) else Poly.const(x)
             for x in row] for row in rows]
