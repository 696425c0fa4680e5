"""Polynomial-exponential functions on V = R^d and their interpolation sections.

A PolyExpFn is a finite sum  sum_mu exp(<mu, v>) p_mu(v)  with p_mu stored as
a dict {multi-index: complex coefficient}.  The space P_V(tuple) consists of
those sums where deg p_mu < multiplicity of mu in the tuple.

Sections reconstruct a member of P_R(tuple) from its values on the nodes
Y = {k/R : k = 1..n}.  The primary route works in the Newton basis of
divided differences of lambda -> exp(lambda x) over the tuple, which stays
analytic (and well defined) through confluent exponents.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.linalg as sla

MERGE_TOL = 1e-9


class IllConditionedError(ValueError):
    pass


def _as_exponent(mu, d: int | None = None) -> tuple:
    if np.isscalar(mu):
        mu = (mu,)
    out = tuple(complex(m) for m in mu)
    if d is not None and len(out) != d:
        raise ValueError(f"exponent {mu!r} is not {d}-dimensional")
    return out


def _sort_key(mu):
    return tuple(x for m in mu for x in (m.real, m.imag))


def _close(a, b, tol=MERGE_TOL) -> bool:
    return max(abs(x - y) for x, y in zip(a, b)) <= tol


@dataclass(frozen=True)
class ExpTuple:
    """Unordered tuple of exponents (complex linear functionals on R^d)."""

    exponents: tuple
    d: int = 1

    def __post_init__(self):
        exps = tuple(_as_exponent(m, self.d) for m in self.exponents)
        object.__setattr__(self, "exponents", tuple(sorted(exps, key=_sort_key)))

    @classmethod
    def of(cls, *exponents, d: int = 1) -> "ExpTuple":
        return cls(tuple(exponents), d)

    @property
    def n(self) -> int:
        return len(self.exponents)

    def groups(self, tol: float = MERGE_TOL) -> list:
        """Distinct exponents (within ``tol``) with multiplicities."""
        out: list = []
        for mu in self.exponents:
            for g in out:
                if _close(g[0], mu, tol):
                    g[1] += 1
                    break
            else:
                out.append([mu, 1])
        return [(mu, m) for mu, m in out]

    def multiplicity(self, mu, tol: float = MERGE_TOL) -> int:
        mu = _as_exponent(mu, self.d)
        return sum(1 for e in self.exponents if _close(e, mu, tol))

    def component(self, axis: int) -> "ExpTuple":
        """Restriction of every exponent to one coordinate axis (a 1-d tuple)."""
        return ExpTuple(tuple((e[axis],) for e in self.exponents), 1)


def concat(a: ExpTuple, b: ExpTuple) -> ExpTuple:
    if a.d != b.d:
        raise ValueError("cannot concatenate tuples on different spaces")
    return ExpTuple(a.exponents + b.exponents, a.d)


def dim_space(tup: ExpTuple, d: int | None = None) -> int:
    """dim P_V(tuple) = sum over distinct mu of C(mult(mu) - 1 + d, d)."""
    d = tup.d if d is None else d
    dim = sum(comb(m - 1 + d, d) for _, m in tup.groups())
    if dim < tup.n:
        raise AssertionError("dimension below tuple length")
    distinct = all(m == 1 for _, m in tup.groups())
    if (dim == tup.n) != (distinct or d == 1):
        raise AssertionError("dimension equality criterion violated")
    return dim


# ---------------------------------------------------------------- polynomials

def _poly_clean(p: dict, tol: float = 0.0) -> dict:
    return {k: v for k, v in p.items() if abs(v) > tol}


def _poly_degree(p: dict) -> int:
    return max((sum(k) for k in p), default=-1)


def _poly_add(p: dict, q: dict, scale: complex = 1.0) -> dict:
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0) + scale * v
    return out


def _poly_shift(p: dict, v) -> dict:
    """q(u) = p(u + v)."""
    out: dict = {}
    for k, c in p.items():
        ranges = [range(e + 1) for e in k]
        for j in itertools.product(*ranges):
            coeff = c
            for e, jj, vv in zip(k, j, v):
                coeff *= comb(e, jj) * vv ** (e - jj)
            out[j] = out.get(j, 0) + coeff
    return out


def _poly_eval(p: dict, pts: np.ndarray) -> np.ndarray:
    out = np.zeros(pts.shape[0], dtype=complex)
    for k, c in p.items():
        out += c * np.prod(pts ** np.array(k), axis=1)
    return out


@dataclass(frozen=True)
class PolyExpFn:
    """sum over terms of exp(<mu, v>) * p_mu(v)."""

    d: int
    terms: tuple = field(default=())  # ((mu, {multi-index: coeff}), ...)

    def __post_init__(self):
        merged: list = []
        for mu, poly in self.terms:
            mu = _as_exponent(mu, self.d)
            poly = {tuple(int(e) for e in k): complex(v) for k, v in dict(poly).items()}
            if any(len(k) != self.d for k in poly):
                raise ValueError("monomial arity does not match d")
            for item in merged:
                if _close(item[0], mu):
                    item[1] = _poly_add(item[1], poly)
                    break
            else:
                merged.append([mu, poly])
        terms = tuple((mu, _poly_clean(p)) for mu, p in merged)
        terms = tuple((mu, p) for mu, p in terms if p)
        object.__setattr__(self, "terms", tuple(sorted(terms, key=lambda t: _sort_key(t[0]))))

    @classmethod
    def exponential(cls, mu, coeff: complex = 1.0, d: int | None = None) -> "PolyExpFn":
        mu = _as_exponent(mu)
        d = len(mu) if d is None else d
        return cls(d, ((mu, {(0,) * d: coeff}),))

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        scalar = pts.ndim == 0 or (pts.ndim == 1 and self.d > 1 and pts.shape[0] == self.d)
        pts = pts.reshape(-1, self.d) if pts.ndim <= 1 else pts
        out = np.zeros(pts.shape[0], dtype=complex)
        for mu, p in self.terms:
            out += np.exp(pts @ np.array(mu)) * _poly_eval(p, pts)
        return out[0] if scalar else out

    def __add__(self, other: "PolyExpFn") -> "PolyExpFn":
        return PolyExpFn(self.d, self.terms + other.terms)

    def __sub__(self, other: "PolyExpFn") -> "PolyExpFn":
        return self + other.scale(-1.0)

    def scale(self, a: complex) -> "PolyExpFn":
        return PolyExpFn(self.d, tuple((mu, {k: a * v for k, v in p.items()}) for mu, p in self.terms))

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for _, p in self.terms for v in p.values())

    def max_coefficient(self) -> float:
        return max((abs(v) for _, p in self.terms for v in p.values()), default=0.0)

    def degrees(self) -> dict:
        return {mu: _poly_degree(p) for mu, p in self.terms}

    def is_member(self, tup: ExpTuple, tol: float = MERGE_TOL) -> bool:
        """Symbolic membership in P_V(tuple)."""
        if tup.d != self.d:
            return False
        return all(tup.multiplicity(mu, tol) > deg for mu, deg in self.degrees().items())

    def boxtimes(self, other: "PolyExpFn") -> "PolyExpFn":
        """(f ⊠ g)(v1, v2) = f(v1) g(v2) on V1 ⊕ V2."""
        terms = []
        for mu, p in self.terms:
            for nu, q in other.terms:
                poly = {}
                for k1, a in p.items():
                    for k2, b in q.items():
                        poly[k1 + k2] = poly.get(k1 + k2, 0) + a * b
                terms.append((mu + nu, poly))
        return PolyExpFn(self.d + other.d, tuple(terms))


def diff_op(f, v, lam):
    """D_v^lam f(u) = f(u + v) - exp(<lam, v>) f(u).

    Symbolic on PolyExpFn; for a callable on sample points, returns a new
    callable evaluating the difference pointwise.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    lam = np.array(_as_exponent(lam), dtype=complex)
    factor = complex(np.exp(lam @ v))
    if isinstance(f, PolyExpFn):
        terms = []
        for mu, p in f.terms:
            shift = complex(np.exp(np.array(mu) @ v))
            poly = _poly_add({k: shift * c for k, c in _poly_shift(p, v).items()}, p, -factor)
            terms.append((mu, _poly_clean(poly, 1e-15 * max(1.0, max(abs(c) for c in p.values())))))
        return PolyExpFn(f.d, tuple(terms))

    def shifted(u):
        u = np.asarray(u, dtype=float)
        step = v if (u.ndim > 1 or v.size > 1) else v[0]
        return f(u + step) - factor * f(u)

    return shifted


def annihilate(f, tup: ExpTuple, directions) -> object:
    """Apply prod_i D_{v_i}^{lambda_i} for the tuple's exponents."""
    for v, lam in zip(directions, tup.exponents):
        f = diff_op(f, v, lam)
    return f


# ------------------------------------------------------------------- sections

def newton_basis(tup: ExpTuple, x) -> np.ndarray:
    """Rows phi_1(x)..phi_n(x): divided differences of lambda -> exp(lambda x)
    over the first j exponents.  Computed as the first row of exp(x J) with J
    bidiagonal (Opitz), hence entire in the exponents and exact at confluence.
    """
    if tup.d != 1:
        raise ValueError("newton_basis is one-dimensional")
    lam = np.array([e[0] for e in tup.exponents])
    n = lam.size
    J = np.diag(lam) + np.diag(np.ones(n - 1), 1)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([sla.expm(xx * J)[0] for xx in x])


class Section1D:
    """Linear map from values on Y = {k/R} to P_R(tuple)."""

    def __init__(self, tup: ExpTuple, R: float, cond_tol: float = 1e-13):
        if tup.d != 1:
            raise ValueError("section_1d needs a one-dimensional tuple")
        if tup.n == 0:
            raise ValueError("empty tuple")
        bound = max(abs(e[0]) for e in tup.exponents)
        if not R > bound:
            raise ValueError(f"need R > max|lambda| = {bound}")
        self.tuple = tup
        self.R = float(R)
        self.nodes = np.arange(1, tup.n + 1) / self.R
        self.vandermonde = newton_basis(tup, self.nodes)
        scale = np.prod(np.linalg.norm(self.vandermonde, axis=0))
        det = abs(np.linalg.det(self.vandermonde))
        if det < cond_tol * scale:
            raise IllConditionedError(f"Newton-Vandermonde determinant {det:.3e} below tolerance")
        self.lu = sla.lu_factor(self.vandermonde)

    @property
    def dim(self) -> int:
        return 1

    @property
    def node_shape(self) -> tuple:
        return (self.tuple.n,)

    def matrix(self) -> np.ndarray:
        """Newton coefficients = matrix @ values; entries analytic in the tuple."""
        return sla.lu_solve(self.lu, np.eye(self.tuple.n, dtype=complex))

    def basis_at(self, x) -> np.ndarray:
        """Lagrange functions L_k(x) (rows: points, columns: nodes)."""
        return newton_basis(self.tuple, x) @ self.matrix()

    def evaluate(self, values, x) -> np.ndarray:
        values = np.asarray(values, dtype=complex)
        return self.basis_at(np.asarray(x, dtype=float).ravel()) @ values

    def __call__(self, values) -> PolyExpFn:
        """Symbolic PolyExpFn in the monomial-exponential basis (merged exponents)."""
        values = np.asarray(values, dtype=complex)
        groups = self.tuple.groups()
        cols, labels = [], []
        for mu, m in groups:
            for j in range(m):
                cols.append(self.nodes ** j * np.exp(mu[0] * self.nodes))
                labels.append((mu, j))
        V = np.array(cols).T
        scale = np.prod(np.linalg.norm(V, axis=0))
        if abs(np.linalg.det(V)) < 1e-12 * scale:
            raise IllConditionedError("confluent Vandermonde in the monomial basis is ill-conditioned")
        coef = np.linalg.solve(V, values)
        terms = [(mu, {(j,): c}) for (mu, j), c in zip(labels, coef)]
        return PolyExpFn(1, tuple(terms))


def section_1d(tup: ExpTuple, R: float) -> Section1D:
    return Section1D(tup, R)


class SectionProduct:
    """Tensor-product section on Y1 x Y2 for V = V1 ⊕ V2."""

    def __init__(self, first, second):
        self.first, self.second = first, second

    @property
    def dim(self) -> int:
        return self.first.dim + self.second.dim

    @property
    def node_shape(self) -> tuple:
        return self.first.node_shape + self.second.node_shape

    def nodes(self) -> np.ndarray:
        return np.array([np.concatenate([np.atleast_1d(a), np.atleast_1d(b)])
                         for a in _node_points(self.first) for b in _node_points(self.second)])

    def basis_at(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        d1 = self.first.dim
        b1 = self.first.basis_at(pts[:, :d1] if d1 > 1 else pts[:, 0])
        b2 = self.second.basis_at(pts[:, d1:] if self.second.dim > 1 else pts[:, d1])
        return np.einsum("pa,pb->pab", b1, b2).reshape(pts.shape[0], -1)

    def evaluate(self, values, pts) -> np.ndarray:
        values = np.asarray(values, dtype=complex).ravel()
        return self.basis_at(pts) @ values

    def __call__(self, values) -> PolyExpFn:
        values = np.asarray(values, dtype=complex).reshape(
            int(np.prod(self.first.node_shape)), int(np.prod(self.second.node_shape)))
        n1, n2 = values.shape
        lag1 = [self.first(np.eye(n1)[a].reshape(self.first.node_shape)) for a in range(n1)]
        lag2 = [self.second(np.eye(n2)[b].reshape(self.second.node_shape)) for b in range(n2)]
        total = PolyExpFn(self.dim)
        for a in range(n1):
            for b in range(n2):
                if values[a, b] != 0:
                    total = total + lag1[a].boxtimes(lag2[b]).scale(values[a, b])
        return total


def _node_points(sec) -> list:
    if isinstance(sec, Section1D):
        return [np.array([y]) for y in sec.nodes]
    return list(sec.nodes())


def section_product(tup: ExpTuple, first, second) -> SectionProduct:
    """Section for a tuple on V1 ⊕ V2 built from sections of its two
    coordinate projections (``first`` covers the leading coordinates)."""
    if tup.d != first.dim + second.dim:
        raise ValueError("tuple dimension does not match the two sections")
    return SectionProduct(first, second)


def section_for(tup: ExpTuple, R: float):
    """Recursive product section for any d, one axis at a time."""
    secs = [Section1D(tup.component(a), R) for a in range(tup.d)]
    sec = secs[-1]
    for s in reversed(secs[:-1]):
        sec = SectionProduct(s, sec)
    return sec


def restrict(f, sec) -> np.ndarray:
    """Values of f on the section's node set, shaped like ``sec.node_shape``."""
    if isinstance(sec, Section1D):
        return np.asarray(f(sec.nodes.reshape(-1, 1) if getattr(f, "d", 1) == 1 else sec.nodes), dtype=complex)
    return np.asarray(f(sec.nodes()), dtype=complex).reshape(sec.node_shape)


def random_member(tup: ExpTuple, rng: np.random.Generator, scale: float = 1.0) -> PolyExpFn:
    """Random element of P_V(tuple) with the maximal allowed degrees."""
    terms = []
    for mu, m in tup.groups():
        poly = {}
        for k in itertools.product(range(m), repeat=tup.d):
            if sum(k) < m:
                poly[k] = scale * complex(rng.normal(), rng.normal()) / math.factorial(sum(k))
        terms.append((mu, poly))
    return PolyExpFn(tup.d, tuple(terms))
