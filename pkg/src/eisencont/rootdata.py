"""Type-A root data: compositions as standard parabolics, simple roots and
their projections, Bruhat double-coset representatives, the sets
Omega(P;Q) and Omega(P,Q), and a randomized chamber-separation validator.

Coordinates: a_0^* is the sum-zero subspace of Q^n with the standard
pairing; roots e_i - e_j are their own coroots.  Indices are 0-based
internally; WeylElem.perm[i] is the image of i.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np


class InvalidRepresentativeError(ValueError):
    pass


class SearchFailureError(RuntimeError):
    pass


@dataclass(frozen=True)
class Composition:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts or any(p <= 0 for p in parts):
            raise ValueError(f"invalid composition {self.parts!r}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Composition":
        try:
            parts = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
        except ValueError as exc:
            raise ValueError(f"invalid composition {text!r}") from exc
        comp = cls(parts)
        if n is not None and comp.n != n:
            raise ValueError(f"composition {text!r} does not sum to n={n}")
        return comp

    @property
    def n(self) -> int:
        return sum(self.parts)

    @cached_property
    def blocks(self) -> tuple:
        out, start = [], 0
        for p in self.parts:
            out.append(tuple(range(start, start + p)))
            start += p
        return tuple(out)

    @cached_property
    def block_of(self) -> tuple:
        return tuple(b for b, blk in enumerate(self.blocks) for _ in blk)

    def refines(self, other: "Composition") -> bool:
        """True when every block of self lies inside a block of other."""
        if self.n != other.n:
            return False
        return all(len({other.block_of[i] for i in blk}) == 1 for blk in self.blocks)

    def __str__(self):
        return ",".join(map(str, self.parts))


def compositions(n: int):
    """All compositions of n (2^(n-1) of them)."""
    for cuts in itertools.product((0, 1), repeat=n - 1):
        parts, run = [], 1
        for c in cuts:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield Composition(tuple(parts))


@dataclass(frozen=True)
class RootVector:
    coords: tuple

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coords)
        if sum(coords) != 0:
            raise ValueError("root vectors must have coordinate sum 0")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def root(cls, n: int, i: int, j: int) -> "RootVector":
        v = [0] * n
        v[i] += 1
        v[j] -= 1
        return cls(tuple(v))

    def pair(self, other: "RootVector") -> Fraction:
        return sum((a * b for a, b in zip(self.coords, other.coords)), Fraction(0))

    def simple_expansion(self) -> tuple:
        """Coefficients over e_i - e_{i+1}: partial sums of the coordinates."""
        out, acc = [], Fraction(0)
        for c in self.coords[:-1]:
            acc += c
            out.append(acc)
        return tuple(out)

    def is_positive_root(self) -> bool:
        nz = [c for c in self.coords if c != 0]
        return bool(nz) and nz[0] > 0

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class WeylElem:
    perm: tuple

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"not a permutation of 0..n-1: {self.perm!r}")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, n: int) -> "WeylElem":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.perm)

    def __mul__(self, other: "WeylElem") -> "WeylElem":
        return WeylElem(tuple(self.perm[other.perm[i]] for i in range(self.n)))

    def inverse(self) -> "WeylElem":
        inv = [0] * self.n
        for i, p in enumerate(self.perm):
            inv[p] = i
        return WeylElem(tuple(inv))

    def length(self) -> int:
        p = self.perm
        return sum(1 for i in range(self.n) for j in range(i + 1, self.n) if p[i] > p[j])

    def act(self, v: RootVector) -> RootVector:
        out = [Fraction(0)] * self.n
        for i, c in enumerate(v.coords):
            out[self.perm[i]] = c
        return RootVector(tuple(out))

    def maps_positive(self, i: int, j: int) -> bool:
        """Is w(e_i - e_j) a positive root?"""
        return self.perm[i] < self.perm[j]

    def one_based(self) -> tuple:
        return tuple(p + 1 for p in self.perm)

    def __str__(self):
        return "[" + " ".join(str(p) for p in self.one_based()) + "]"


def _check_same_n(P: Composition, Q: Composition):
    if P.n != Q.n:
        raise ValueError(f"compositions of different n: {P} vs {Q}")


def simple_roots(P: Composition) -> list:
    """Simple roots of the Levi of P: e_i - e_{i+1} inside a block."""
    return [RootVector.root(P.n, i, i + 1) for i in range(P.n - 1) if P.block_of[i] == P.block_of[i + 1]]


def project(P: Composition, v: RootVector) -> RootVector:
    """Orthogonal projection onto the block-constant subspace a_P^*."""
    out = []
    for blk in P.blocks:
        mean = sum((v.coords[i] for i in blk), Fraction(0)) / len(blk)
        out.extend([mean] * len(blk))
    return RootVector(tuple(out))


def delta_P(P: Composition) -> list:
    """Delta_P with Delta_0-expansions: list of (alpha, coefficients).

    Each alpha is the projection of the simple root at a block boundary;
    its coroot is identified with alpha itself.  Non-negativity of the
    expansion and positivity of <alpha, alpha-check> are asserted.
    """
    if len(P.parts) == 1:
        raise ValueError("Delta_P is empty for the maximal parabolic (n)")
    out = []
    for b in range(len(P.parts) - 1):
        i = P.blocks[b][-1]
        alpha = project(P, RootVector.root(P.n, i, i + 1))
        coeffs = alpha.simple_expansion()
        if any(c < 0 for c in coeffs):
            raise AssertionError(f"negative simple-root coefficient in {alpha}")
        if alpha.pair(coroot(P, b)) <= 0:
            raise AssertionError(f"<alpha, alpha^vee> <= 0 for {alpha}")
        out.append((alpha, coeffs))
    return out


def coroot(P: Composition, b: int) -> RootVector:
    """Coroot attached to the b-th boundary of P (projection of the simple coroot)."""
    i = P.blocks[b][-1]
    return project(P, RootVector.root(P.n, i, i + 1))


def _levi_positive(w: WeylElem, P: Composition) -> bool:
    return all(w.maps_positive(i, i + 1) for i in range(P.n - 1) if P.block_of[i] == P.block_of[i + 1])


def double_coset_reps(P: Composition, Q: Composition) -> list:
    """Minimal representatives of W_Q \\ S_n / W_P."""
    _check_same_n(P, Q)
    reps = []
    for perm in itertools.permutations(range(P.n)):
        w = WeylElem(perm)
        if _levi_positive(w, P) and _levi_positive(w.inverse(), Q):
            reps.append(w)
    return reps


def _intervals(sets, n: int, what: str) -> Composition:
    pieces = sorted((sorted(s) for s in sets if s), key=lambda s: s[0])
    for s in pieces:
        if s != list(range(s[0], s[0] + len(s))):
            raise InvalidRepresentativeError(f"{what} intersection {s} is not an interval")
    return Composition(tuple(len(s) for s in pieces))


def subordinate_parabolics(w: WeylElem, P: Composition, Q: Composition):
    """(P_w, Q_w): standard parabolics with Levis M_P ∩ w^-1 M_Q w and M_Q ∩ w M_P w^-1."""
    _check_same_n(P, Q)
    if not (_levi_positive(w, P) and _levi_positive(w.inverse(), Q)):
        raise InvalidRepresentativeError(f"{w} is not a minimal (Q,P) double-coset representative")
    winv = w.inverse()
    Pw = _intervals([set(b) & {winv.perm[j] for j in c} for b in P.blocks for c in Q.blocks], P.n, "P-side")
    Qw = _intervals([set(c) & {w.perm[i] for i in b} for c in Q.blocks for b in P.blocks], P.n, "Q-side")
    # w carries blocks of P_w onto blocks of Q_w
    q_blocks = {frozenset(b) for b in Qw.blocks}
    for blk in Pw.blocks:
        if frozenset(w.perm[i] for i in blk) not in q_blocks:
            raise InvalidRepresentativeError(f"{w} does not carry P_w={Pw} onto Q_w={Qw}")
    return Pw, Qw


def omega_semi(P: Composition, Q: Composition) -> list:
    """Omega(P;Q): representatives w with Q_w = Q (w M_P w^-1 contains M_Q)."""
    return [w for w in double_coset_reps(P, Q) if subordinate_parabolics(w, P, Q)[1] == Q]


def omega(P: Composition, Q: Composition) -> list:
    """Omega(P,Q) = Omega(P;Q) ∩ Omega(Q;P)^-1: w with w M_P w^-1 = M_Q."""
    back = {w.inverse() for w in omega_semi(Q, P)}
    return [w for w in omega_semi(P, Q) if w in back]


def _lambda_from_pairings(P: Composition, targets: np.ndarray) -> np.ndarray:
    # solve <lambda, coroot_b> = targets[b] for lambda in a_P^* (block-constant, sum zero)
    nb = len(P.parts)
    sizes = np.array(P.parts, dtype=float)
    # unknowns: block values v_b; equations v_b - v_{b+1} = t_b and sum sizes*v = 0
    A = np.zeros((nb, nb))
    rhs = np.zeros(nb)
    for b in range(nb - 1):
        A[b, b], A[b, b + 1] = 1.0, -1.0
        rhs[b] = targets[b]
    A[-1] = sizes
    vals = np.linalg.solve(A, rhs)
    return np.repeat(vals, sizes.astype(int))


def _pairings(Q: Composition, lam: np.ndarray) -> np.ndarray:
    # <lam, coroot_b> for block-constant lam is the jump across boundary b
    idx = [blk[-1] for blk in Q.blocks[:-1]]
    return np.array([lam[i] - lam[i + 1] for i in idx])


def chamber_separation(c: float, P: Composition, Q: Composition, trials: int = 1000,
                       seed: int = 0, cap: float = 1e6) -> float:
    """Smallest c' = c * 2^k such that ``trials`` random lambda deep in the
    positive P-chamber (pairings > c') are all pushed by every non-identity
    w in Omega(P;Q) to some Delta_Q pairing below -c.
    """
    _check_same_n(P, Q)
    if len(P.parts) == 1:
        raise ValueError("chamber_separation needs P != (n)")
    if c <= 0:
        raise ValueError("c must be positive")
    ws = [w for w in omega_semi(P, Q) if w != WeylElem.identity(P.n)]
    if not ws:
        return float(c)
    rng = np.random.default_rng(seed)
    nb = len(P.parts) - 1
    base = rng.exponential(1.0, size=(trials, nb)) * (rng.random((trials, nb)) < 2 / 3)
    base[: min(trials, nb)] = 0.0  # include the chamber corner
    cprime = float(c)
    while cprime <= cap:
        ok = True
        for row in base:
            lam = _lambda_from_pairings(P, cprime * (1.0 + 1e-9 + row))
            for w in ws:
                wl = np.empty_like(lam)
                wl[list(w.perm)] = lam
                if not np.any(_pairings(Q, wl) < -c):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return cprime
        cprime *= 2.0
    raise SearchFailureError(f"no c' <= {cap} validates the separation for c={c}, P={P}, Q={Q}")
