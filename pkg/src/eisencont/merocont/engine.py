"""Fredholm witnesses and the Cramer-rule continuation of unique solutions."""
from __future__ import annotations

import json
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .family import AnalyticLinearFamily, FiniteTypeWitness


class NotFredholmError(RuntimeError):
    pass


class NoUniqueSolutionError(RuntimeError):
    pass


class WitnessViolationError(RuntimeError):
    pass


class PoleProximityError(RuntimeError):
    def __init__(self, s, d, floor):
        self.s, self.d, self.floor = s, d, floor
        super().__init__(f"|d(s)| = {abs(d):.3e} below floor {floor:.1e} at s={s}")


# ----------------------------------------------------------------- witnesses

def _as_matrix_family(mu):
    if isinstance(mu, AnalyticLinearFamily):
        return mu.matrix, mu.rhs
    return mu, None


def _randomized_range_svd(K: np.ndarray, rank_tol: float, seed: int = 0, start: int = 64, power: int = 2):
    """Leading singular triplets of K until the smallest kept one drops below
    rank_tol * sigma_max (Halko-Martinsson-Tropp range finder)."""
    rng = np.random.default_rng(seed)
    n = K.shape[1]
    width = min(start, n)
    while True:
        omega = rng.standard_normal((n, width)) + 1j * rng.standard_normal((n, width))
        Y = K @ omega
        for _ in range(power):
            Y, _ = np.linalg.qr(Y)
            Y = K @ (K.conj().T @ Y)
        Q, _ = np.linalg.qr(Y)
        U_small, sv, Vh = np.linalg.svd(Q.conj().T @ K, full_matrices=False)
        U = Q @ U_small
        if sv.size and (sv[-1] <= rank_tol * max(sv[0], 1.0) or width >= min(K.shape)):
            return U, sv, Vh
        width = min(2 * width, min(K.shape))


def _cond_estimate(X: np.ndarray) -> float:
    """1-norm condition number estimate from an LU factorization (LAPACK gecon)."""
    if X.shape[0] <= 400:
        return float(np.linalg.cond(X))
    lu, piv = sla.lu_factor(X, check_finite=False)
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, np.linalg.norm(X, 1), norm="1")
    return float("inf") if rcond == 0 else float(1.0 / rcond)


def fredholm_witness(mu, s0, rank_tol: float = 1e-10, rhs: Optional[Callable] = None,
                     left: Optional[np.ndarray] = None, left_applied: Optional[Callable] = None,
                     cond_cap: float = 1e8, rank_cap: Optional[int] = None,
                     svd: str = "full", seed: int = 0) -> FiniteTypeWitness:
    """Finite-type witness from a Fredholm splitting D M(s0) = I - K0.

    D is ``left`` (default: identity for square M, else the pseudo-inverse
    of M(s0)); ``left_applied(s)``, if
    given, must return D @ M(s) directly.  K0 is truncated to its singular
    values above rank_tol * max(sigma_max, 1), giving F of rank r, and
    X_s = D M(s) + F.  Every solution of M(s) v = c(s) then lies in the image
    of X_s^{-1} [Im F, D c(s)].
    """
    matrix, fam_rhs = _as_matrix_family(mu)
    rhs = rhs if rhs is not None else fam_rhs
    s0 = complex(s0)
    if left_applied is None:
        if left is None:
            M0 = np.asarray(matrix(s0), dtype=complex)
            left = np.eye(M0.shape[0]) if M0.shape[0] == M0.shape[1] else np.linalg.pinv(M0)
        D = np.asarray(left)
        left_applied = lambda s: D @ np.asarray(matrix(s), dtype=complex)
    DM0 = np.asarray(left_applied(s0), dtype=complex)
    n = DM0.shape[1]
    if DM0.shape[0] != n:
        raise NotFredholmError(f"regularized operator is {DM0.shape}, not square")
    K0 = np.eye(n) - DM0
    if svd == "randomized":
        U, sv, Vh = _randomized_range_svd(K0, rank_tol, seed)
    else:
        U, sv, Vh = np.linalg.svd(K0)
    cut = rank_tol * max(sv[0] if sv.size else 0.0, 1.0)
    r = int(np.sum(sv > cut))
    if rank_cap is not None and r > rank_cap:
        raise NotFredholmError(f"numerical rank {r} of the compact part exceeds cap {rank_cap}")
    F = (U[:, :r] * sv[:r]) @ Vh[:r]
    basis = U[:, :r]
    X0 = DM0 + F
    cond = _cond_estimate(X0)
    if not np.isfinite(cond) or cond > cond_cap:
        raise NotFredholmError(f"cond(X) = {cond:.3e} exceeds cap {cond_cap:.1e}")

    def columns(s):
        cols = basis
        if rhs is not None and left is not None:
            cols = np.hstack([basis, (D @ np.asarray(rhs(s), dtype=complex))[:, None]])
        return cols

    extra = 1 if (rhs is not None and left is not None) else 0

    def lam(s):
        X = np.asarray(left_applied(s), dtype=complex) + F
        return np.linalg.solve(X, columns(s))

    return FiniteTypeWitness(n, r + extra, lam, s0,
                             info={"rank_F": r, "cond_X0": float(cond), "sigma": sv[: r + 1].tolist()})


def fredholm_split_witness(family, split, witness2, s0, rank_tol: float = 1e-10,
                           left: Optional[np.ndarray] = None, left_applied: Optional[Callable] = None,
                           cond_cap: float = 1e8, rank_cap: Optional[int] = None,
                           svd: str = "full", seed: int = 0) -> FiniteTypeWitness:
    """Witness for a system split as E = B1 ⊕ B2 with B2-components known to
    lie in the image of an analytic finite-type map nu_s.

    ``split = (U1, U2)``: columns spanning B1 and B2 in E-coordinates (U2 may
    be None).  ``witness2`` is nu_s (callable or FiniteTypeWitness) in
    U2-coordinates.  The reduced system on B1 ⊕ L2 has matrix
    M(s) [U1, U2 nu_s]; ``left``/``left_applied`` regularize that reduced
    matrix exactly as in fredholm_witness.
    """
    U1, U2 = split
    U1 = np.asarray(U1)
    if U2 is None or np.asarray(U2).shape[1] == 0:
        embed = lambda s: U1
    else:
        U2 = np.asarray(U2)
        embed = lambda s: np.hstack([U1, U2 @ np.asarray(witness2(s))])
    if isinstance(family, AnalyticLinearFamily):
        reduced = lambda s: family.apply(s, embed(s))
        rhs = family.rhs
    else:
        reduced = lambda s: np.asarray(family(s)) @ embed(s)
        rhs = None
    inner = fredholm_witness(reduced, s0, rank_tol, rhs=rhs, left=left, left_applied=left_applied,
                             cond_cap=cond_cap, rank_cap=rank_cap, svd=svd, seed=seed)
    dim_E = U1.shape[0]

    def lam(s):
        return embed(s) @ inner(s)

    return FiniteTypeWitness(dim_E, inner.dim_L, lam, complex(s0), info=dict(inner.info, split=True))


# ----------------------------------------------------------------- continuation

def _adjugate_times(R: np.ndarray, c: np.ndarray) -> np.ndarray:
    """adj(R) @ c by cofactor expansion (small k)."""
    k = R.shape[0]
    out = np.zeros(k, dtype=complex)
    for j in range(k):
        for i in range(k):
            minor = np.delete(np.delete(R, i, axis=0), j, axis=1)
            cof = (-1) ** (i + j) * (np.linalg.det(minor) if k > 1 else 1.0)
            out[j] += cof * c[i]
    return out


def _numerical_rank(A: np.ndarray, rank_tol: float):
    sv = np.linalg.svd(A, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0, np.inf
    r = int(np.sum(sv > rank_tol * sv[0]))
    return r, sv[0] / sv[r - 1]


@dataclass
class MeromorphicSolution:
    """v(s) = N(s) / d(s) with N, d analytic near the construction points."""

    family: AnalyticLinearFamily
    witness: FiniteTypeWitness
    L0: np.ndarray
    rows: np.ndarray
    row_weights: np.ndarray
    nu: np.ndarray
    s1: complex
    s2: complex
    k: int
    log_ref: complex = 0j
    denom_floor: float = 1e-10
    tol: float = 1e-8
    info: dict = field(default_factory=dict)
    _cache: OrderedDict = field(default_factory=OrderedDict, repr=False)

    def _evaluate(self, s):
        s = complex(s)
        if s in self._cache:
            return self._cache[s]
        Lam = self.witness(s)[:, self.L0]
        MLam = self.family.apply(s, Lam)
        c = self.family.rhs(s)
        R = MLam[self.rows] * self.row_weights[:, None]
        cs = c[self.rows] * self.row_weights
        sign, logdet = np.linalg.slogdet(R)
        d = sign * np.exp(logdet - self.log_ref) if sign != 0 else 0j
        if self.k == 0:
            ell = np.zeros(0, dtype=complex)
        elif self.k <= 12:
            ell = _adjugate_times(R, cs) * np.exp(-self.log_ref)
        elif sign != 0:
            ell = d * sla.lu_solve(sla.lu_factor(R), cs)
        else:
            ell = np.zeros(self.k, dtype=complex)
        N = Lam @ ell
        out = {"Lam": Lam, "MLam": MLam, "c": c, "d": complex(d), "N": N, "ell": ell}
        self._cache[s] = out
        while len(self._cache) > 8:
            self._cache.popitem(last=False)
        return out

    def numerator(self, s) -> np.ndarray:
        return self._evaluate(s)["N"]

    def denominator(self, s) -> complex:
        return self._evaluate(s)["d"]

    def D1(self, s) -> complex:
        return complex(np.linalg.det(self.nu @ self.witness(s)[:, self.L0])) if self.k else 1.0 + 0j

    def value(self, s) -> np.ndarray:
        ev = self._evaluate(s)
        if abs(ev["d"]) < self.denom_floor:
            raise PoleProximityError(s, ev["d"], self.denom_floor)
        return ev["N"] / ev["d"]

    def residuals(self, s, v=None) -> dict:
        if v is None:
            v = self.value(s)
        return self.family.residuals(s, v)

    def max_residual(self, s) -> float:
        return max(float(np.max(r)) if r.size else 0.0 for r in self.residuals(s).values())

    def uniqueness_certificate(self, s, n_dirs: int = 8, eps: float = 1e-3, seed: int = 0) -> bool:
        """Perturbing v(s) inside Im lambda_s strictly increases the residual."""
        v = self.value(s)
        M, c = self.family.matrix(s), self.family.rhs(s)
        base = np.linalg.norm(M @ v - c)
        Lam = self.witness(s)
        rng = np.random.default_rng(seed)
        for _ in range(n_dirs):
            dv = Lam @ (rng.standard_normal(Lam.shape[1]) + 1j * rng.standard_normal(Lam.shape[1]))
            dv *= eps * max(np.linalg.norm(v), 1.0) / max(np.linalg.norm(dv), 1e-300)
            if np.linalg.norm(M @ (v + dv) - c) <= base:
                return False
        return True

    def find_poles(self, center, radius: float, grid: int = 9, floor_ratio: float = 1e-3,
                   newton_steps: int = 30) -> list:
        """Zeros of d near ``center``: the smallest grid values of |d| are
        refined by secant steps and kept when the refined |d| is below
        ``floor_ratio`` times the largest grid value.

        Each pole is reported with ``removable=True`` when N also vanishes there.
        """
        center = complex(center)
        xs = np.linspace(-radius, radius, grid)
        pts = [center + a + 1j * b for a in xs for b in xs]
        vals = np.array([abs(self.denominator(p)) for p in pts])
        scale = np.max(vals)
        found = []
        for idx in np.argsort(vals)[:3]:
            s_a, s_b = pts[idx], pts[idx] + radius / grid
            f_a, f_b = self.denominator(s_a), self.denominator(s_b)
            for _ in range(newton_steps):
                if f_b == f_a:
                    break
                s_c = s_b - f_b * (s_b - s_a) / (f_b - f_a)
                s_a, f_a, s_b, f_b = s_b, f_b, s_c, self.denominator(s_c)
                if abs(s_b - s_a) < 1e-12:
                    break
            if abs(f_b) > floor_ratio * scale or abs(s_b - center) > 1.5 * radius \
                    or any(abs(s_b - q["s"]) < 1e-6 for q in found):
                continue
            Nn = np.linalg.norm(self.numerator(s_b))
            Nref = np.linalg.norm(self.numerator(center + radius))
            found.append({"s": complex(s_b), "d_abs": abs(f_b), "removable": bool(Nn < 1e-6 * max(Nref, 1e-300))})
        return found

    def to_json(self, samples: Sequence) -> str:
        recs = []
        for s in samples:
            ev = self._evaluate(s)
            rec = {"s": [complex(s).real, complex(s).imag], "d": [ev["d"].real, ev["d"].imag],
                   "N": [[z.real, z.imag] for z in ev["N"]]}
            if abs(ev["d"]) >= self.denom_floor:
                v = ev["N"] / ev["d"]
                rec["v"] = [[z.real, z.imag] for z in v]
                rec["residual"] = self.max_residual(s)
            else:
                rec["v"], rec["residual"] = None, None
            recs.append(rec)
        return json.dumps({"schema": "eisencont.meromorphic_solution/1", "k": self.k,
                           "s1": [self.s1.real, self.s1.imag], "s2": [self.s2.real, self.s2.imag],
                           "samples": recs})


def _pick_s1(witness, probe_grid, rank_tol):
    best = None
    for sp in probe_grid:
        Lam = witness(sp)
        k, cond = _numerical_rank(Lam, rank_tol) if Lam.shape[1] else (0, 1.0)
        key = (k, -cond)
        if best is None or key > best[0]:
            best = (key, complex(sp), Lam)
    return best[1], best[0][0], best[2]


def continue_unique_solution(family: AnalyticLinearFamily, witness: FiniteTypeWitness, unq_region,
                             probe_grid, rank_tol: float = 1e-10, tol: float = 1e-8,
                             denom_floor: float = 1e-10, normalize_denominator: bool = False,
                             d1_floor: float = 1e-8) -> MeromorphicSolution:
    """Cramer-rule continuation of the unique solution.

    (i) s1 in ``probe_grid`` maximizing the numerical rank k of lambda_s;
    (ii) L0 from column-pivoted QR of lambda_{s1}, dual functionals nu;
    (iii) D1(s) = det(nu lambda_s[:, L0]);
    (iv) s2 in ``unq_region`` with D1(s2) != 0 and best conditioning, and k
    equations chosen by pivoted QR (one inhomogeneous equation forced in);
    (v) d(s) = det of the selected k x k system, optionally divided by its
    value at s2; (vi) N(s) = lambda_s[:, L0] adj(R(s)) c(s).
    """
    if not probe_grid:
        raise ValueError("probe_grid is empty")
    if not unq_region:
        raise ValueError("unq_region is empty")
    s1, k, Lam1 = _pick_s1(witness, probe_grid, rank_tol)
    if k == 0:
        L0 = np.zeros(0, dtype=int)
        nu = np.zeros((0, witness.dim_E))
    else:
        _, _, piv = sla.qr(Lam1, mode="economic", pivoting=True)
        L0 = np.sort(piv[:k])
        nu = np.linalg.pinv(Lam1[:, L0])

    candidates = []
    for s2 in unq_region:
        s2 = complex(s2)
        Lam = witness(s2)[:, L0]
        D1 = complex(np.linalg.det(nu @ Lam)) if k else 1.0
        if abs(D1) < d1_floor:
            continue
        MLam = family.apply(s2, Lam)
        c = family.rhs(s2)
        norms = family.row_norms(s2)
        keep = norms > 1e-12 * max(norms.max(), 1e-300)
        w = np.zeros_like(norms)
        w[keep] = 1.0 / norms[keep]
        R = MLam * w[:, None]
        rank, cond = _numerical_rank(R[keep], 1e-12) if k else (0, 1.0)
        if rank < k:
            continue
        candidates.append((cond, s2, D1, R, c * w, keep, w))
    if not candidates:
        raise NoUniqueSolutionError("no point of unq_region gives a uniquely solvable reduced system")
    cond, s2, D1_2, R2, c2, keep, w = min(candidates, key=lambda t: t[0])

    idx = np.where(keep)[0]
    if k == 0:
        rows = np.zeros(0, dtype=int)
    else:
        forced = []
        if np.any(np.abs(c2[idx]) > 0):
            forced = [int(idx[np.argmax(np.abs(c2[idx]))])]
        A = R2[idx].conj().T
        if forced:
            q = R2[forced[0]].conj()
            q = q / np.linalg.norm(q)
            A = A - np.outer(q, q.conj() @ A)
        _, _, piv = sla.qr(A, mode="economic", pivoting=True)
        others = [int(idx[p]) for p in piv if int(idx[p]) not in forced][: k - len(forced)]
        rows = np.array(sorted(forced + others), dtype=int)

    sol = MeromorphicSolution(family, witness, L0, rows, w[rows], nu, s1, s2, k,
                              denom_floor=denom_floor, tol=tol,
                              info={"cond_s2": float(cond), "D1_s2": complex(D1_2)})
    if normalize_denominator and k:
        sign, logdet = np.linalg.slogdet(R2[rows])
        sol.log_ref = complex(logdet + np.log(sign))
        sol._cache.clear()
    if abs(sol.denominator(s2)) < denom_floor:
        raise NoUniqueSolutionError("selected subsystem is singular at s2")
    worst = sol.max_residual(s2)
    sol.info["residual_s2"] = worst
    if worst > tol:
        raise WitnessViolationError(f"full-system residual {worst:.3e} > tol {tol:.1e} at s2={s2}")
    return sol
