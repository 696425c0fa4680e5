"""Analytic families of linear systems and finite-type witnesses."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass
class EquationBlock:
    """A named group of equations  coeff(s) @ v = rhs(s).

    ``apply(s, V)`` may be supplied to compute coeff(s) @ V without forming
    the full matrix; ``row_norms(s)`` likewise.
    """

    name: str
    coeff: Callable
    rhs: Optional[Callable] = None
    n_rows: Optional[int] = None
    apply: Optional[Callable] = None
    row_norms: Optional[Callable] = None

    def rows(self, s) -> int:
        if self.n_rows is None:
            self.n_rows = int(np.atleast_2d(self.coeff(s)).shape[0])
        return self.n_rows

    def matrix(self, s) -> np.ndarray:
        return np.atleast_2d(np.asarray(self.coeff(s), dtype=complex))

    def rhs_at(self, s) -> np.ndarray:
        if self.rhs is None:
            return np.zeros(self.rows(s), dtype=complex)
        return np.atleast_1d(np.asarray(self.rhs(s), dtype=complex))

    def apply_to(self, s, V) -> np.ndarray:
        if self.apply is not None:
            return np.asarray(self.apply(s, V))
        return self.matrix(s) @ V

    def norms(self, s) -> np.ndarray:
        if self.row_norms is not None:
            return np.asarray(self.row_norms(s), dtype=float)
        return np.linalg.norm(self.matrix(s), axis=1)


@dataclass
class AnalyticLinearFamily:
    """System of equations mu_i(s) v = c_i(s) on C^dim_E, analytic in s.

    ``generator`` optionally yields extra equations (as (covector, rhs)
    pairs for a given s) that are only used for residual audits.
    """

    dim_E: int
    blocks: list
    domain: str = "C"
    generator: Optional[Callable] = None

    @classmethod
    def from_matrix(cls, matrix: Callable, rhs: Optional[Callable] = None, dim_E: Optional[int] = None,
                    name: str = "system", domain: str = "C") -> "AnalyticLinearFamily":
        if dim_E is None:
            dim_E = int(np.atleast_2d(matrix(0.123 + 0.0456j)).shape[1])
        return cls(dim_E, [EquationBlock(name, matrix, rhs)], domain)

    def block_slices(self, s) -> dict:
        out, start = {}, 0
        for b in self.blocks:
            n = b.rows(s)
            out[b.name] = slice(start, start + n)
            start += n
        return out

    def n_equations(self, s) -> int:
        return sum(b.rows(s) for b in self.blocks)

    def matrix(self, s) -> np.ndarray:
        return np.vstack([b.matrix(s) for b in self.blocks])

    def rhs(self, s) -> np.ndarray:
        return np.concatenate([b.rhs_at(s) for b in self.blocks])

    def apply(self, s, V) -> np.ndarray:
        return np.concatenate([b.apply_to(s, V) for b in self.blocks], axis=0)

    def row_norms(self, s) -> np.ndarray:
        return np.concatenate([b.norms(s) for b in self.blocks])

    def residuals(self, s, v) -> dict:
        """Scaled residuals |mu_i v - c_i| / (1 + |mu_i| |v|), per block."""
        v = np.asarray(v, dtype=complex)
        vnorm = np.linalg.norm(v)
        out = {}
        for b in self.blocks:
            r = np.abs(b.apply_to(s, v[:, None])[:, 0] - b.rhs_at(s))
            out[b.name] = r / (1.0 + b.norms(s) * vnorm)
        if self.generator is not None:
            extra = list(self.generator(s))
            if extra:
                r = [abs(np.dot(mu, v) - c) / (1.0 + np.linalg.norm(mu) * vnorm) for mu, c in extra]
                out["generator"] = np.array(r)
        return out

    def without(self, name: str) -> "AnalyticLinearFamily":
        return AnalyticLinearFamily(self.dim_E, [b for b in self.blocks if b.name != name], self.domain, self.generator)


@dataclass
class FiniteTypeWitness:
    """Analytic map lambda_s: C^dim_L -> C^dim_E whose image contains Sol(s)."""

    dim_E: int
    dim_L: int
    lam: Callable
    s0: complex = 0j
    info: dict = field(default_factory=dict)

    def __call__(self, s) -> np.ndarray:
        if self.dim_L == 0:
            return np.zeros((self.dim_E, 0), dtype=complex)
        return np.asarray(self.lam(s), dtype=complex)

    @classmethod
    def identity(cls, dim_E: int) -> "FiniteTypeWitness":
        eye = np.eye(dim_E, dtype=complex)
        return cls(dim_E, dim_E, lambda s: eye, info={"kind": "identity"})
