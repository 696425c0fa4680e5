"""Truncated Eisenstein series for SL2(Z) with a rigorous tail bound.

E(z; s) = sum over coprime (m, n) modulo sign of y^s / |m z + n|^(2s), which
has constant term y^s + m(s) y^(1-s).  The sum is evaluated at the reduced
representative of z (snapped to a fixed dyadic lattice), so it is exactly
invariant under SL2(Z).
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .geometry import HPoint, reduce_to_fundamental

_SNAP = 2.0 ** -36


class DivergenceError(ValueError):
    pass


@lru_cache(maxsize=4)
def coprime_pairs(M: int):
    """Representatives (m, n) of coprime pairs modulo sign with max(|m|,|n|) <= M."""
    m = np.arange(1, M + 1)
    n = np.arange(-M, M + 1)
    mm, nn = np.meshgrid(m, n, indexing="ij")
    keep = np.gcd(mm, nn) == 1
    m_out = np.concatenate([[0], mm[keep]]).astype(float)
    n_out = np.concatenate([[1], nn[keep]]).astype(float)
    return m_out, n_out


def tail_bound(z: complex, s, M: int) -> float:
    """Bound on the omitted terms (max(|m|,|n|) > M) at a reduced point z.

    |mz+n|^2 >= kappa (m^2 + n^2) with kappa the smallest eigenvalue of the
    form [[x^2+y^2, x], [x, 1]]; there are 4R sign classes with sup-norm R,
    and sum_{R>M} 4R R^(-2 sigma) <= 2 M^(2-2 sigma) / (sigma - 1).  Hence
    tail <= 2 y^sigma kappa^(-sigma) M^(2-2 sigma) / (sigma - 1).
    """
    sigma = complex(s).real
    x, y = z.real, z.imag
    a = x * x + y * y
    kappa = 0.5 * ((a + 1) - math.sqrt((a - 1) ** 2 + 4 * x * x))
    return 2.0 * y ** sigma * kappa ** (-sigma) * M ** (2 - 2 * sigma) / (sigma - 1)


def _snap(v: float) -> float:
    return round(v / _SNAP) * _SNAP


def eisenstein_series(point, s, M: int = 200):
    """(value, tail_bound) of the truncated series at ``point`` (HPoint or complex)."""
    s = complex(s)
    if s.real <= 1:
        raise DivergenceError(f"series diverges for Re s <= 1 (s={s})")
    red, _ = reduce_to_fundamental(point)
    z = complex(_snap(red.x), _snap(red.y))
    m, n = coprime_pairs(int(M))
    q = (m * z.real + n) ** 2 + (m * z.imag) ** 2
    value = complex(np.sum(np.exp(-s * np.log(q))) * z.imag ** s)
    return value, tail_bound(z, s, int(M))


def constant_term_series(y: float, s, M: int = 200, nx: int = 32):
    """x-average of the truncated series at height y (periodic trapezoid).

    Returns (value, bound) where bound is the largest tail bound over the nodes.
    """
    xs = np.arange(nx) / nx
    vals, bounds = zip(*(eisenstein_series(HPoint(x, y), s, M) for x in xs))
    return complex(np.mean(vals)), float(max(bounds))
