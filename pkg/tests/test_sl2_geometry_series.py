import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eisencont.sl2 import (DivergenceError, HPoint, act, coprime_pairs, eisenstein_series, height,
                           hyperbolic_distance, reduce_to_fundamental, tail_bound)

from oracle_values import E_I_2, LATTICE_SUM_I_2

T = ((1, 1), (0, 1))
T_INV = ((1, -1), (0, 1))
S = ((0, -1), (1, 0))


def mat(g, h):
    return ((g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
            (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]))


def random_sl2(rng, bound=10, steps=6):
    while True:
        g = ((1, 0), (0, 1))
        for _ in range(rng.integers(1, steps + 1)):
            g = mat(g, [T, T_INV, S][rng.integers(3)])
        if max(abs(e) for row in g for e in row) <= bound:
            return g


def brute_height(z: complex, bound: int = 50) -> float:
    """max Im(gamma z) = max y / |cz + d|^2 over coprime (c, d) with entries <= bound."""
    c = np.arange(-bound, bound + 1)
    cc, dd = np.meshgrid(c, c, indexing="ij")
    keep = (np.gcd(cc, dd) == 1)
    q = np.abs(cc[keep] * z + dd[keep]) ** 2
    return float(np.max(z.imag / q))


# ------------------------------------------------------------ reduction

def test_reduce_examples():
    red, g = reduce_to_fundamental(HPoint(0.0, 1.0))
    assert red.z == 1j and g == ((1, 0), (0, 1))
    red, g = reduce_to_fundamental(HPoint(1.0, 1.0))
    assert red.z == 1j and g == ((1, -1), (0, 1))


def test_reduce_deep_point_against_brute_force():
    z = 0.3 + 0.1j
    red, g = reduce_to_fundamental(z)
    assert abs(red.x) <= 0.5 and abs(red.z) >= 1 - 1e-14
    assert abs(act(g, z) - red.z) <= 1e-12
    assert g[0][0] * g[1][1] - g[0][1] * g[1][0] == 1
    assert red.y == pytest.approx(brute_height(z), rel=1e-12)
    assert height(z) == red.y


@given(st.floats(-20, 20), st.floats(1e-3, 30))
def test_reduction_lands_in_fundamental_domain(x, y):
    red, g = reduce_to_fundamental(complex(x, y))
    assert -0.5 < red.x <= 0.5 + 1e-12
    assert abs(red.z) >= 1 - 1e-12
    assert abs(act(g, complex(x, y)) - red.z) <= 1e-9 * max(1.0, abs(red.z))


def test_boundary_ties_go_to_nonnegative_x():
    red, _ = reduce_to_fundamental(complex(-0.5, 2.0))
    assert red.x == 0.5
    red, _ = reduce_to_fundamental(complex(-0.3, math.sqrt(0.91)))
    assert red.x == pytest.approx(0.3, abs=1e-14) and abs(abs(red.z) - 1) <= 1e-12


def test_hpoint_requires_upper_half_plane():
    with pytest.raises(ValueError):
        HPoint(0.0, 0.0)
    assert hyperbolic_distance(1j, 2j) == pytest.approx(math.log(2), rel=1e-14)


# ------------------------------------------------------------ series

def test_series_is_bitwise_invariant():
    rng = np.random.default_rng(7)
    for _ in range(20):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2.0))
        g = random_sl2(rng)
        gz = act(g, z)
        if gz.imag <= 0:
            continue
        assert eisenstein_series(gz, 2.0 + 0.3j, 80)[0] == eisenstein_series(z, 2.0 + 0.3j, 80)[0]


def test_lattice_sum_normalization():
    # the full lattice sum counts each coprime class with both signs and every multiple k >= 1
    value, bound = eisenstein_series(1j, 2.0, 2000)
    zeta4 = math.pi ** 4 / 90
    assert abs(2 * zeta4 * value - LATTICE_SUM_I_2) <= 1e-6
    assert abs(value - E_I_2) <= bound


def test_frozen_value_at_i_with_moderate_truncation():
    value, bound = eisenstein_series(1j, 2.0, 500)
    assert abs(value - E_I_2) <= 1e-5
    assert abs(value - E_I_2) <= bound


def test_tail_bound_decreases_and_covers_the_error():
    z = complex(0.2, 1.3)
    reference = eisenstein_series(z, 3.0, 1500)[0]
    previous = math.inf
    for M in (25, 50, 100, 200):
        value, bound = eisenstein_series(z, 3.0, M)
        assert bound < previous
        assert abs(value - reference) <= bound
        previous = bound
    assert tail_bound(z, 2.5, 400) < tail_bound(z, 2.5, 200)


@pytest.mark.parametrize("s", [1.0, 0.9, 0.5 + 3j])
def test_divergence_below_the_abscissa(s):
    with pytest.raises(DivergenceError):
        eisenstein_series(1j, s, 100)


def test_coprime_pairs_are_sign_classes():
    m, n = coprime_pairs(6)
    pairs = set(zip(m.astype(int), n.astype(int)))
    assert (0, 1) in pairs and (0, -1) not in pairs
    assert all(math.gcd(a, b) == 1 for a, b in pairs)
    assert all((-a, -b) not in pairs for a, b in pairs)
    # every primitive vector with sup-norm <= 6 appears exactly once up to sign
    count = sum(1 for a in range(-6, 7) for b in range(-6, 7) if (a, b) != (0, 0) and math.gcd(a, b) == 1)
    assert len(pairs) == count // 2
