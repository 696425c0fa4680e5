import math

import numpy as np
import pytest

from eisencont.sl2 import (InterpolationRangeError, StripGrid, SupportViolationError, build_conv_op,
                           constant_term, constant_term_matrix, cusp_projection_ops, eisenstein_series,
                           strip_X_maps)
from eisencont.sl2.grid import gregory_weights, interpolation_row
from eisencont.specfn import RadialKernel, selberg_transform

C0 = math.sqrt(3) / 2


@pytest.fixture(scope="module")
def strip():
    return StripGrid(0.5, 5.0, 32, 80, 4.0)


@pytest.fixture(scope="module")
def dst(strip):
    return strip.restrict(C0, 3.0)[0]


@pytest.fixture(scope="module")
def conv(strip, dst):
    return build_conv_op(RadialKernel(0.5), strip, dst)


@pytest.fixture(scope="module")
def xmaps(strip, dst):
    low = strip.restrict(0.5, 3.0)[0]
    return low, strip_X_maps(low, dst, 6)


# ------------------------------------------------------------ quadrature

def test_gregory_rule_is_exact_for_low_degree_polynomials():
    w = gregory_weights(40, 1.0 / 39, order=6)
    t = np.linspace(0, 1, 40)
    for p in range(12):
        assert abs(np.dot(w, t ** p) - 1.0 / (p + 1)) <= 1e-12


def test_weights_integrate_the_strip_volume(strip):
    assert np.all(strip.weights > 0)
    assert abs(strip.weights.sum() - strip.volume()) <= 1e-6
    assert strip.volume() == pytest.approx(1 / 0.5 - 1 / 5.0)


def test_restrict_returns_level_range(strip, dst):
    sub, levels = strip.restrict(C0, 3.0)
    assert np.allclose(strip.y[levels], sub.y)
    assert sub.y[0] >= C0 * (1 - 1e-12) and sub.y[-1] <= 3.0 * (1 + 1e-12)


# ------------------------------------------------------------ constant term

def test_constant_term_examples():
    grid = StripGrid(0.5, 5.0, 16, 20)
    f = grid.Y ** 1.7
    assert np.allclose(constant_term(f, grid), grid.y ** 1.7, rtol=1e-14)
    g = np.cos(2 * np.pi * grid.X) * np.log(grid.Y + 2)
    assert np.max(np.abs(constant_term(g, grid))) <= 1e-12
    assert np.allclose(constant_term_matrix(grid) @ g, constant_term(g, grid))


def test_cusp_projections_are_complementary_orthogonal_projections():
    grid = StripGrid(0.5, 5.0, 8, 12)
    C, Cc = cusp_projection_ops(grid)
    assert np.max(np.abs(C @ C - C)) <= 1e-12
    assert np.max(np.abs(C @ Cc)) <= 1e-12
    assert np.linalg.matrix_rank(C) == grid.ny
    W = np.diag(grid.weights_N)
    assert np.max(np.abs(W @ C - (W @ C).T)) <= 1e-12 * np.max(np.abs(W))
    f = np.sin(grid.Y) + grid.Y ** 2  # x-independent
    assert np.max(np.abs(Cc @ f)) <= 1e-12


# ------------------------------------------------------------ convolution operator

@pytest.mark.parametrize("s", [0.0, 1.5, 2 + 0.5j])
def test_eigen_relation_on_power_functions(strip, dst, conv, s):
    h = selberg_transform(RadialKernel(0.5), s)
    got = conv @ (strip.Y ** s)
    want = h * dst.Y ** s
    assert np.linalg.norm(got - want) <= 1e-6 * np.linalg.norm(want)


def test_x_translation_equivariance(strip, dst, conv):
    def shift(grid):
        idx = np.arange(grid.size)
        return (idx // grid.nx) * grid.nx + (idx % grid.nx + 1) % grid.nx

    K = conv.matrix
    assert np.max(np.abs(K[np.ix_(shift(dst), shift(strip))] - K)) <= 1e-10


def test_support_violation(strip):
    too_low = strip.restrict(0.55, 3.0)[0]
    with pytest.raises(SupportViolationError):
        build_conv_op(RadialKernel(0.5), strip, too_low)
    with pytest.raises(SupportViolationError):
        build_conv_op(RadialKernel(0.5), strip, strip.restrict(C0, 4.5)[0])


# ------------------------------------------------------------ the X-grid maps

def test_iota_of_one_and_left_inverse(xmaps, dst):
    low, xm = xmaps
    ones = np.ones(xm.x_nodes.size)
    assert np.max(np.abs(xm.iota @ ones - 1)) <= 1e-12
    assert np.max(np.abs(xm.pi @ np.ones(dst.size) - 1)) <= 1e-12
    io0 = xm.iota[low.node_slice(xm.c0_levels)]
    assert np.max(np.abs(xm.pi @ io0 - np.eye(io0.shape[1]))) <= 1e-8


def test_iota_pi_is_a_weighted_orthogonal_projection(xmaps, dst):
    low, xm = xmaps
    io0 = xm.iota[low.node_slice(xm.c0_levels)]
    P = io0 @ xm.pi
    W = dst.weights_N[:, None]
    assert np.max(np.abs(P @ P - P)) <= 1e-10
    assert np.max(np.abs(W * P - (W * P).T)) <= 1e-10 * np.max(W)
    # commutes with the constant-term projection on x-independent functions
    C, _ = cusp_projection_ops(dst)
    f = dst.Y ** 0.0
    assert np.max(np.abs(P @ (C @ f) - C @ (P @ f))) <= 1e-10


def test_bump_above_one_is_reproduced(xmaps, dst):
    low, xm = xmaps
    rng = np.random.default_rng(2)
    X = low.X[xm.x_nodes]
    Y = low.Y[xm.x_nodes]
    g = np.exp(-8 * (Y - 2.0) ** 2) * (1 + 0.3 * np.cos(2 * np.pi * X)) + 1e-3 * rng.normal(size=X.size)
    io0 = xm.iota[low.node_slice(xm.c0_levels)]
    assert np.max(np.abs(xm.pi @ (io0 @ g) - g)) <= 1e-8


def test_pullback_reproduces_an_automorphic_function(xmaps):
    # samples of E(.; 2) on the X-grid extend to every strip node through the reduced points
    low, xm = xmaps
    values = np.array([eisenstein_series(complex(x, y), 2.0, 60)[0] for x, y in zip(low.X, low.Y)])
    ext = xm.iota @ values[xm.x_nodes]
    assert np.max(np.abs(ext - values)) <= 1e-6 * np.max(np.abs(values))


def test_interpolation_row_is_exact_for_trig_times_polynomial_in_log():
    grid = StripGrid(0.5, 5.0, 16, 40)
    f = lambda x, y: np.cos(2 * np.pi * 3 * x) * np.log(y) ** 2 + np.sin(2 * np.pi * x)
    z = complex(0.237, 1.91)
    row = interpolation_row(grid, z, order=6)
    assert abs(row @ grid.grid_function(f) - f(z.real, z.imag)) <= 1e-12


def test_reduced_points_above_the_x_grid_raise():
    grid = StripGrid(0.2, 5.0, 16, 60)
    low = grid.restrict(0.2, 3.0)[0]
    dst = grid.restrict(C0, 3.0)[0]
    with pytest.raises(InterpolationRangeError):
        strip_X_maps(low, dst, 6)
