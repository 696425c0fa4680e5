"""Discretization of the cusp strip Z_c = Gamma_inf \\ H truncated to [c, y_max].

Nodes form a tensor grid, uniform and periodic in x in [0, 1) and uniform in
t = log y.  Flattening is level-major: node (l, i) has index l * nx + i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..specfn import RadialKernel
from .geometry import cosh_distance_minus_one, reduce_to_fundamental


class SupportViolationError(ValueError):
    pass


class InterpolationRangeError(ValueError):
    pass


def gregory_weights(n: int, h: float, order: int = 6) -> np.ndarray:
    """Trapezoid weights on n equispaced nodes with end corrections that make
    the rule exact for polynomials of degree < 2*order."""
    if n < 2 * order + 2:
        return np.full(n, h) * np.r_[0.5, np.ones(n - 2), 0.5]
    w = np.full(n, h)
    t = np.linspace(-1.0, 1.0, n)
    hh = t[1] - t[0]
    A = np.zeros((2 * order, 2 * order))
    b = np.zeros(2 * order)
    for p in range(2 * order):
        b[p] = (1 - (-1) ** (p + 1)) / (p + 1) - hh * np.sum(t ** p)
        A[p, :order] = t[:order] ** p
        A[p, order:] = t[n - order:] ** p
    corr = np.linalg.solve(A, b) * (h / hh)
    w[:order] += corr[:order]
    w[n - order:] += corr[order:]
    return w


@dataclass(frozen=True)
class StripGrid:
    c: float
    y_max: float
    nx: int
    ny: int
    N: float = 4.0

    def __post_init__(self):
        if not (0 < self.c < self.y_max):
            raise ValueError("need 0 < c < y_max")
        if self.nx < 2 or self.ny < 2 or self.nx % 2:
            raise ValueError("nx must be even and >= 2, ny >= 2")

    @cached_property
    def t(self) -> np.ndarray:
        return np.linspace(math.log(self.c), math.log(self.y_max), self.ny)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @cached_property
    def y(self) -> np.ndarray:
        return np.exp(self.t)

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) / self.nx

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @cached_property
    def X(self) -> np.ndarray:
        return np.tile(self.x, self.ny)

    @cached_property
    def Y(self) -> np.ndarray:
        return np.repeat(self.y, self.nx)

    @cached_property
    def level(self) -> np.ndarray:
        return np.repeat(np.arange(self.ny), self.nx)

    @cached_property
    def level_weights(self) -> np.ndarray:
        """Weights for integrals against dy/y^2 = dt/y over [c, y_max]."""
        return gregory_weights(self.ny, self.dt) / self.y

    @cached_property
    def weights(self) -> np.ndarray:
        """Per-node weights for mu = dx dy / y^2."""
        return np.repeat(self.level_weights, self.nx) / self.nx

    @cached_property
    def weights_N(self) -> np.ndarray:
        """Per-node weights for the weighted measure y^(-2N) mu."""
        return self.weights * self.Y ** (-2.0 * self.N)

    def volume(self) -> float:
        return 1.0 / self.c - 1.0 / self.y_max

    def restrict(self, y_lo: float, y_hi: float):
        """Sub-grid of the levels in [y_lo, y_hi] and the slice of levels it occupies."""
        eps = 1e-12
        idx = np.where((self.y >= y_lo * (1 - eps)) & (self.y <= y_hi * (1 + eps)))[0]
        if idx.size < 2:
            raise ValueError(f"fewer than two levels in [{y_lo}, {y_hi}]")
        sub = StripGrid(float(self.y[idx[0]]), float(self.y[idx[-1]]), self.nx, int(idx.size), self.N)
        return sub, slice(int(idx[0]), int(idx[-1]) + 1)

    def node_slice(self, levels: slice) -> slice:
        return slice(levels.start * self.nx, levels.stop * self.nx)

    def grid_function(self, func) -> np.ndarray:
        """Samples of func(x, y) at the nodes."""
        return np.asarray(func(self.X, self.Y))

    def metadata(self) -> dict:
        return {"c": self.c, "y_max": self.y_max, "nx": self.nx, "ny": self.ny, "N": self.N}


def constant_term(f: np.ndarray, grid: StripGrid) -> np.ndarray:
    """x-average per level (exact for trigonometric polynomials below the Nyquist mode)."""
    return np.asarray(f).reshape(grid.ny, grid.nx).mean(axis=1)


def constant_term_matrix(grid: StripGrid) -> np.ndarray:
    """ny x n matrix of the level averages."""
    return np.kron(np.eye(grid.ny), np.full((1, grid.nx), 1.0 / grid.nx))


def cusp_projection_ops(grid: StripGrid):
    """(C, I - C) as dense n x n matrices; C replaces f by its constant term."""
    C = np.kron(np.eye(grid.ny), np.full((grid.nx, grid.nx), 1.0 / grid.nx))
    return C, np.eye(grid.size) - C


@dataclass
class DiscretizedOp:
    matrix: np.ndarray
    src: StripGrid
    dst: StripGrid

    def __matmul__(self, f):
        return self.matrix @ f


def _periodization_range(kernel: RadialKernel, y_top: float) -> int:
    r = kernel.support_radius
    reach = math.sqrt(2.0 * y_top * y_top * math.exp(r) * (math.cosh(r) - 1.0))
    return int(math.ceil(reach)) + 1


def check_support(kernel: RadialKernel, src: StripGrid, dst: StripGrid):
    r = kernel.support_radius
    lo, hi = dst.y[0] * math.exp(-r), dst.y[-1] * math.exp(r)
    if lo < src.c * (1 - 1e-12) or hi > src.y_max * (1 + 1e-12):
        raise SupportViolationError(
            f"kernel balls around dst levels span [{lo:.4f}, {hi:.4f}], outside src [{src.c}, {src.y_max}]")


def build_conv_op(kernel: RadialKernel, src: StripGrid, dst: StripGrid) -> DiscretizedOp:
    """[K]_ij = sum_n profile(d(z_i, z_j + n)) * w_j (Gamma_inf periodization)."""
    check_support(kernel, src, dst)
    if src.nx != dst.nx:
        raise ValueError("src and dst must share the x-resolution")
    nper = _periodization_range(kernel, dst.y_max)
    Xd, Yd = dst.X[:, None], dst.Y[:, None]
    Xs, Ys = src.X[None, :], src.Y[None, :]
    K = np.zeros((dst.size, src.size))
    r = kernel.support_radius
    for n in range(-nper, nper + 1):
        cd = cosh_distance_minus_one(Xd, Yd, Xs + n, Ys)
        if np.min(cd) >= math.cosh(r) - 1.0:
            continue
        K += kernel.profile_cosh(cd)
    return DiscretizedOp(K * src.weights[None, :], src, dst)


# ------------------------------------------------------------ interpolation

def trig_weights(nx: int, x: float) -> np.ndarray:
    """Weights w_j with sum_j w_j f(j/nx) = trigonometric interpolant at x
    (Nyquist mode split symmetrically)."""
    d = x - np.arange(nx) / nx
    k = np.arange(-nx // 2, nx // 2 + 1)
    coef = np.ones(k.size)
    coef[0] = coef[-1] = 0.5
    return (coef[None, :] * np.cos(2 * np.pi * np.outer(d, k))).sum(axis=1) / nx


def lagrange_weights(t_nodes: np.ndarray, t: float, order: int):
    """Indices and weights of ``order``-point Lagrange interpolation at t."""
    h = t_nodes[1] - t_nodes[0]
    j = int(math.floor((t - t_nodes[0]) / h))
    j0 = j - order // 2 + 1
    if j0 < 0 or j0 + order > t_nodes.size:
        raise InterpolationRangeError(f"log-height {t:.4f} too close to the grid edge for a {order}-point stencil")
    idx = np.arange(j0, j0 + order)
    nodes = t_nodes[idx]
    w = np.ones(order)
    for a in range(order):
        for b in range(order):
            if a != b:
                w[a] *= (t - nodes[b]) / (nodes[a] - nodes[b])
    return idx, w


def interpolation_row(grid: StripGrid, z: complex, order: int = 6) -> np.ndarray:
    """Row vector r with r @ f approximating f at z (trig in x, Lagrange in log y)."""
    tw = trig_weights(grid.nx, z.real % 1.0)
    idx, lw = lagrange_weights(grid.t, math.log(z.imag), order)
    row = np.zeros(grid.size)
    for l, w in zip(idx, lw):
        row[l * grid.nx:(l + 1) * grid.nx] += w * tw
    return row


def fundamental_mask(grid: StripGrid) -> np.ndarray:
    """Nodes whose reduced representative is the node itself (mod x -> x+1)."""
    mask = np.zeros(grid.size, dtype=bool)
    for i, (x, y) in enumerate(zip(grid.X, grid.Y)):
        xc = x - math.floor(x + 0.5)
        red, _ = reduce_to_fundamental(complex(xc, y))
        mask[i] = abs(red.y - y) <= 1e-12 * y and abs(((red.x - x) + 0.5) % 1.0 - 0.5) <= 1e-12
    return mask


@dataclass
class XMaps:
    """Discrete pullback iota: X-grid -> strip and W-orthogonal left inverse pi.

    ``iota`` has one row per node of ``grid_c``; ``pi`` acts on nodes of
    ``grid_c0`` (which must be a level-range of grid_c).
    """

    iota: np.ndarray
    pi: np.ndarray
    x_nodes: np.ndarray  # node indices (in grid_c) of the X-grid
    c0_levels: slice
    interp_cond: float


def strip_X_maps(grid_c: StripGrid, grid_c0: StripGrid, order: int = 6) -> XMaps:
    """The X-grid is the set of fundamental-domain nodes of grid_c0.  Other
    nodes take the interpolated value at their reduced point; since stencils
    may touch other non-fundamental nodes, the values are the solution of
    (I - I_nn) f_n = I_nF g.
    """
    offset = int(round((grid_c0.t[0] - grid_c.t[0]) / grid_c.dt))
    if abs(grid_c.t[offset] - grid_c0.t[0]) > 1e-9 or grid_c.nx != grid_c0.nx \
            or offset + grid_c0.ny > grid_c.ny:
        raise ValueError("grid_c0 must be a level range of grid_c")
    levels = slice(offset, offset + grid_c0.ny)
    inF = fundamental_mask(grid_c)
    inF[: levels.start * grid_c.nx] = False
    inF[levels.stop * grid_c.nx:] = False
    x_nodes = np.where(inF)[0]
    other = np.where(~inF)[0]
    interp = np.zeros((other.size, grid_c.size))
    y_top_F = grid_c.y[levels.stop - 1]
    for a, i in enumerate(other):
        red, _ = reduce_to_fundamental(complex(grid_c.X[i] - math.floor(grid_c.X[i] + 0.5), grid_c.Y[i]))
        if red.y > y_top_F * (1 + 1e-12):
            raise InterpolationRangeError(f"reduced height {red.y:.4f} above the X-grid top {y_top_F:.4f}")
        interp[a] = interpolation_row(grid_c, red.z, order)
    A = np.eye(other.size) - interp[:, other]
    iota = np.zeros((grid_c.size, x_nodes.size))
    iota[x_nodes, np.arange(x_nodes.size)] = 1.0
    iota[other] = np.linalg.solve(A, interp[:, x_nodes])
    rows0 = grid_c.node_slice(levels)
    io0 = iota[rows0]
    w0 = grid_c0.weights_N
    pi = np.linalg.solve(io0.T @ (w0[:, None] * io0), io0.T * w0[None, :])
    return XMaps(iota, pi, x_nodes, levels, float(np.linalg.cond(A)))
