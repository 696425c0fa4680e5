"""The auxiliary system for E(z; s) on the strip and its numerical continuation.

Unknown: samples f of the candidate function on the strip grid [c, y_max].
Equation blocks:

``eigen``       K f - h(s) f|_{c0..y_cusp} = 0, K the periodized kernel operator;
``automorphy``  iota pi (f|_{c0..y_cusp}) - f|_{c..y_cusp} = 0;
``cusp_top``    (I - C) f = 0 above y_cusp (moderate growth: only the
                constant term survives high in the cusp);
``constant``    3x3 determinant conditions putting C f in span{alpha1, alpha2};
``normalize``   the y^s coefficient of C f equals 1.
"""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import asdict, dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from ..config import GridConfig, KernelConfig, RunConfig
from ..merocont import (AnalyticLinearFamily, EquationBlock, FiniteTypeWitness, PoleProximityError,
                        continue_unique_solution, fredholm_witness)
from ..specfn import RadialKernel, selberg_transform
from .grid import StripGrid, build_conv_op, strip_X_maps


class KernelTransformVanishingError(ValueError):
    pass


class BandTooWideError(ValueError):
    pass


class ResidualFailureError(RuntimeError):
    pass


class FitFailureError(RuntimeError):
    pass


# ------------------------------------------------------------------ alpha basis

def alpha_basis(y, s) -> np.ndarray:
    """Columns alpha1 = y^s and alpha2 = (y^s - y^(1-s)) / (2s - 1).

    alpha2 is written as y^(1/2) log y * sinh(e log y)/(e log y) with
    e = s - 1/2, which is regular at s = 1/2 (limit y^(1/2) log y).
    """
    y = np.asarray(y, dtype=float)
    s = complex(s)
    ly = np.log(y)
    z = (s - 0.5) * ly
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    sinhc = np.where(small, 1.0 + z * z / 6.0 + z ** 4 / 120.0, np.sinh(zs) / zs)
    a1 = np.exp(s * ly)
    a2 = np.sqrt(y) * ly * sinhc
    return np.stack([a1, a2], axis=1)


def constant_term_fit(y, ct, s, weights=None):
    """Least-squares (A, m) with ct ~ A y^s + m y^(1-s); returns (A, m, relative residual)."""
    y = np.asarray(y, dtype=float)
    ct = np.asarray(ct, dtype=complex)
    Phi = np.stack([y ** complex(s), y ** (1 - complex(s))], axis=1)
    w = np.ones_like(y) if weights is None else np.sqrt(np.asarray(weights, dtype=float))
    coef = np.linalg.lstsq(Phi * w[:, None], ct * w, rcond=None)[0]
    resid = np.max(np.abs(Phi @ coef - ct)) / max(np.max(np.abs(ct)), 1e-300)
    return complex(coef[0]), complex(coef[1]), float(resid)


def difference_operator_residual(ct, y, s, shifts=(1, 2)) -> float:
    """Max of |D_{a2}^{1-s} D_{a1}^{s} Cf| / max|Cf| on a geometric y-grid.

    D_a^lam f(y) = f(a y) - a^lam f(y); a_i = exp(shift_i * dt).  Both
    operators kill their exponent, so the composition kills span{y^s, y^(1-s)}.
    """
    ct = np.asarray(ct, dtype=complex)
    t = np.log(np.asarray(y, dtype=float))
    dt = t[1] - t[0]
    j1, j2 = shifts
    a1, a2 = math.exp(j1 * dt), math.exp(j2 * dt)
    s = complex(s)
    g = ct[j1:] - a1 ** s * ct[:-j1]
    h = g[j2:] - a2 ** (1 - s) * g[:-j2]
    return float(np.max(np.abs(h)) / max(np.max(np.abs(ct)), 1e-300))


# ------------------------------------------------------------ cusp coordinates

def cusp_analysis(V: np.ndarray, ny: int, nx: int) -> np.ndarray:
    """U1^H V: nonzero x-Fourier modes of each level (unitary normalization)."""
    m = V.shape[1]
    W = np.fft.fft(V.reshape(ny, nx, m), axis=1) / math.sqrt(nx)
    return W[:, 1:, :].reshape(ny * (nx - 1), m)


def cusp_synthesis(A: np.ndarray, ny: int, nx: int) -> np.ndarray:
    """U1 A: grid function with the given nonzero modes and zero constant term."""
    m = A.shape[1]
    W = np.zeros((ny, nx, m), dtype=complex)
    W[:, 1:, :] = A.reshape(ny, nx - 1, m)
    return (np.fft.ifft(W, axis=1) * math.sqrt(nx)).reshape(ny * nx, m)


def _reduced_blocks(X: np.ndarray, ny: int, nx: int):
    """(U1^H X U1, U1^H X U2) for a real n x n matrix X."""
    XU1 = cusp_analysis(X.T.copy(), ny, nx).conj().T      # X U1 = (U1^H X^T)^H for real X
    XU2 = X.reshape(X.shape[0], ny, nx).sum(axis=2)
    return cusp_analysis(XU1, ny, nx), cusp_analysis(XU2, ny, nx)


# ------------------------------------------------------------- discretization

class Sl2Discretization:
    """Grids, operators and the (s-generic) auxiliary system for one grid/kernel choice."""

    def __init__(self, grid_cfg: GridConfig, kernel_cfg: KernelConfig, extra_triples: int = 64, seed: int = 0):
        t0 = time.perf_counter()
        self.grid_cfg, self.kernel_cfg = grid_cfg, kernel_cfg
        self.kernel = RadialKernel(kernel_cfg.radius, kernel_cfg.shape, kernel_cfg.power)
        g = grid_cfg
        self.strip = StripGrid(g.c, g.y_max, g.nx, g.ny, g.N)
        self.dst, self.dst_levels = self.strip.restrict(g.c0, g.y_cusp)
        self.low, self.low_levels = self.strip.restrict(g.c, g.y_cusp)
        self.K = build_conv_op(self.kernel, self.strip, self.dst).matrix
        self.xmaps = strip_X_maps(self.low, self.dst, g.interp_order)
        self.P = self.xmaps.iota @ self.xmaps.pi
        st = self.strip
        self.sl_dst = st.node_slice(self.dst_levels)
        self.sl_low = st.node_slice(self.low_levels)
        self.sl_hi = slice(self.sl_low.stop, st.size)
        self.n = st.size
        y = st.y
        self.fit_levels = np.where((y > 1.1) & (y < 0.8 * g.y_max))[0]
        if self.fit_levels.size < 4:
            raise ValueError("fewer than four y-levels in the fitting window (1.1, 0.8 y_max)")
        self.triples = self._choose_triples(extra_triples, seed)
        self._hhat = {}
        self.build_seconds = time.perf_counter() - t0

    # -- helpers
    def hhat(self, s) -> complex:
        s = complex(s)
        if s not in self._hhat:
            self._hhat[s] = complex(selberg_transform(self.kernel, s))
        return self._hhat[s]

    def level_means(self, V: np.ndarray) -> np.ndarray:
        st = self.strip
        return V.reshape(-1, st.nx, *V.shape[1:]).mean(axis=1)

    def _choose_triples(self, extra: int, seed: int) -> np.ndarray:
        y = self.strip.y
        i0 = int(np.argmin(np.abs(y - 1.0)))
        j0 = int(np.argmin(np.abs(y - self.grid_cfg.y_cusp)))
        trip = [(i0, j0, k) for k in range(y.size) if k not in (i0, j0)]
        rng = np.random.default_rng(seed)
        for _ in range(extra):
            trip.append(tuple(int(v) for v in np.sort(rng.choice(y.size, 3, replace=False))))
        return np.array(trip, dtype=int)

    def triple_matrix(self, s) -> np.ndarray:
        """Rows m_jk e_i - m_ik e_j + m_ij e_k over levels, m_ab = det[alpha(y_a); alpha(y_b)]."""
        al = alpha_basis(self.strip.y, s)
        i, j, k = self.triples.T

        def minor(a, b):
            return al[a, 0] * al[b, 1] - al[b, 0] * al[a, 1]

        T = np.zeros((len(self.triples), self.strip.ny), dtype=complex)
        r = np.arange(len(self.triples))
        T[r, i] += minor(j, k)
        T[r, j] -= minor(i, k)
        T[r, k] += minor(i, j)
        return T

    def normalization_functional(self, s) -> np.ndarray:
        """Analytic functional on level values returning the y^s coefficient of the
        (unconjugated) normal-equation fit on the fitting window."""
        y = self.strip.y[self.fit_levels]
        Phi = np.stack([y ** complex(s), y ** (1 - complex(s))], axis=1)
        coef = np.linalg.solve(Phi.T @ Phi, Phi.T)
        a = np.zeros(self.strip.ny, dtype=complex)
        a[self.fit_levels] = coef[0]
        return a

    # -- the family
    @cached_property
    def automorphy_rows(self) -> np.ndarray:
        nlow = self.sl_low.stop
        B = np.zeros((nlow, self.n))
        B[:, self.sl_dst] = self.P
        B[np.arange(nlow), np.arange(nlow)] -= 1.0
        norms = np.linalg.norm(B, axis=1)
        return B[norms > 1e-12 * norms.max()]

    @cached_property
    def family(self) -> AnalyticLinearFamily:
        st, K, sl_dst, sl_hi = self.strip, self.K, self.sl_dst, self.sl_hi
        nx = st.nx
        n_dst = K.shape[0]
        K_diag = K[np.arange(n_dst), sl_dst.start + np.arange(n_dst)]
        K_rownorm2 = np.sum(K * K, axis=1)
        Bau = self.automorphy_rows
        Bau_norms = np.linalg.norm(Bau, axis=1)
        n_hi = sl_hi.stop - sl_hi.start
        top_norm = math.sqrt((1 - 1 / nx) ** 2 + (nx - 1) / nx ** 2)

        def eig_apply(s, V):
            return K @ V - self.hhat(s) * V[sl_dst]

        def eig_coeff(s):
            M = K.astype(complex)
            M[np.arange(n_dst), sl_dst.start + np.arange(n_dst)] -= self.hhat(s)
            return M

        def eig_norms(s):
            h = self.hhat(s)
            return np.sqrt(np.maximum(K_rownorm2 - 2 * (np.conj(h) * K_diag).real + abs(h) ** 2, 0.0))

        def top_apply(s, V):
            W = V[sl_hi]
            return W - np.repeat(self.level_means(W), nx, axis=0)

        def top_coeff(s):
            lv = slice(sl_hi.start // nx, st.ny)
            C = np.kron(np.eye(lv.stop - lv.start), np.full((nx, nx), 1.0 / nx))
            M = np.zeros((n_hi, self.n))
            M[:, sl_hi] = np.eye(n_hi) - C
            return M

        Cmat_scale = 1.0 / math.sqrt(nx)

        def ct_coeff(s):
            return np.repeat(self.triple_matrix(s), nx, axis=1) / nx

        def ct_apply(s, V):
            return self.triple_matrix(s) @ self.level_means(V)

        def ct_norms(s):
            return np.linalg.norm(self.triple_matrix(s), axis=1) * Cmat_scale

        def nm_coeff(s):
            return (np.repeat(self.normalization_functional(s), nx) / nx)[None, :]

        def nm_apply(s, V):
            return (self.normalization_functional(s) @ self.level_means(V))[None]

        def nm_norms(s):
            return np.array([np.linalg.norm(self.normalization_functional(s)) * Cmat_scale])

        blocks = [
            EquationBlock("eigen", eig_coeff, n_rows=n_dst, apply=eig_apply, row_norms=eig_norms),
            EquationBlock("automorphy", lambda s: Bau.astype(complex), n_rows=Bau.shape[0],
                          apply=lambda s, V: Bau @ V, row_norms=lambda s: Bau_norms),
            EquationBlock("cusp_top", top_coeff, n_rows=n_hi, apply=top_apply,
                          row_norms=lambda s: np.full(n_hi, top_norm)),
            EquationBlock("constant", ct_coeff, n_rows=len(self.triples), apply=ct_apply, row_norms=ct_norms),
            EquationBlock("normalize", nm_coeff, rhs=lambda s: np.ones(1, dtype=complex), n_rows=1,
                          apply=nm_apply, row_norms=nm_norms),
        ]
        return AnalyticLinearFamily(self.n, blocks, domain="C")

    # -- the Fredholm splitting in cusp coordinates
    @cached_property
    def reduced_blocks(self) -> dict:
        """U1^H X [U1, U2] for X in {E - B, G, B} (see EisensteinChart)."""
        n, nlow = self.n, self.sl_low.stop
        st = self.strip
        B = np.zeros((n, n))
        B[:nlow, self.sl_dst] = self.P
        G = np.zeros((n, n))
        G[:nlow] = self.P @ self.K
        E = np.eye(n)
        lv0 = self.sl_hi.start // st.nx
        for lv in range(lv0, st.ny):
            sl = slice(lv * st.nx, (lv + 1) * st.nx)
            E[sl, sl] -= 1.0 / st.nx
        out = {}
        for name, X in (("E_minus_B", E - B), ("G", G), ("B", B)):
            out[name] = _reduced_blocks(X, st.ny, st.nx)
        return out

    def embed(self, Z: np.ndarray, s) -> np.ndarray:
        """[U1, U2 alpha(s)] Z for Z with ncu + 2 rows."""
        st = self.strip
        ncu = st.ny * (st.nx - 1)
        cusp = cusp_synthesis(Z[:ncu], st.ny, st.nx)
        const = alpha_basis(st.y, s) @ Z[ncu:]
        return cusp + np.repeat(const, st.nx, axis=0)

    # -- checks
    def check_band(self, points):
        sup = max(abs(complex(p).real) for p in points)
        if self.grid_cfg.N < 1 + sup - 1e-12:
            raise BandTooWideError(f"weight N={self.grid_cfg.N} < 1 + sup|Re s| = {1 + sup}")


@lru_cache(maxsize=2)
def get_discretization(grid_cfg: GridConfig, kernel_cfg: KernelConfig, extra_triples: int = 64,
                       seed: int = 0) -> Sl2Discretization:
    return Sl2Discretization(grid_cfg, kernel_cfg, extra_triples, seed)


def assemble_auxiliary_system(band, kernel_cfg: KernelConfig | None = None, grid_cfg: GridConfig | None = None,
                              extra_triples: int = 64, seed: int = 0) -> AnalyticLinearFamily:
    """The auxiliary family, after checking h(s) != 0 and the weight condition on ``band``."""
    disc = get_discretization(grid_cfg or GridConfig(), kernel_cfg or KernelConfig(), extra_triples, seed)
    band = [complex(b) for b in np.atleast_1d(band)]
    disc.check_band(band)
    for b in band:
        if abs(disc.hhat(b)) < 1e-12:
            raise KernelTransformVanishingError(f"h({b}) vanishes")
    return disc.family


# ------------------------------------------------------------------- results

OMITTED_EQUATIONS_NOTE = ("orthogonality to cusp forms is not imposed; cusp-form contamination is "
                          "monitored through the full-system residual and the uniqueness certificate")


@dataclass
class ContinuationResult:
    s: complex
    psi: np.ndarray
    m_estimate: complex
    A_estimate: complex
    fit_residual: float
    residuals: dict
    max_residual: float
    denominator_value: complex
    D1_value: complex
    k: int
    rank_F: int
    difference_residual: float
    constant_term: np.ndarray
    solution: np.ndarray
    chart_center: complex
    grid: dict
    notes: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def to_dict(self, include_samples: bool = True) -> dict:
        def cpx(z):
            return [complex(z).real, complex(z).imag]

        out = {
            "schema": "eisencont.continuation_result/1",
            "s": cpx(self.s), "m_estimate": cpx(self.m_estimate), "A_estimate": cpx(self.A_estimate),
            "fit_residual": self.fit_residual, "residuals": dict(self.residuals),
            "max_residual": self.max_residual, "denominator_value": cpx(self.denominator_value),
            "D1_value": cpx(self.D1_value), "k": self.k, "rank_F": self.rank_F,
            "difference_residual": self.difference_residual, "chart_center": cpx(self.chart_center),
            "grid": self.grid, "notes": list(self.notes), "timings": dict(self.timings),
        }
        if include_samples:
            out["psi"] = [cpx(z) for z in self.psi]
            out["constant_term"] = [cpx(z) for z in self.constant_term]
        return out


# --------------------------------------------------------------------- chart

class EisensteinChart:
    """One finite-type witness (centered at s0) and the continued solution it carries.

    In cusp coordinates f = U1 a + U2 alpha(s) b, the regularized operator is
        D M(s) = (E - B) - G / h(s0) + (h(s)/h(s0)) B
    where, on rows below y_cusp, E = I, G = iota pi K and B = iota pi R_dst
    (so D M(s0) = I - iota pi K / h(s0) on that block) and, above y_cusp,
    E = I - C.  After projecting rows on U1 the cuspidal block is identity
    minus a numerically compact operator.
    """

    def __init__(self, disc: Sl2Discretization, s0, cont_cfg):
        t0 = time.perf_counter()
        self.disc, self.cfg = disc, cont_cfg
        self.s0 = s0 = complex(s0)
        self.uniqueness_samples = [complex(u) for u in cont_cfg.uniqueness_samples]
        delta = cont_cfg.probe_radius
        probes = [s0 + delta * cmath.exp(2j * math.pi * j / max(cont_cfg.probe_count - 1, 1))
                  for j in range(cont_cfg.probe_count - 1)]
        self.probe_grid = [s0] + probes
        disc.check_band([s0] + self.uniqueness_samples + self.probe_grid)
        self.h0 = disc.hhat(s0)
        if abs(self.h0) < 1e-12:
            raise KernelTransformVanishingError(f"h({s0}) vanishes")
        self.family = disc.family
        red = disc.reduced_blocks
        st = disc.strip
        self.ncu = st.ny * (st.nx - 1)

        def DM1(s):
            kappa = disc.hhat(s) / self.h0
            top11 = red["E_minus_B"][0] - red["G"][0] / self.h0 + kappa * red["B"][0]
            top12 = red["E_minus_B"][1] - red["G"][1] / self.h0 + kappa * red["B"][1]
            top = np.hstack([top11, top12 @ alpha_basis(st.y, s)])
            return np.vstack([top, np.zeros((2, self.ncu + 2), dtype=complex)])

        self.DM1 = DM1
        inner = fredholm_witness(lambda s: None, s0, rank_tol=cont_cfg.witness_rank_tol, left_applied=DM1,
                                 svd=cont_cfg.svd, seed=cont_cfg.seed)
        self.inner = inner
        self.witness = FiniteTypeWitness(disc.n, inner.dim_L, lambda s: disc.embed(inner(s), s), s0,
                                         info=dict(inner.info, split=True))
        t1 = time.perf_counter()
        self.solution = continue_unique_solution(self.family, self.witness, self.uniqueness_samples,
                                                 self.probe_grid, rank_tol=cont_cfg.rank_tol,
                                                 tol=cont_cfg.residual_tol, denom_floor=cont_cfg.denom_floor,
                                                 normalize_denominator=True)
        self.timings = {"witness": t1 - t0, "continuation": time.perf_counter() - t1}

    def denominator(self, s) -> complex:
        return self.solution.denominator(s)

    def m_value(self, s) -> complex:
        """m(s) = (m-coefficient of the numerator) / d(s), without acceptance checks."""
        sol = self.solution
        N = sol.numerator(s)
        ct = self.disc.level_means(N)
        lv = self.disc.fit_levels
        _, m_num, _ = constant_term_fit(self.disc.strip.y[lv], ct[lv], s, self.disc.strip.level_weights[lv])
        return m_num / sol.denominator(s)

    def evaluate(self, s, check: bool = True) -> ContinuationResult:
        t0 = time.perf_counter()
        s = complex(s)
        disc, cfg = self.disc, self.cfg
        disc.check_band([s])
        v = self.solution.value(s)          # raises PoleProximityError near zeros of d
        res = self.solution.residuals(s, v)
        res_max = {name: float(np.max(r)) if r.size else 0.0 for name, r in res.items()}
        worst = max(res_max.values())
        ct = disc.level_means(v)
        lv = disc.fit_levels
        y = disc.strip.y
        A, m, fit_res = constant_term_fit(y[lv], ct[lv], s, disc.strip.level_weights[lv])
        diff_res = difference_operator_residual(ct[lv], y[lv], s)
        notes = [OMITTED_EQUATIONS_NOTE]
        if check and worst > cfg.residual_tol:
            raise ResidualFailureError(f"max residual {worst:.3e} > {cfg.residual_tol:.1e} at s={s}")
        if check and fit_res > cfg.fit_tol:
            raise FitFailureError(f"constant term leaves span{{y^s, y^(1-s)}}: fit residual {fit_res:.3e}")
        psi = v[disc.xmaps.x_nodes]
        grid = dict(asdict(disc.grid_cfg), kernel=asdict(disc.kernel_cfg), x_grid_size=int(psi.size))
        timings = dict(self.timings, evaluate=time.perf_counter() - t0)
        return ContinuationResult(s=s, psi=psi, m_estimate=m, A_estimate=A, fit_residual=fit_res,
                                  residuals=res_max, max_residual=worst,
                                  denominator_value=self.solution.denominator(s),
                                  D1_value=self.solution.D1(s), k=self.solution.k,
                                  rank_F=int(self.inner.info["rank_F"]), difference_residual=diff_res,
                                  constant_term=ct, solution=v, chart_center=self.s0, grid=grid,
                                  notes=notes, timings=timings)


def make_chart(s0, config: RunConfig | None = None) -> EisensteinChart:
    config = (config or RunConfig()).validate()
    cc = config.continuation
    disc = get_discretization(config.grid, config.kernel, cc.extra_triples, cc.seed)
    return EisensteinChart(disc, s0, cc)


def continue_eisenstein(s, config: RunConfig | None = None) -> ContinuationResult:
    """Continued E(.; s) and m(s) from a chart centered at s itself."""
    return make_chart(s, config).evaluate(s)


# ------------------------------------------------------------------ the pole

@dataclass
class PoleReport:
    location: complex
    residue: complex
    scan: list
    denominator_at_pole: complex
    contour_radius: float


def locate_pole(config: RunConfig | None = None, re_range=(0.9, 1.1), n_scan: int = 21,
                chart_center: complex = 1.0 + 0.15j, contour_radius: float = 0.05,
                contour_points: int = 12) -> PoleReport:
    """Zero of the continued denominator on the real segment ``re_range`` and
    the residue of m there from a contour mean of (s - s*) m(s)."""
    chart = make_chart(chart_center, config)
    xs = np.linspace(re_range[0], re_range[1], n_scan)
    scan = [(float(x), chart.denominator(x)) for x in xs]
    mags = np.array([abs(d) for _, d in scan])
    j = int(np.argmin(mags))
    s_a, s_b = complex(xs[j]), complex(xs[j] + 0.5 * (xs[1] - xs[0]))
    f_a, f_b = chart.denominator(s_a), chart.denominator(s_b)
    for _ in range(40):
        if f_b == f_a:
            break
        s_c = s_b - f_b * (s_b - s_a) / (f_b - f_a)
        s_a, f_a, s_b, f_b = s_b, f_b, s_c, chart.denominator(s_c)
        if abs(s_b - s_a) < 1e-13:
            break
    star = s_b
    thetas = 2 * math.pi * (np.arange(contour_points) + 0.5) / contour_points
    vals = [chart.m_value(star + contour_radius * cmath.exp(1j * t)) * contour_radius * cmath.exp(1j * t)
            for t in thetas]
    return PoleReport(star, complex(np.mean(vals)), scan, f_b, contour_radius)


# ------------------------------------------------------------ compactness

@dataclass
class CompactnessReport:
    singular_values: np.ndarray
    frobenius: float
    k0: int
    tail_threshold: float
    grid: dict
    margin: float = 0.05


def hs_compactness_report(kernel_cfg: KernelConfig | None = None, grid_cfg: GridConfig | None = None,
                          N: float | None = None, tail_threshold: float = 1e-3,
                          margin: float = 0.05) -> CompactnessReport:
    """Singular values of (I - C) K (I - C) from the weighted space on [c, y_max]
    to the weighted space on [c0, y_cusp], with y^(-2N) mu quadrature weights.

    ``k0`` counts singular values above ``(1 - margin) * tail_threshold * sigma_1``.
    Values sitting within the discretization error of the threshold would
    otherwise flip in and out of the count under refinement."""
    kernel_cfg = kernel_cfg or KernelConfig()
    grid_cfg = grid_cfg or GridConfig()
    if N is not None:
        grid_cfg = GridConfig(**dict(asdict(grid_cfg), N=float(N)))
    kernel = RadialKernel(kernel_cfg.radius, kernel_cfg.shape, kernel_cfg.power)
    g = grid_cfg
    src = StripGrid(g.c, g.y_max, g.nx, g.ny, g.N)
    dst, _ = src.restrict(g.c0, g.y_cusp)
    K = build_conv_op(kernel, src, dst).matrix

    def cusp_free_rows(M, grid):
        R = M.reshape(grid.ny, grid.nx, -1)
        return (R - R.mean(axis=1, keepdims=True)).reshape(M.shape)

    Kc = cusp_free_rows(K, dst)
    Kc = cusp_free_rows(Kc.T, src).T
    # K already carries the mu-weights in its columns; pass to orthonormal frames of both spaces
    A = np.sqrt(dst.weights_N)[:, None] * Kc / np.sqrt(src.weights_N)[None, :]
    sv = np.linalg.svd(A, compute_uv=False)
    k0 = int(np.sum(sv > (1 - margin) * tail_threshold * sv[0]))
    return CompactnessReport(sv, float(np.sqrt(np.sum(sv ** 2))), k0, tail_threshold,
                             dict(asdict(g), kernel=asdict(kernel_cfg)), margin)
