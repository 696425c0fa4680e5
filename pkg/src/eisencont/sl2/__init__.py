"""The SL2(Z) Eisenstein series and its numerical meromorphic continuation."""
from .geometry import HPoint, act, cosh_distance_minus_one, height, hyperbolic_distance, reduce_to_fundamental
from .grid import (DiscretizedOp, InterpolationRangeError, StripGrid, SupportViolationError, XMaps,
                   build_conv_op, constant_term, constant_term_matrix, cusp_projection_ops, strip_X_maps)
from .series import DivergenceError, constant_term_series, coprime_pairs, eisenstein_series, tail_bound
from .system import (BandTooWideError, CompactnessReport, ContinuationResult, EisensteinChart, FitFailureError,
                     KernelTransformVanishingError, PoleReport, ResidualFailureError, Sl2Discretization,
                     alpha_basis, assemble_auxiliary_system, constant_term_fit, continue_eisenstein,
                     difference_operator_residual, get_discretization, hs_compactness_report, locate_pole,
                     make_chart)
