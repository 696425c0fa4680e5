"""Meromorphic continuation of unique solutions of analytic linear systems,
with the SL2(Z) Eisenstein series as the worked example."""
from .config import RunConfig, load_config
from .specfn import RadialKernel, SingularityError, gamma, m_closed, selberg_transform, zeta

__version__ = "0.1.0"
