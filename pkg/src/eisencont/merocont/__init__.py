"""Meromorphic continuation of unique solutions of analytic linear families."""
from .family import AnalyticLinearFamily, EquationBlock, FiniteTypeWitness
from .engine import (MeromorphicSolution, NoUniqueSolutionError, NotFredholmError, PoleProximityError,
                     WitnessViolationError, continue_unique_solution, fredholm_split_witness, fredholm_witness)
from .exact import (ExactSolution, InconsistentFamilyError, Poly, RationalFamily, RationalFunction,
                    UnderdeterminedFamilyError, solve_rational_family, square_free_factorization)
from .demos import DEMO_CASES, demo_family
