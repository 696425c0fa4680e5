"""Packaged toy families exercising both continuation modes."""
from __future__ import annotations

import numpy as np

from .engine import continue_unique_solution
from .exact import Poly, RationalFamily, solve_rational_family
from .family import FiniteTypeWitness

S = Poly.s()
ONE = Poly.const(1)
ZERO = Poly()


def _rank1():
    return RationalFamily([[S]], [S * S])


def _twobytwo():
    return RationalFamily([[ONE, S], [S, ONE]], [ONE, ZERO])


def _overdetermined():
    # the 2x2 system plus (row1 + s*row2) and (s^2*row1 - row2)
    A = [[ONE, S], [S, ONE], [ONE + S * S, S + S], [S * S - S, S * S * S - ONE]]
    b = [ONE, ZERO, ONE, S * S]
    return RationalFamily(A, b)


def _rational3():
    # determinant (s - 2)(s^2 + 1)
    A = [[S - 2, ONE, ZERO], [ZERO, S, ONE], [ZERO, -ONE, S]]
    return RationalFamily(A, [ONE, ZERO, ONE])


DEMO_CASES = {
    "rank1": (_rank1, []),
    "twobytwo": (_twobytwo, [1.0, -1.0]),
    "overdetermined": (_overdetermined, [1.0, -1.0]),
    "rational3": (_rational3, [2.0, 1j, -1j]),
}


def demo_family(case: str) -> RationalFamily:
    if case not in DEMO_CASES:
        raise KeyError(f"unknown demo case {case!r}; choose from {sorted(DEMO_CASES)}")
    return DEMO_CASES[case][0]()


def numeric_solution(fam: RationalFamily, unq_region=(0.3 + 0.2j, 2.5 - 0.7j), probe_grid=(0.1 + 0.37j,), **kw):
    """Numeric continuation of a rational family with the identity witness."""
    analytic = fam.to_analytic()
    return continue_unique_solution(analytic, FiniteTypeWitness.identity(fam.dim), list(unq_region),
                                    list(probe_grid), **kw)


def run_demo(case: str, samples=(0.5, 0.3 + 0.4j, 3.0)) -> dict:
    fam = demo_family(case)
    exact = solve_rational_family(fam)
    sol = numeric_solution(fam)
    rows = []
    for s in samples:
        s = complex(s)
        v_num = sol.value(s)
        v_ex = np.array([complex(x) for x in exact(s)])
        rows.append({"s": [s.real, s.imag],
                     "v_numeric": [[z.real, z.imag] for z in v_num],
                     "v_exact": [[z.real, z.imag] for z in v_ex],
                     "rel_diff": float(np.linalg.norm(v_num - v_ex) / max(np.linalg.norm(v_ex), 1e-300)),
                     "d": [sol.denominator(s).real, sol.denominator(s).imag]})
    poles = sorted(exact.poles(), key=lambda z: (z.real, z.imag))
    return {
        "case": case,
        "exact": {**exact.as_dict(), "values": [repr(v) for v in exact.values]},
        "poles": [[p.real, p.imag] for p in poles],
        "numeric": {"k": sol.k, "s2": [sol.s2.real, sol.s2.imag], "samples": rows},
    }
