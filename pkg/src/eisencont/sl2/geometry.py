"""Upper half-plane geometry for SL2(Z)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0):
            raise ValueError(f"point must lie in the upper half-plane (y={self.y})")

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(float(z.real), float(z.imag))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def act(gamma, z: complex) -> complex:
    """Mobius action of a 2x2 integer matrix on z."""
    (a, b), (c, d) = gamma
    return (a * z + b) / (c * z + d)


def matmul(g, h):
    return ((g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
            (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]))


IDENTITY = ((1, 0), (0, 1))
_S = ((0, -1), (1, 0))


def reduce_to_fundamental(point, max_steps: int = 10_000):
    """Standard representative in |x| <= 1/2, |z| >= 1 and the SL2(Z) matrix
    carrying the input there.  Boundary ties go to the copy with x >= 0.
    """
    z = point.z if isinstance(point, HPoint) else complex(point)
    if z.imag <= 0:
        raise ValueError("point must lie in the upper half-plane")
    g = IDENTITY
    for _ in range(max_steps):
        n = math.floor(z.real + 0.5)
        if n:
            z = z - n
            g = matmul(((1, -n), (0, 1)), g)
        if abs(z) ** 2 < 1.0 - 1e-15:
            z = -1.0 / z
            g = matmul(_S, g)
        else:
            break
    # ties: x = -1/2 -> +1/2, left half of the unit arc -> right half
    if z.real <= -0.5 + 1e-15:
        z = z + 1
        g = matmul(((1, 1), (0, 1)), g)
    if z.real < 0 and abs(abs(z) - 1.0) <= 1e-15:
        z = -1.0 / z
        g = matmul(_S, g)
    return HPoint(z.real, z.imag), g


def height(point) -> float:
    """w1(z) = max over SL2(Z) of Im(gamma z)."""
    return reduce_to_fundamental(point)[0].y


def cosh_distance_minus_one(x1, y1, x2, y2):
    """cosh d(z1, z2) - 1 = |z1 - z2|^2 / (2 y1 y2)."""
    return ((x1 - x2) ** 2 + (y1 - y2) ** 2) / (2.0 * y1 * y2)


def hyperbolic_distance(z1: complex, z2: complex) -> float:
    return float(np.arccosh(1.0 + cosh_distance_minus_one(z1.real, z1.imag, z2.real, z2.imag)))
