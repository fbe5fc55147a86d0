"""
Polynomial conformal maps f(z) = x0 + sum_k a_k z^k of the unit disk and the
Hardy-space boundary mean of |f'| used by the conformal lower bound.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from shapely.geometry import LinearRing

logger = logging.getLogger(__name__)

QUADRATURE_SAMPLES = 4096
VALIDATION_SAMPLES = 1024
JACOBIAN_RINGS = 32


class ConformalMapError(ValueError):
    """Map is not a valid conformal parametrisation of a simply connected domain."""


@dataclass(frozen=True, eq=False)
class ConformalMap:
    """Coefficients a_1..a_K (complex) and the image of the origin."""

    coefficients: np.ndarray
    offset: complex = 0j

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=complex).ravel()
        if coefficients.size == 0:
            raise ConformalMapError("At least one coefficient is required")
        if not np.all(np.isfinite(coefficients)):
            raise ConformalMapError("Coefficients must be finite")
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "offset", complex(self.offset))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, float]], offset: Tuple[float, float] = (0.0, 0.0)) -> "ConformalMap":
        """Build from [re, im] pairs as stored in domain files."""
        coefficients = np.array([complex(re, im) for re, im in pairs])
        return cls(coefficients, complex(offset[0], offset[1]))

    @property
    def degree(self) -> int:
        return int(self.coefficients.size)

    @property
    def _power_series(self) -> np.ndarray:
        return np.concatenate([[self.offset], self.coefficients])

    def __call__(self, z):
        return P.polyval(np.asarray(z, dtype=complex), self._power_series)

    def derivative(self, z):
        return P.polyval(np.asarray(z, dtype=complex), P.polyder(self._power_series))

    def map_points(self, points: np.ndarray) -> np.ndarray:
        """Map an (n, 2) array of disk points to an (n, 2) array of image points."""
        w = self(points[:, 0] + 1j * points[:, 1])
        return np.column_stack([w.real, w.imag])

    def boundary_samples(self, samples: int = QUADRATURE_SAMPLES) -> np.ndarray:
        theta = 2.0 * math.pi * np.arange(samples) / samples
        w = self(np.exp(1j * theta))
        return np.column_stack([w.real, w.imag])

    def validate(self, samples: int = VALIDATION_SAMPLES) -> "ConformalMap":
        """Check a_1 != 0, |f'| > 0 on a sampled closed disk and a simple boundary curve."""
        if abs(self.coefficients[0]) == 0.0:
            raise ConformalMapError("Leading coefficient a_1 must be nonzero")

        radii = np.linspace(0.0, 1.0, JACOBIAN_RINGS + 1)
        theta = 2.0 * math.pi * np.arange(samples) / samples
        grid = radii[:, None] * np.exp(1j * theta)[None, :]
        jacobian = np.abs(self.derivative(grid)) ** 2
        if jacobian.min() <= 0.0:
            raise ConformalMapError(f"Jacobian |f'|^2 vanishes on the closed disk (min {jacobian.min():.3e})")

        ring = LinearRing(self.boundary_samples(samples))
        if not ring.is_simple:
            raise ConformalMapError("Boundary curve f(e^{i theta}) self-intersects")
        return self


def hardy_norm(cmap: ConformalMap) -> float:
    """(sum_k k^2 |a_k|^2)^(1/2), the H^2 boundary mean of |f'|."""
    k = np.arange(1, cmap.degree + 1)
    return float(math.sqrt(np.sum(k ** 2 * np.abs(cmap.coefficients) ** 2)))


def hardy_norm_quadrature(cmap: ConformalMap, samples: int = QUADRATURE_SAMPLES) -> float:
    """((1/2pi) int |f'(e^{i theta})|^2 d theta)^(1/2) by the periodic trapezoidal rule."""
    theta = 2.0 * math.pi * np.arange(samples) / samples
    values = np.abs(cmap.derivative(np.exp(1j * theta))) ** 2
    return float(math.sqrt(np.mean(values)))


def radial_hardy_mean(cmap: ConformalMap, rho: float) -> float:
    """(1/2pi) int |f'(rho e^{i theta})|^2 d theta = sum_k k^2 |a_k|^2 rho^(2(k-1))."""
    if rho < 0.0 or rho > 1.0:
        raise ConformalMapError(f"rho must lie in [0, 1], got {rho}")
    k = np.arange(1, cmap.degree + 1)
    return float(np.sum(k ** 2 * np.abs(cmap.coefficients) ** 2 * rho ** (2 * (k - 1))))


def image_perimeter(cmap: ConformalMap, samples: int = QUADRATURE_SAMPLES) -> float:
    """Length of the sampled image curve."""
    return float(LinearRing(cmap.boundary_samples(samples)).length)


def image_area(cmap: ConformalMap) -> float:
    """pi sum_k k |a_k|^2, the area of f(D) for injective f."""
    k = np.arange(1, cmap.degree + 1)
    return float(math.pi * np.sum(k * np.abs(cmap.coefficients) ** 2))
