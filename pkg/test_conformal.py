"""
Tests for polynomial conformal maps of the unit disk.
Run with: pytest test_conformal.py
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from btl.models.domain_types import DomainSpec
from btl.services.conformal import (
    ConformalMap,
    ConformalMapError,
    hardy_norm,
    hardy_norm_quadrature,
    image_area,
    image_perimeter,
    radial_hardy_mean,
)

TEST_CASES = [
    {"name": "dilation R z", "coefficients": [2.5], "expected": 2.5},
    {"name": "rotated dilation", "coefficients": [1.5j], "expected": 1.5},
    {"name": "z + 0.1 z^2", "coefficients": [1.0, 0.1], "expected": math.sqrt(1.04)},
    {"name": "z + 0.05 z^3", "coefficients": [1.0, 0.0, 0.05], "expected": math.sqrt(1.0 + 9.0 * 0.05 ** 2)},
    {"name": "complex coefficients", "coefficients": [1.0 + 0.5j, 0.2j], "expected": math.sqrt(1.25 + 4.0 * 0.04)},
]


@pytest.mark.parametrize("case", TEST_CASES, ids=[c["name"] for c in TEST_CASES])
def test_hardy_norm(case):
    cmap = ConformalMap(np.array(case["coefficients"], dtype=complex))
    np.testing.assert_allclose(hardy_norm(cmap), case["expected"], rtol=1e-12)
    np.testing.assert_allclose(hardy_norm_quadrature(cmap), case["expected"], rtol=1e-10)


def test_quadrature_agrees_on_random_maps():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        degree = int(rng.integers(1, 6))
        coefficients = rng.normal(size=degree) + 1j * rng.normal(size=degree)
        coefficients[0] += 3.0
        cmap = ConformalMap(coefficients)
        np.testing.assert_allclose(hardy_norm_quadrature(cmap), hardy_norm(cmap), rtol=1e-8)


@pytest.mark.parametrize("coefficients", [[1.0], [1.0, 0.1], [1.0, 0.0, 0.1], [2.0, 0.3j, 0.1]])
def test_area_is_bounded_by_hardy_disk(coefficients):
    cmap = ConformalMap(np.array(coefficients, dtype=complex))
    rho = hardy_norm(cmap)
    assert image_area(cmap) <= math.pi * rho ** 2 * (1.0 + 1e-12)


def test_dilation_image():
    cmap = ConformalMap(np.array([2.0]))
    np.testing.assert_allclose(image_area(cmap), 4.0 * math.pi, rtol=1e-12)
    np.testing.assert_allclose(image_area(cmap), math.pi * hardy_norm(cmap) ** 2, rtol=1e-12)
    np.testing.assert_allclose(image_perimeter(cmap), 4.0 * math.pi, rtol=1e-5)


def test_image_area_matches_sampled_polygon():
    cmap = ConformalMap(np.array([1.0, 0.2]))
    samples = cmap.boundary_samples(8192)
    x, y = samples[:, 0], samples[:, 1]
    shoelace = 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    np.testing.assert_allclose(image_area(cmap), shoelace, rtol=1e-6)


def test_radial_mean_is_monotone_and_ends_at_hardy_norm():
    cmap = ConformalMap(np.array([1.0, 0.2, 0.05j]))
    rhos = np.linspace(0.0, 1.0, 21)
    means = [radial_hardy_mean(cmap, rho) for rho in rhos]
    assert all(later >= earlier for earlier, later in zip(means, means[1:]))
    np.testing.assert_allclose(means[0], 1.0, rtol=1e-12)
    np.testing.assert_allclose(means[-1], hardy_norm(cmap) ** 2, rtol=1e-12)


def test_offset_translates_the_image():
    cmap = ConformalMap.from_pairs([(1.0, 0.0), (0.1, 0.0)], offset=(3.0, -1.0))
    np.testing.assert_allclose(cmap(0.0), 3.0 - 1.0j)
    np.testing.assert_allclose(hardy_norm(cmap), math.sqrt(1.04), rtol=1e-12)


ERROR_CASES = [
    {"name": "vanishing leading coefficient", "call": lambda: ConformalMap(np.array([0.0, 1.0])).validate()},
    {"name": "no coefficients", "call": lambda: ConformalMap(np.array([], dtype=complex))},
    {"name": "non-finite coefficient", "call": lambda: ConformalMap(np.array([1.0, np.nan]))},
    {"name": "self-intersecting boundary", "call": lambda: ConformalMap(np.array([1.0, 0.9])).validate()},
    {"name": "rho outside [0, 1]", "call": lambda: radial_hardy_mean(ConformalMap(np.array([1.0])), 1.5)},
]


@pytest.mark.parametrize("case", ERROR_CASES, ids=[c["name"] for c in ERROR_CASES])
def test_invalid_maps(case):
    with pytest.raises(ConformalMapError):
        case["call"]()


def test_valid_map_passes():
    cmap = ConformalMap(np.array([1.0, 0.1]))
    assert cmap.validate() is cmap


def test_domain_file_rejects_non_injective_map():
    with pytest.raises(ValidationError):
        DomainSpec.mapped_disk([1.0, 0.9])
    assert DomainSpec.mapped_disk([1.0, 0.1]).params.coefficients[1] == (0.1, 0.0)
