"""
Tests for planar convex polygon geometry.
Run with: pytest test_convexgeom.py
"""

import math

import numpy as np
import pytest

from btl.models.reports import RidgeKind
from btl.services.convexgeom import (
    ConvexPolygon,
    DegeneratePolygonError,
    circumradius,
    diameter,
    distance_to_boundary,
    high_ridge,
    inner_parallel_polygon,
    inradius_and_chebyshev,
    moment_sharp,
    parallel_perimeter,
    polar_moment_about,
    proximal_radius,
    random_convex_polygon,
    rectangle_polygon,
    regular_polygon,
    right_triangle,
    summarize,
)

SQUARE = rectangle_polygon([1.0, 1.0])
RECTANGLE = rectangle_polygon([2.0, 1.0])
HEXAGON = regular_polygon(6, circumradius=1.0)
EQUILATERAL = ConvexPolygon([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


def _right_triangle_inradius(n: int) -> float:
    theta = 1.0 / (n + 1)
    return math.sin(theta / 2.0) + math.cos(theta / 2.0) - 1.0


TEST_CASES = [
    {"name": "square inradius", "value": lambda: inradius_and_chebyshev(SQUARE)[0], "expected": 1.0},
    {"name": "hexagon inradius", "value": lambda: inradius_and_chebyshev(HEXAGON)[0], "expected": math.sqrt(3.0) / 2.0},
    {"name": "right triangle T_1 inradius", "value": lambda: inradius_and_chebyshev(right_triangle(1))[0],
     "expected": _right_triangle_inradius(1)},
    {"name": "right triangle T_10 inradius", "value": lambda: inradius_and_chebyshev(right_triangle(10))[0],
     "expected": _right_triangle_inradius(10)},
    {"name": "square proximal radius", "value": lambda: proximal_radius(SQUARE)[0], "expected": math.sqrt(2.0)},
    {"name": "2x1 rectangle proximal radius", "value": lambda: proximal_radius(RECTANGLE)[0], "expected": math.sqrt(5.0)},
    {"name": "square circumradius", "value": lambda: circumradius(SQUARE)[0], "expected": math.sqrt(2.0)},
    {"name": "equilateral circumradius", "value": lambda: circumradius(EQUILATERAL)[0], "expected": 1.0 / math.sqrt(3.0)},
    {"name": "T_5 circumradius (Thales)", "value": lambda: circumradius(right_triangle(5))[0], "expected": 1.0},
    {"name": "square diameter", "value": lambda: diameter(SQUARE), "expected": 2.0 * math.sqrt(2.0)},
    {"name": "hexagon diameter", "value": lambda: diameter(HEXAGON), "expected": 2.0},
    {"name": "T_7 diameter", "value": lambda: diameter(right_triangle(7)), "expected": 2.0},
    {"name": "square second moment", "value": lambda: moment_sharp(SQUARE), "expected": 8.0 / 3.0},
    {"name": "square distance at center", "value": lambda: distance_to_boundary(SQUARE, [0.0, 0.0]), "expected": 1.0},
    {"name": "square distance off center", "value": lambda: distance_to_boundary(SQUARE, [0.5, 0.0]), "expected": 0.5},
    {"name": "hexagon distance at center", "value": lambda: distance_to_boundary(HEXAGON, [0.0, 0.0]),
     "expected": math.sqrt(3.0) / 2.0},
    {"name": "square area", "value": lambda: SQUARE.area, "expected": 4.0},
    {"name": "square perimeter", "value": lambda: SQUARE.perimeter, "expected": 8.0},
]


@pytest.mark.parametrize("case", TEST_CASES, ids=[c["name"] for c in TEST_CASES])
def test_known_values(case):
    np.testing.assert_allclose(case["value"](), case["expected"], rtol=1e-9, atol=1e-12)


def test_right_triangle_inradius_matches_grid_maximum():
    poly = right_triangle(3)
    xs = np.linspace(-1.0, 1.0, 801)
    ys = np.linspace(0.0, 0.3, 301)
    grid = np.array([[x, y] for x in xs for y in ys])
    grid = grid[poly.contains(grid)]
    grid_max = float(np.max(distance_to_boundary(poly, grid)))
    radius, witness = inradius_and_chebyshev(poly)
    assert grid_max <= radius + 1e-12
    assert radius - grid_max < 2e-3
    assert np.all(poly.offsets - poly.normals @ witness >= radius - 1e-10)


RIDGE_CASES = [
    {"name": "square", "poly": SQUARE, "kind": RidgeKind.POINT, "endpoints": [(0.0, 0.0)]},
    {"name": "2x1 rectangle", "poly": RECTANGLE, "kind": RidgeKind.SEGMENT, "endpoints": [(-1.0, 0.0), (1.0, 0.0)]},
    {"name": "equilateral triangle", "poly": EQUILATERAL, "kind": RidgeKind.POINT,
     "endpoints": [(0.5, math.sqrt(3.0) / 6.0)]},
]


@pytest.mark.parametrize("case", RIDGE_CASES, ids=[c["name"] for c in RIDGE_CASES])
def test_high_ridge(case):
    ridge = high_ridge(case["poly"])
    assert ridge.kind == case["kind"]
    found = sorted(ridge.endpoints)
    np.testing.assert_allclose(np.array(found), np.array(sorted(case["endpoints"])), atol=1e-9)


def test_rectangle_ridge_endpoints_touch_three_edges():
    ridge = high_ridge(RECTANGLE)
    for point in ridge.endpoints:
        distances = RECTANGLE.offsets - RECTANGLE.normals @ np.asarray(point)
        assert np.sum(np.isclose(distances, 1.0, atol=1e-9)) == 3


def test_proximal_center_minimises_over_dense_ridge_sampling():
    ridge = high_ridge(RECTANGLE)
    start, end = (np.asarray(p) for p in ridge.endpoints)
    samples = [start + s * (end - start) for s in np.linspace(0.0, 1.0, 10001)]
    dense = min(float(np.max(np.linalg.norm(RECTANGLE.vertices - p, axis=1))) for p in samples)
    value, center = proximal_radius(RECTANGLE)
    np.testing.assert_allclose(value, dense, atol=1e-8)
    np.testing.assert_allclose(center, [0.0, 0.0], atol=1e-8)


def test_proximal_center_is_a_strict_minimiser():
    value, center = proximal_radius(RECTANGLE)
    direction = np.array([1.0, 0.0])
    for step in (1e-4, -1e-4):
        moved = center + step * direction
        assert float(np.max(np.linalg.norm(RECTANGLE.vertices - moved, axis=1))) > value


def test_right_triangle_sequence():
    proximal = [proximal_radius(right_triangle(n))[0] for n in [1, 2, 5, 10, 50, 100, 1000]]
    assert all(later > earlier for earlier, later in zip(proximal, proximal[1:]))
    assert proximal[-1] >= 1.99
    assert all(value < 2.0 for value in proximal)
    for n in [1, 10, 1000]:
        np.testing.assert_allclose(circumradius(right_triangle(n))[0], 1.0, rtol=1e-9)


def test_random_polygon_chain():
    rng = np.random.default_rng(12345)
    for _ in range(500):
        poly = random_convex_polygon(rng)
        inradius, _ = inradius_and_chebyshev(poly)
        outer, center = circumradius(poly)
        proximal, _ = proximal_radius(poly)
        diam = diameter(poly)
        assert inradius <= outer
        assert outer <= proximal + 1e-10 * poly.scale
        assert proximal < diam
        assert np.all(np.linalg.norm(poly.vertices - center, axis=1) <= outer + 1e-10 * poly.scale)


def test_circumradius_matches_exhaustive_search():
    rng = np.random.default_rng(7)
    for _ in range(50):
        poly = random_convex_polygon(rng, n_points=12)
        points = poly.vertices
        best = math.inf
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                center = 0.5 * (points[i] + points[j])
                radius = np.max(np.linalg.norm(points - center, axis=1))
                if radius <= 0.5 * np.linalg.norm(points[i] - points[j]) * (1 + 1e-12):
                    best = min(best, radius)
                for k in range(j + 1, len(points)):
                    a, b, c = points[i], points[j], points[k]
                    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
                    if abs(d) < 1e-14:
                        continue
                    ux = (a @ a * (b[1] - c[1]) + b @ b * (c[1] - a[1]) + c @ c * (a[1] - b[1])) / d
                    uy = (a @ a * (c[0] - b[0]) + b @ b * (a[0] - c[0]) + c @ c * (b[0] - a[0])) / d
                    center = np.array([ux, uy])
                    radius = np.linalg.norm(a - center)
                    if np.all(np.linalg.norm(points - center, axis=1) <= radius * (1 + 1e-12)):
                        best = min(best, radius)
        np.testing.assert_allclose(circumradius(poly)[0], best, rtol=1e-9)


def test_regular_720_gon_moment_approaches_disk():
    poly = regular_polygon(720)
    np.testing.assert_allclose(moment_sharp(poly), math.pi / 2.0, rtol=1e-3)


def test_triangle_moment_is_taken_about_incenter():
    poly = right_triangle(2)
    _, incenter = inradius_and_chebyshev(poly)
    np.testing.assert_allclose(moment_sharp(poly), polar_moment_about(poly, incenter), rtol=1e-9)


def test_square_moment_matches_grid_quadrature():
    xs = (np.arange(400) + 0.5) / 400 * 2.0 - 1.0
    gx, gy = np.meshgrid(xs, xs)
    grid_value = float(np.sum(gx ** 2 + gy ** 2)) * (2.0 / 400) ** 2
    np.testing.assert_allclose(moment_sharp(SQUARE), grid_value, rtol=1e-5)


@pytest.mark.parametrize("factor", [0.5, 2.0, 3.0])
def test_scaling_covariance(factor):
    poly = random_convex_polygon(np.random.default_rng(3))
    base, scaled = summarize(poly), summarize(poly.scaled(factor))
    for attribute in ("perimeter", "inradius", "circumradius", "diameter", "proximal_radius"):
        np.testing.assert_allclose(getattr(scaled, attribute), factor * getattr(base, attribute), rtol=1e-8)
    np.testing.assert_allclose(scaled.area, factor ** 2 * base.area, rtol=1e-10)
    np.testing.assert_allclose(scaled.moment_sharp, factor ** 4 * base.moment_sharp, rtol=1e-8)


def test_summary_chain_on_square():
    summary = summarize(SQUARE)
    assert summary.inradius <= summary.circumradius <= summary.proximal_radius + 1e-12
    assert summary.proximal_radius < summary.diameter
    assert summary.diameter <= 2.0 * summary.circumradius + 1e-12
    assert summary.moment_sharp >= summary.barycenter_moment - 1e-12


def test_inner_parallel_sets():
    np.testing.assert_allclose(parallel_perimeter(SQUARE, 0.5), 4.0, rtol=1e-12)
    np.testing.assert_allclose(parallel_perimeter(RECTANGLE, 0.5), 2.0 * (3.0 + 1.0), rtol=1e-12)
    assert len(inner_parallel_polygon(SQUARE, 1.5)) == 0
    perimeters = [parallel_perimeter(HEXAGON, t) for t in np.linspace(0.0, 0.8, 9)]
    assert all(later <= earlier + 1e-12 for earlier, later in zip(perimeters, perimeters[1:]))


def test_from_points_builds_counter_clockwise_hull():
    points = [[1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [0.0, 0.0], [0.2, 0.3]]
    poly = ConvexPolygon.from_points(points)
    assert poly.n_vertices == 4
    np.testing.assert_allclose(poly.area, 4.0)


INVALID_POLYGONS = [
    {"name": "clockwise", "vertices": [[-1, -1], [-1, 1], [1, 1], [1, -1]]},
    {"name": "collinear vertex", "vertices": [[-1, -1], [0, -1], [1, -1], [1, 1], [-1, 1]]},
    {"name": "repeated vertex", "vertices": [[-1, -1], [1, -1], [1, -1], [1, 1], [-1, 1]]},
    {"name": "non-convex", "vertices": [[-1, -1], [1, -1], [0, -0.5], [1, 1], [-1, 1]]},
    {"name": "two vertices", "vertices": [[0, 0], [1, 0]]},
]


@pytest.mark.parametrize("case", INVALID_POLYGONS, ids=[c["name"] for c in INVALID_POLYGONS])
def test_invalid_polygons(case):
    with pytest.raises(DegeneratePolygonError):
        ConvexPolygon(np.asarray(case["vertices"], dtype=float))
