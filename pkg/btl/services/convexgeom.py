"""
Planar convex polygon geometry: inradius (Chebyshev center), high ridge,
proximal radius, circumradius, diameter and the second moment I_#.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

from btl.models.reports import ConvexGeometrySummary, HighRidge, RidgeKind

logger = logging.getLogger(__name__)

CONVEXITY_TOL = 1e-12
ACTIVE_TOL = 1e-9
RIDGE_POINT_TOL = 1e-9
PROXIMAL_ITERATIONS = 200


class DegeneratePolygonError(ValueError):
    """Polygon is not a valid strictly convex counter-clockwise polygon."""


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Strictly convex polygon with counter-clockwise vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise DegeneratePolygonError(f"Vertices must be an (n, 2) array, got shape {vertices.shape}")
        if vertices.shape[0] < 3:
            raise DegeneratePolygonError(f"A polygon needs at least 3 vertices, got {vertices.shape[0]}")
        if not np.all(np.isfinite(vertices)):
            raise DegeneratePolygonError("Vertices must be finite")
        vertices.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)

        scale = self.scale
        if np.min(pdist(vertices)) <= CONVEXITY_TOL * scale:
            raise DegeneratePolygonError("Polygon has repeated vertices")

        edges = self.edges
        following = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * following[:, 1] - edges[:, 1] * following[:, 0]
        if np.any(cross <= CONVEXITY_TOL * scale * scale):
            bad = int(np.argmin(cross))
            raise DegeneratePolygonError(
                f"Polygon is not strictly convex and counter-clockwise at vertex {(bad + 1) % len(vertices)}"
            )
        dot = np.sum(edges * following, axis=1)
        turning = float(np.sum(np.arctan2(cross, dot)))
        if abs(turning - 2.0 * math.pi) > 1e-6:
            raise DegeneratePolygonError(f"Boundary winds {turning / (2 * math.pi):.3f} times; polygon is self-intersecting")

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]]) -> "ConvexPolygon":
        """Convex hull of a point set, counter-clockwise."""
        points = np.asarray(points, dtype=float)
        try:
            hull = ConvexHull(points)
        except Exception as e:
            raise DegeneratePolygonError(f"Convex hull failed: {e}") from e
        return cls(points[hull.vertices])

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def scale(self) -> float:
        return float(np.max(pdist(self.vertices)))

    @property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(self.edges[:, 0], self.edges[:, 1])

    @property
    def normals(self) -> np.ndarray:
        """Outward unit normals, one per edge."""
        edges = self.edges
        return np.column_stack([edges[:, 1], -edges[:, 0]]) / self.edge_lengths[:, None]

    @property
    def offsets(self) -> np.ndarray:
        """Support values b_i with the polygon equal to {x : n_i . x <= b_i}."""
        return np.sum(self.normals * self.vertices, axis=1)

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.edge_lengths))

    @property
    def area(self) -> float:
        return _polygon_moments(self.vertices)[0]

    @property
    def barycenter(self) -> np.ndarray:
        area, first, _ = _polygon_moments(self.vertices)
        return first / area

    def scaled(self, factor: float) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices * factor)

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all(points @ self.normals.T <= self.offsets + tol, axis=1)


def regular_polygon(n: int, circumradius: float = 1.0, center: Sequence[float] = (0.0, 0.0),
                    rotation: float = 0.0) -> ConvexPolygon:
    angles = rotation + 2.0 * math.pi * np.arange(n) / n
    return ConvexPolygon(np.column_stack([
        center[0] + circumradius * np.cos(angles),
        center[1] + circumradius * np.sin(angles),
    ]))


def rectangle_polygon(half_lengths: Sequence[float], center: Sequence[float] = (0.0, 0.0)) -> ConvexPolygon:
    lx, ly = half_lengths
    cx, cy = center
    return ConvexPolygon([[cx - lx, cy - ly], [cx + lx, cy - ly], [cx + lx, cy + ly], [cx - lx, cy + ly]])


def right_triangle(n: int) -> ConvexPolygon:
    """T_n: hypotenuse (-1,0)-(1,0), right angle at (cos t, sin t) with t = 1/(n+1)."""
    theta = 1.0 / (n + 1)
    return ConvexPolygon([[-1.0, 0.0], [1.0, 0.0], [math.cos(theta), math.sin(theta)]])


def random_convex_polygon(rng: np.random.Generator, n_points: int = 20) -> ConvexPolygon:
    """Hull of uniform random points in the square (-1, 1)^2."""
    return ConvexPolygon.from_points(rng.uniform(-1.0, 1.0, size=(n_points, 2)))


def _polygon_moments(vertices: np.ndarray) -> tuple[float, np.ndarray, float]:
    """
    Area, first moment and polar second moment about the origin.

    Sums the exact per-triangle integrals of the fan (origin, v_i, v_{i+1}).
    """
    x, y = vertices[:, 0], vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = float(np.sum(cross)) / 2.0
    first = np.array([np.sum((x + xn) * cross), np.sum((y + yn) * cross)]) / 6.0
    second = float(np.sum((x * x + x * xn + xn * xn + y * y + y * yn + yn * yn) * cross)) / 12.0
    return area, first, second


def polar_moment_about(poly: ConvexPolygon, point: Sequence[float]) -> float:
    """Exact integral of |x - point|^2 over the polygon."""
    point = np.asarray(point, dtype=float)
    return _polygon_moments(poly.vertices - point)[2]


def barycenter_moment(poly: ConvexPolygon) -> float:
    """Polar moment about the barycenter, the minimum over all points of the plane."""
    return polar_moment_about(poly, poly.barycenter)


def distance_to_boundary(poly: ConvexPolygon, points: np.ndarray) -> np.ndarray | float:
    """Minimum point-to-edge-segment distance; accepts a point or an (k, 2) array."""
    points_arr = np.asarray(points, dtype=float)
    single = points_arr.ndim == 1
    pts = np.atleast_2d(points_arr)

    start = poly.vertices[None, :, :]
    edge = poly.edges[None, :, :]
    rel = pts[:, None, :] - start
    t = np.clip(np.sum(rel * edge, axis=2) / np.sum(edge * edge, axis=2), 0.0, 1.0)
    foot = start + t[:, :, None] * edge
    distances = np.min(np.linalg.norm(pts[:, None, :] - foot, axis=2), axis=1)
    return float(distances[0]) if single else distances


def ray_extent(poly: ConvexPolygon, center: Sequence[float], angles: np.ndarray) -> np.ndarray:
    """Distance from an interior center to the boundary along each direction angle."""
    center = np.asarray(center, dtype=float)
    directions = np.column_stack([np.cos(angles), np.sin(angles)])
    proj = directions @ poly.normals.T
    room = poly.offsets - poly.normals @ center
    with np.errstate(divide="ignore", invalid="ignore"):
        limits = np.where(proj > 0.0, room[None, :] / proj, np.inf)
    return np.min(limits, axis=1)


def inradius_and_chebyshev(poly: ConvexPolygon) -> tuple[float, np.ndarray]:
    """
    Largest inscribed disk: maximise t subject to n_i . x + t <= b_i.

    The radius returned is re-evaluated at the LP witness, so the witness disk
    fits exactly.
    """
    normals, offsets = poly.normals, poly.offsets
    objective = np.array([0.0, 0.0, -1.0])
    constraints = np.column_stack([normals, np.ones(poly.n_vertices)])
    result = linprog(
        objective,
        A_ub=constraints,
        b_ub=offsets,
        bounds=[(None, None), (None, None), (0, None)],
        method="highs-ds",
    )
    if result.status != 0 or result.x is None:
        raise DegeneratePolygonError(f"Inradius LP failed: {result.message}")

    witness = np.asarray(result.x[:2], dtype=float)
    radius = float(np.min(offsets - normals @ witness))
    if radius <= 0.0:
        raise DegeneratePolygonError(f"Polygon has no interior (inradius {radius})")
    return radius, witness


def high_ridge(poly: ConvexPolygon) -> HighRidge:
    """
    Optimal set of the inradius problem.

    At the LP optimum the ridge is a segment exactly when two antiparallel
    edges are both active; the segment then runs along those edges and is cut
    off by the remaining offset halfplanes n_k . x <= b_k - r.
    """
    radius, witness = inradius_and_chebyshev(poly)
    normals, offsets = poly.normals, poly.offsets
    scale = poly.scale
    room = offsets - radius - normals @ witness
    active = np.flatnonzero(room <= ACTIVE_TOL * scale)

    direction: Optional[np.ndarray] = None
    for a in active:
        for b in active:
            if a < b and normals[a] @ normals[b] < -1.0 + 1e-10:
                direction = np.array([-normals[a][1], normals[a][0]])
                break
        if direction is not None:
            break

    if direction is None:
        return HighRidge(kind=RidgeKind.POINT, endpoints=[tuple(witness)])

    proj = normals @ direction
    ahead = proj > 1e-12
    behind = proj < -1e-12
    s_high = float(np.min(room[ahead] / proj[ahead])) if np.any(ahead) else 0.0
    s_low = float(np.max(room[behind] / proj[behind])) if np.any(behind) else 0.0

    if s_high - s_low <= RIDGE_POINT_TOL * scale:
        middle = witness + 0.5 * (s_low + s_high) * direction
        return HighRidge(kind=RidgeKind.POINT, endpoints=[tuple(middle)])

    start = witness + s_low * direction
    end = witness + s_high * direction
    logger.debug(f"High ridge is a segment of length {s_high - s_low:.6g}")
    return HighRidge(kind=RidgeKind.SEGMENT, endpoints=[tuple(start), tuple(end)])


def _max_vertex_distance(poly: ConvexPolygon, point: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(poly.vertices - point, axis=1)))


def proximal_radius(poly: ConvexPolygon, ridge: Optional[HighRidge] = None) -> tuple[float, np.ndarray]:
    """Minimum over the high ridge of the farthest-vertex distance, and its minimiser."""
    ridge = ridge or high_ridge(poly)
    if ridge.kind == RidgeKind.POINT:
        center = np.asarray(ridge.endpoints[0])
        return _max_vertex_distance(poly, center), center

    start, end = (np.asarray(p) for p in ridge.endpoints)
    direction = end - start

    def farthest(s: float) -> float:
        return _max_vertex_distance(poly, start + s * direction)

    # convex along the segment
    low, high = 0.0, 1.0
    for _ in range(PROXIMAL_ITERATIONS):
        left = low + (high - low) / 3.0
        right = high - (high - low) / 3.0
        if farthest(left) < farthest(right):
            high = right
        else:
            low = left
    center = start + 0.5 * (low + high) * direction
    return _max_vertex_distance(poly, center), center


def _circle_two(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    center = 0.5 * (a + b)
    return center, float(max(np.linalg.norm(a - center), np.linalg.norm(b - center)))


def _circle_three(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> Optional[tuple[np.ndarray, float]]:
    origin = (np.minimum(np.minimum(a, b), c) + np.maximum(np.maximum(a, b), c)) / 2.0
    ax, ay = a - origin
    bx, by = b - origin
    cx, cy = c - origin
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        return None
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    center = origin + np.array([ux, uy])
    radius = max(np.linalg.norm(p - center) for p in (a, b, c))
    return center, float(radius)


def _inside(circle: tuple[np.ndarray, float], point: np.ndarray) -> bool:
    center, radius = circle
    return float(np.linalg.norm(point - center)) <= radius * (1.0 + 1e-14)


def _circle_with_two(points: np.ndarray, p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, float]:
    base = _circle_two(p, q)
    left = right = None
    chord = q - p
    for r in points:
        if _inside(base, r):
            continue
        side = chord[0] * (r - p)[1] - chord[1] * (r - p)[0]
        candidate = _circle_three(p, q, r)
        if candidate is None:
            continue
        offset = chord[0] * (candidate[0] - p)[1] - chord[1] * (candidate[0] - p)[0]
        if side > 0.0 and (left is None or offset > chord[0] * (left[0] - p)[1] - chord[1] * (left[0] - p)[0]):
            left = candidate
        elif side < 0.0 and (right is None or offset < chord[0] * (right[0] - p)[1] - chord[1] * (right[0] - p)[0]):
            right = candidate
    if left is None and right is None:
        return base
    if left is None:
        return right
    if right is None:
        return left
    return left if left[1] <= right[1] else right


def _circle_with_one(points: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, float]:
    circle = (p.copy(), 0.0)
    for i, q in enumerate(points):
        if not _inside(circle, q):
            if circle[1] == 0.0:
                circle = _circle_two(p, q)
            else:
                circle = _circle_with_two(points[:i + 1], p, q)
    return circle


def circumradius(poly: ConvexPolygon) -> tuple[float, np.ndarray]:
    """Minimum enclosing circle of the vertices (incremental Welzl, fixed order)."""
    points = poly.vertices
    circle: Optional[tuple[np.ndarray, float]] = None
    for i, p in enumerate(points):
        if circle is None or not _inside(circle, p):
            circle = _circle_with_one(points[:i + 1], p)
    center, radius = circle
    return radius, center


def diameter(poly: ConvexPolygon) -> float:
    return poly.scale


def moment_sharp(poly: ConvexPolygon, ridge: Optional[HighRidge] = None) -> float:
    """
    I_# = min over the high ridge of the polar moment.

    The moment is a convex quadratic along the ridge, minimised at the
    projection of the barycenter (clamped to the segment).
    """
    ridge = ridge or high_ridge(poly)
    if ridge.kind == RidgeKind.POINT:
        return polar_moment_about(poly, ridge.endpoints[0])

    start, end = (np.asarray(p) for p in ridge.endpoints)
    direction = end - start
    s = float(np.clip((poly.barycenter - start) @ direction / (direction @ direction), 0.0, 1.0))
    return polar_moment_about(poly, start + s * direction)


def inner_parallel_polygon(poly: ConvexPolygon, t: float) -> np.ndarray:
    """
    Vertices of {x : n_i . x <= b_i - t}, by clipping against each offset halfplane.

    Returns an (k, 2) array; k < 3 when the set is empty or degenerate.
    """
    current = [np.asarray(v) for v in poly.vertices]
    for normal, offset in zip(poly.normals, poly.offsets):
        if not current:
            break
        limit = offset - t
        clipped = []
        for i, p in enumerate(current):
            q = current[(i + 1) % len(current)]
            fp = limit - normal @ p
            fq = limit - normal @ q
            if fp >= 0.0:
                clipped.append(p)
            if fp * fq < 0.0:
                clipped.append(p + (fp / (fp - fq)) * (q - p))
        current = clipped
    return np.array(current).reshape(-1, 2)


def parallel_perimeter(poly: ConvexPolygon, t: float) -> float:
    """Boundary length of the inner parallel set at distance t."""
    vertices = inner_parallel_polygon(poly, t)
    if len(vertices) < 2:
        return 0.0
    closed = np.vstack([vertices, vertices[:1]])
    return float(np.sum(np.linalg.norm(np.diff(closed, axis=0), axis=1)))


def summarize(poly: ConvexPolygon) -> ConvexGeometrySummary:
    radius, witness = inradius_and_chebyshev(poly)
    ridge = high_ridge(poly)
    proximal, proximal_center = proximal_radius(poly, ridge)
    outer, outer_center = circumradius(poly)
    return ConvexGeometrySummary(
        area=poly.area,
        perimeter=poly.perimeter,
        inradius=radius,
        chebyshev_center=tuple(witness),
        circumradius=outer,
        circumcenter=tuple(outer_center),
        diameter=diameter(poly),
        high_ridge=ridge,
        proximal_center=tuple(proximal_center),
        proximal_radius=proximal,
        moment_sharp=moment_sharp(poly, ridge),
        barycenter_moment=barycenter_moment(poly),
    )
