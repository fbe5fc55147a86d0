"""
Triangulations of planar domains with uniform quadrisection refinement and
boundary bookkeeping (edges, outward normals, lengths) for the P1 solver.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Dict, Optional

import numpy as np
from shapely.geometry import LinearRing

from btl.config import BTL_MAX_LEVEL, BTL_MIN_ANGLE_DEG
from btl.models.domain_types import DomainKind, DomainSpec
from btl.services.conformal import ConformalMap
from btl.services.convexgeom import ConvexPolygon, rectangle_polygon

logger = logging.getLogger(__name__)

Projector = Callable[[np.ndarray], np.ndarray]

# local edge order of a triangle (a, b, c): ab, bc, ca
_LOCAL_EDGES = np.array([[0, 1], [1, 2], [2, 0]])


class MeshError(ValueError):
    """Invalid domain parameters or an invalid triangulation."""


class MeshQualityError(MeshError):
    """Triangulation too distorted for the solver."""


@dataclass(frozen=True)
class MeshQuality:
    min_angle_deg: float
    max_aspect: float


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Counter-clockwise triangles; boundary edges oriented with the domain on their left."""

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    kind: str = "polygon"
    level: int = 0
    preimage: Optional[np.ndarray] = None

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    @cached_property
    def signed_areas(self) -> np.ndarray:
        return _signed_areas(self.nodes, self.triangles)

    @property
    def area(self) -> float:
        return float(np.sum(self.signed_areas))

    @cached_property
    def boundary_vectors(self) -> np.ndarray:
        return self.nodes[self.boundary_edges[:, 1]] - self.nodes[self.boundary_edges[:, 0]]

    @cached_property
    def boundary_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.boundary_vectors, axis=1)

    @cached_property
    def boundary_normals(self) -> np.ndarray:
        """Outward unit normals (e_y, -e_x) / |e|; on an inner loop they point into the hole."""
        e = self.boundary_vectors
        return np.column_stack([e[:, 1], -e[:, 0]]) / self.boundary_lengths[:, None]

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.boundary_lengths))

    @cached_property
    def boundary_nodes(self) -> np.ndarray:
        return np.unique(self.boundary_edges)

    @cached_property
    def interior_mask(self) -> np.ndarray:
        mask = np.ones(self.n_nodes, dtype=bool)
        mask[self.boundary_nodes] = False
        return mask

    @property
    def max_edge_length(self) -> float:
        corners = self.nodes[self.triangles]
        lengths = np.linalg.norm(corners[:, [1, 2, 0]] - corners, axis=2)
        return float(lengths.max())


def _signed_areas(nodes: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a, b, c = (nodes[triangles[:, k]] for k in range(3))
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def _orient(nodes: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    triangles = np.array(triangles, dtype=np.int64)
    flip = _signed_areas(nodes, triangles) < 0.0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return triangles


def _boundary_with_owner(triangles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Edges used by exactly one triangle, in that triangle's orientation, plus the owner index."""
    directed = triangles[:, _LOCAL_EDGES].reshape(-1, 2)
    undirected = np.sort(directed, axis=1)
    _, inverse, counts = np.unique(undirected, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    single = counts[inverse] == 1
    owners = np.repeat(np.arange(triangles.shape[0]), 3)
    return directed[single], owners[single]


def _make_mesh(nodes: np.ndarray, triangles: np.ndarray, kind: str, level: int,
               preimage: Optional[np.ndarray] = None) -> TriMesh:
    triangles = np.asarray(triangles, dtype=np.int64)
    boundary, _ = _boundary_with_owner(triangles)
    return TriMesh(nodes=np.asarray(nodes, dtype=float), triangles=triangles, boundary_edges=boundary,
                   kind=kind, level=level, preimage=preimage)


def _quadrisect(nodes: np.ndarray, triangles: np.ndarray,
                project: Optional[Projector] = None) -> tuple[np.ndarray, np.ndarray]:
    """Split every triangle into four through its edge midpoints; one midpoint per shared edge."""
    n = nodes.shape[0]
    undirected = np.sort(triangles[:, _LOCAL_EDGES].reshape(-1, 2), axis=1)
    edges, inverse, counts = np.unique(undirected, axis=0, return_inverse=True, return_counts=True)
    midpoints = 0.5 * (nodes[edges[:, 0]] + nodes[edges[:, 1]])
    if project is not None:
        on_boundary = counts == 1
        midpoints[on_boundary] = project(midpoints[on_boundary])

    mid = n + inverse.reshape(-1, 3)
    a, b, c = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    ab, bc, ca = mid[:, 0], mid[:, 1], mid[:, 2]
    refined = np.concatenate([
        np.column_stack([a, ab, ca]),
        np.column_stack([ab, b, bc]),
        np.column_stack([ca, bc, c]),
        np.column_stack([ab, bc, ca]),
    ])
    return np.vstack([nodes, midpoints]), refined


def _refine_times(nodes, triangles, level: int, project: Optional[Projector] = None):
    for _ in range(level):
        nodes, triangles = _quadrisect(nodes, triangles, project)
    return nodes, triangles


def refine(mesh: TriMesh, project: Optional[Projector] = None) -> TriMesh:
    """One uniform refinement step; boundary midpoints go through ``project`` when given."""
    nodes, triangles = _quadrisect(mesh.nodes, mesh.triangles, project)
    return _make_mesh(nodes, triangles, mesh.kind, mesh.level + 1)


def _project_to_unit_circle(points: np.ndarray) -> np.ndarray:
    return points / np.linalg.norm(points, axis=1, keepdims=True)


# Level-0 templates

def _polygon_fan(poly: ConvexPolygon) -> tuple[np.ndarray, np.ndarray]:
    vertices = poly.vertices
    k = vertices.shape[0]
    nodes = np.vstack([vertices, poly.barycenter])
    triangles = np.column_stack([np.arange(k), (np.arange(k) + 1) % k, np.full(k, k)])
    return nodes, triangles


def _rectangle_grid(half_x: float, half_y: float) -> tuple[np.ndarray, np.ndarray]:
    """Criss-cross cells: each cell split into four triangles through its center."""
    nx = max(1, round(half_x / half_y))
    ny = max(1, round(half_y / half_x))
    xs = np.linspace(-half_x, half_x, nx + 1)
    ys = np.linspace(-half_y, half_y, ny + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    corners = np.column_stack([gx.ravel(), gy.ravel()])

    def corner(i: int, j: int) -> int:
        return i * (ny + 1) + j

    centers = []
    triangles = []
    for i in range(nx):
        for j in range(ny):
            c = corners.shape[0] + len(centers)
            centers.append([0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])])
            sw, se, ne, nw = corner(i, j), corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1)
            triangles += [[sw, se, c], [se, ne, c], [ne, nw, c], [nw, sw, c]]
    return np.vstack([corners, np.array(centers)]), np.array(triangles)


def _ring_zipper(inner: np.ndarray, inner_angles: np.ndarray,
                 outer: np.ndarray, outer_angles: np.ndarray) -> list[list[int]]:
    """Triangulate the band between two closed rings by merging their angles."""
    a_ext = np.append(inner_angles, 2.0 * math.pi)
    b_ext = np.append(outer_angles, 2.0 * math.pi)
    na, nb = len(inner), len(outer)
    i = k = 0
    triangles = []
    while i < na or k < nb:
        advance_outer = i == na or (k < nb and b_ext[k + 1] <= a_ext[i + 1])
        if advance_outer:
            triangles.append([inner[i % na], outer[k % nb], outer[(k + 1) % nb]])
            k += 1
        else:
            triangles.append([inner[i % na], outer[k % nb], inner[(i + 1) % na]])
            i += 1
    return triangles


def _disk_template(segments: int) -> tuple[np.ndarray, np.ndarray]:
    """Polar template of the unit disk with ``segments`` boundary nodes."""
    rings = max(1, round(segments / 6))
    nodes = [np.zeros((1, 2))]
    triangles: list[list[int]] = []
    previous, previous_angles = np.array([0]), None
    offset = 1
    for j in range(1, rings + 1):
        count = segments if j == rings else max(3, round(segments * j / rings))
        angles = 2.0 * math.pi * np.arange(count) / count
        radius = j / rings
        nodes.append(radius * np.column_stack([np.cos(angles), np.sin(angles)]))
        ring = np.arange(offset, offset + count)
        if previous_angles is None:
            triangles += [[0, ring[q], ring[(q + 1) % count]] for q in range(count)]
        else:
            triangles += _ring_zipper(previous, previous_angles, ring, angles)
        previous, previous_angles = ring, angles
        offset += count
    nodes = np.vstack(nodes)
    return nodes, _orient(nodes, np.array(triangles))


def _annulus_template(inner_radius: float, outer_radius: float, segments: int) -> tuple[np.ndarray, np.ndarray]:
    layers = max(1, round((outer_radius - inner_radius) * segments / (math.pi * (inner_radius + outer_radius))))
    radii = np.linspace(inner_radius, outer_radius, layers + 1)
    angles = 2.0 * math.pi * np.arange(segments) / segments
    nodes = np.vstack([rho * np.column_stack([np.cos(angles), np.sin(angles)]) for rho in radii])

    triangles = []
    for j in range(layers):
        for i in range(segments):
            p, q = j * segments + i, j * segments + (i + 1) % segments
            s, t = p + segments, q + segments
            triangles += [[p, q, t], [p, t, s]]
    return nodes, _orient(nodes, np.array(triangles))


def _boundary_loop_points(mesh: TriMesh) -> np.ndarray:
    """Boundary nodes of a single-loop mesh in traversal order."""
    successor = dict(zip(mesh.boundary_edges[:, 0].tolist(), mesh.boundary_edges[:, 1].tolist()))
    start = int(mesh.boundary_edges[0, 0])
    order = [start]
    current = successor[start]
    while current != start:
        order.append(current)
        current = successor[current]
    return mesh.nodes[order]


# Builders

def polygon_from_spec(spec: DomainSpec) -> ConvexPolygon:
    """ConvexPolygon for the polygon and planar rectangle kinds."""
    if spec.kind == DomainKind.POLYGON:
        return ConvexPolygon(np.asarray(spec.params.vertices, dtype=float))
    if spec.kind == DomainKind.RECTANGLE and spec.planar:
        return rectangle_polygon(spec.params.half_lengths)
    raise MeshError(f"Domain kind '{spec.kind.value}' is not a polygon")


def conformal_map_from_spec(spec: DomainSpec) -> ConformalMap:
    if spec.kind != DomainKind.MAPPED_DISK:
        raise MeshError(f"Domain kind '{spec.kind.value}' carries no conformal map")
    return ConformalMap.from_pairs(spec.params.coefficients, spec.params.offset)


def build_mesh(spec: DomainSpec, refinement_level: int = 0) -> TriMesh:
    """Level-0 triangulation of the domain followed by ``refinement_level`` quadrisections."""
    if refinement_level < 0 or refinement_level > BTL_MAX_LEVEL:
        raise MeshError(f"refinement_level must lie in [0, {BTL_MAX_LEVEL}], got {refinement_level}")
    params = spec.params
    kind = spec.kind.value
    preimage = None

    if spec.kind == DomainKind.POLYGON:
        nodes, triangles = _polygon_fan(polygon_from_spec(spec))
        nodes, triangles = _refine_times(nodes, triangles, refinement_level)

    elif spec.kind == DomainKind.RECTANGLE:
        if not spec.planar:
            raise MeshError(f"Only planar rectangles can be meshed, got {len(params.half_lengths)} half-lengths")
        nodes, triangles = _rectangle_grid(*params.half_lengths)
        nodes, triangles = _refine_times(nodes, triangles, refinement_level)

    elif spec.kind == DomainKind.DISK:
        nodes, triangles = _disk_template(params.segments)
        nodes, triangles = _refine_times(nodes, triangles, refinement_level, _project_to_unit_circle)
        nodes = params.radius * nodes + np.asarray(params.center)

    elif spec.kind == DomainKind.ANNULUS:
        r, big_r = params.inner_radius, params.outer_radius

        def project(points: np.ndarray) -> np.ndarray:
            norms = np.linalg.norm(points, axis=1, keepdims=True)
            target = np.where(norms < 0.5 * (r + big_r), r, big_r)
            return points * (target / norms)

        nodes, triangles = _annulus_template(r, big_r, params.segments)
        nodes, triangles = _refine_times(nodes, triangles, refinement_level, project)
        nodes = nodes + np.asarray(params.center)

    elif spec.kind == DomainKind.MAPPED_DISK:
        cmap = conformal_map_from_spec(spec).validate()
        template, triangles = _disk_template(params.segments)
        template, triangles = _refine_times(template, triangles, refinement_level, _project_to_unit_circle)
        nodes = cmap.map_points(template)
        preimage = template
        areas = _signed_areas(nodes, triangles)
        if np.any(areas <= 0.0):
            raise MeshError(f"Mapped mesh has {int(np.sum(areas <= 0.0))} inverted triangles")

    else:
        raise MeshError(f"Unsupported domain kind '{kind}'")

    mesh = _make_mesh(nodes, triangles, kind, refinement_level, preimage)
    if spec.kind == DomainKind.MAPPED_DISK and not LinearRing(_boundary_loop_points(mesh)).is_simple:
        raise MeshError("Mapped boundary polygon self-intersects")
    logger.debug(f"Built {kind} mesh level {refinement_level}: {mesh.n_nodes} nodes, {mesh.n_triangles} triangles")
    return mesh


def mesh_quality(mesh: TriMesh) -> MeshQuality:
    """Smallest interior angle (degrees) and largest aspect ratio (1 for an equilateral triangle)."""
    corners = mesh.nodes[mesh.triangles]
    sides = corners[:, [1, 2, 0]] - corners
    lengths = np.linalg.norm(sides, axis=2)
    angles = []
    for k in range(3):
        u = sides[:, k]
        v = -sides[:, (k + 2) % 3]
        cosine = np.sum(u * v, axis=1) / (lengths[:, k] * lengths[:, (k + 2) % 3])
        angles.append(np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0))))
    areas = np.abs(mesh.signed_areas)
    with np.errstate(divide="ignore"):
        aspect = lengths.max(axis=1) * lengths.sum(axis=1) / (4.0 * math.sqrt(3.0) * areas)
    return MeshQuality(min_angle_deg=float(np.min(angles)), max_aspect=float(np.max(aspect)))


def check_quality(mesh: TriMesh, min_angle_deg: float = BTL_MIN_ANGLE_DEG) -> MeshQuality:
    quality = mesh_quality(mesh)
    if not quality.min_angle_deg >= min_angle_deg:
        raise MeshQualityError(
            f"Mesh rejected: min angle {quality.min_angle_deg:.3f} deg is below {min_angle_deg} deg"
        )
    return quality


def validate_mesh(mesh: TriMesh) -> None:
    """Raise MeshError unless orientation, node usage, loop closure and normal direction are all sound."""
    areas = mesh.signed_areas
    if np.any(areas <= 0.0):
        raise MeshError(f"{int(np.sum(areas <= 0.0))} triangles are not counter-clockwise")

    used = np.zeros(mesh.n_nodes, dtype=bool)
    used[mesh.triangles.ravel()] = True
    if not used.all():
        raise MeshError(f"{int(np.sum(~used))} orphan nodes")

    starts = np.bincount(mesh.boundary_edges[:, 0], minlength=mesh.n_nodes)
    ends = np.bincount(mesh.boundary_edges[:, 1], minlength=mesh.n_nodes)
    if np.any(starts != ends) or np.any(starts > 1):
        raise MeshError("Boundary edges do not form closed simple loops")

    edges, owners = _boundary_with_owner(mesh.triangles)
    centroids = mesh.nodes[mesh.triangles[owners]].mean(axis=1)
    midpoints = 0.5 * (mesh.nodes[edges[:, 0]] + mesh.nodes[edges[:, 1]])
    vectors = mesh.nodes[edges[:, 1]] - mesh.nodes[edges[:, 0]]
    normals = np.column_stack([vectors[:, 1], -vectors[:, 0]])
    if np.any(np.sum(normals * (midpoints - centroids), axis=1) <= 0.0):
        raise MeshError("Boundary normal points into its own triangle")


def mesh_records(mesh: TriMesh) -> Dict[str, Any]:
    """Flat node / element listing for export."""
    boundary = ~mesh.interior_mask
    return {
        "kind": mesh.kind,
        "level": mesh.level,
        "nodes": [
            {"id": i, "x": float(x), "y": float(y), "boundary": bool(boundary[i])}
            for i, (x, y) in enumerate(mesh.nodes)
        ],
        "triangles": [
            {"id": t, "a": int(a), "b": int(b), "c": int(c)}
            for t, (a, b, c) in enumerate(mesh.triangles)
        ],
    }
