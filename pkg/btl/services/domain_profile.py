"""
Lazily resolved quantities of one planar domain: geometry, rigidity (closed
form when one exists, FEM otherwise) and the first Steklov eigenvalue.
Shared by concurrently running bound evaluators.
"""

import logging
import math
import threading
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from btl.models.domain_types import DomainKind, DomainSpec
from btl.models.reports import Provenance
from btl.services import convexgeom, exact
from btl.services.conformal import ConformalMap, image_area, image_perimeter
from btl.services.fem import TorsionSolution, solve_torsion, steklov_sigma1
from btl.services.mesh import TriMesh, build_mesh, conformal_map_from_spec, polygon_from_spec

logger = logging.getLogger(__name__)


class DomainProfile:
    """Quantities of ``spec`` at ``delta``; each one is computed once, under its own lock."""

    def __init__(self, spec: DomainSpec, delta: float, level: Optional[int] = None, mesh: Optional[TriMesh] = None):
        if not spec.planar:
            raise ValueError("Bound evaluation needs a planar domain")
        if not delta > 0.0:
            raise ValueError(f"delta must be positive, got {delta}")
        self.spec = spec
        self.delta = float(delta)
        self.level = spec.info["default_level"] if level is None else level
        self._lock = threading.Lock()
        self._key_locks: Dict[Any, threading.Lock] = {}
        self._cache: Dict[Any, Any] = {} if mesh is None else {"mesh": mesh}

    def _cached(self, key: Any, compute: Callable[[], Any]) -> Any:
        # Only the key being computed is locked; other quantities resolve in parallel
        with self._lock:
            if key in self._cache:
                return self._cache[key]
            key_lock = self._key_locks.setdefault(key, threading.Lock())
        with key_lock:
            with self._lock:
                if key in self._cache:
                    return self._cache[key]
            value = compute()
            with self._lock:
                self._cache[key] = value
            return value

    @property
    def kind(self) -> DomainKind:
        return self.spec.kind

    @property
    def is_convex(self) -> bool:
        return self.spec.is_convex

    # Geometry

    @property
    def polygon(self) -> Optional[convexgeom.ConvexPolygon]:
        if self.kind not in (DomainKind.POLYGON, DomainKind.RECTANGLE):
            return None
        return self._cached("polygon", lambda: polygon_from_spec(self.spec))

    @property
    def conformal_map(self) -> Optional[ConformalMap]:
        if self.kind == DomainKind.MAPPED_DISK:
            return self._cached("cmap", lambda: conformal_map_from_spec(self.spec))
        if self.kind == DomainKind.DISK:
            cx, cy = self.spec.params.center
            return ConformalMap(np.array([self.spec.params.radius]), complex(cx, cy))
        return None

    @property
    def perimeter(self) -> float:
        return self._cached("perimeter", self._perimeter)

    def _perimeter(self) -> float:
        if self.polygon is not None:
            return self.polygon.perimeter
        if self.kind == DomainKind.MAPPED_DISK:
            return image_perimeter(self.conformal_map)
        return exact.perimeter(self.closed_form(self.delta))

    @property
    def area(self) -> float:
        return self._cached("area", self._area)

    def _area(self) -> float:
        if self.polygon is not None:
            return self.polygon.area
        if self.kind == DomainKind.MAPPED_DISK:
            return image_area(self.conformal_map)
        return exact.volume(self.closed_form(self.delta))

    @property
    def inradius(self) -> Optional[float]:
        if self.kind == DomainKind.DISK:
            return self.spec.params.radius
        if self.polygon is None:
            return None
        return self._cached("inradius", lambda: convexgeom.inradius_and_chebyshev(self.polygon)[0])

    @property
    def proximal(self) -> Optional[Tuple[float, np.ndarray]]:
        """(L, proximal center)."""
        if self.kind == DomainKind.DISK:
            return self.spec.params.radius, np.asarray(self.spec.params.center, dtype=float)
        if self.polygon is None:
            return None
        return self._cached("proximal", lambda: convexgeom.proximal_radius(self.polygon))

    @property
    def moment_sharp(self) -> Optional[float]:
        """I_#; pi R^4 / 2 for a disk about its center."""
        if self.kind == DomainKind.DISK:
            return 0.5 * math.pi * self.spec.params.radius ** 4
        if self.polygon is None:
            return None
        return self._cached("moment_sharp", lambda: convexgeom.moment_sharp(self.polygon))

    # Rigidity and Steklov

    def closed_form(self, delta: float) -> Optional[exact.ClosedFormSpec]:
        params = self.spec.params
        if self.kind == DomainKind.DISK:
            return exact.BallSpec(dimension=2, radius=params.radius, delta=delta)
        if self.kind == DomainKind.ANNULUS:
            return exact.ShellSpec(dimension=2, inner_radius=params.inner_radius,
                                   outer_radius=params.outer_radius, delta=delta)
        if self.kind == DomainKind.RECTANGLE:
            return exact.BoxSpec(half_lengths=params.half_lengths, delta=delta)
        return None

    @property
    def mesh(self) -> TriMesh:
        return self._cached("mesh", lambda: build_mesh(self.spec, self.level))

    def fem_solution(self, delta: Optional[float] = None) -> TorsionSolution:
        delta = self.delta if delta is None else delta
        return self._cached(("fem", delta), lambda: solve_torsion(self.mesh, delta))

    def rigidity(self, delta: Optional[float] = None) -> Tuple[float, Provenance]:
        delta = self.delta if delta is None else delta
        closed = self.closed_form(delta)
        if closed is not None:
            return self._cached(("exact", delta), lambda: exact.rigidity(closed)), Provenance.EXACT
        return self.fem_solution(delta).rigidity, Provenance.FEM

    def steklov(self) -> Tuple[float, float, float, Provenance]:
        """
        (sigma1, T, perimeter, provenance). Without a closed-form sigma all three
        come from the same mesh, where the discrete product inequality is exact.
        """
        if self.kind == DomainKind.DISK:
            ball = self.closed_form(self.delta)
            return exact.ball_steklov_sigma1(ball), exact.rigidity(ball), exact.perimeter(ball), Provenance.EXACT

        def compute() -> Tuple[float, float, float, Provenance]:
            result = steklov_sigma1(self.mesh, self.delta, system=self.fem_solution().system)
            return result.sigma1, self.fem_solution().rigidity, self.mesh.perimeter, Provenance.FEM

        return self._cached("steklov", compute)
