import time
from typing import Optional

import numpy as np

from btl.models.reports import BoundVerdict, Provenance, Relation
from btl.services.bounds.base import BaseBound
from btl.services.convexgeom import parallel_perimeter
from btl.services.domain_profile import DomainProfile

PARALLEL_SAMPLES = 16


class ParallelPerimeterBound(BaseBound):
    """Inner parallel sets of a convex polygon never have longer boundary: |d Omega_t| <= |d Omega|."""

    name = "parallel_perimeter"
    label = "inner-parallel perimeter estimate"

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        if profile.polygon is None:
            return f"Needs a polygon, got {profile.kind.value}"
        return None

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        poly = profile.polygon
        levels = profile.inradius * np.arange(1, PARALLEL_SAMPLES + 1) / (PARALLEL_SAMPLES + 1)
        perimeters = [parallel_perimeter(poly, float(t)) for t in levels]
        monotone = bool(np.all(np.diff(perimeters) <= 1e-12 * poly.perimeter))
        return self._create_verdict(
            max(perimeters), poly.perimeter, Relation.LE, Provenance.GEOMETRY, Provenance.GEOMETRY,
            details={"levels": levels.tolist(), "perimeters": perimeters, "nonincreasing": monotone},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )
