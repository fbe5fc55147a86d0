import math
import time
from typing import Optional

from btl.models.reports import BoundVerdict, Provenance, Relation
from btl.services.bounds.base import BaseBound
from btl.services.domain_profile import DomainProfile


class FourQuantityInequality(BaseBound):
    """|boundary|^2 / |domain| <= 4 pi (L / r)^2 in the plane; equality for disks."""

    name = "four_quantity"
    label = "perimeter-area-proximal-inradius inequality"

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        if not profile.is_convex:
            return f"Not convex: {profile.kind.value}"
        return None

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        inradius = profile.inradius
        proximal, _ = profile.proximal
        lhs = profile.perimeter ** 2 / profile.area
        rhs = 4.0 * math.pi * (proximal / inradius) ** 2
        return self._create_verdict(
            lhs, rhs, Relation.LE, Provenance.GEOMETRY, Provenance.GEOMETRY,
            details={"inradius": inradius, "proximal_radius": proximal},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )
