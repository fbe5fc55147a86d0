import math
import time
from typing import Optional

from btl.models.reports import BoundVerdict, Provenance, Relation
from btl.services.bounds.base import BaseBound
from btl.services.domain_profile import DomainProfile


class ConvexLowerBound(BaseBound):
    """Interior parallels: T > |boundary| / (delta tanh(delta r)) on convex sets."""

    name = "convex_lower"
    label = "interior-parallels lower bound"

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        if not profile.is_convex:
            return f"Not convex: {profile.kind.value}"
        return None

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        rigidity, provenance = profile.rigidity()
        inradius = profile.inradius
        lower = profile.perimeter / (profile.delta * math.tanh(profile.delta * inradius))
        return self._create_verdict(
            rigidity, lower, Relation.GT, provenance, Provenance.GEOMETRY,
            details={"inradius": inradius, "sharpness_ratio": lower / rigidity},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )
