import time
from typing import Optional

from btl.models.reports import BoundVerdict, Provenance, Relation
from btl.services.bounds.base import BaseBound
from btl.services.domain_profile import DomainProfile


class MomentUpperBound(BaseBound):
    """T <= (I_# + N^2 |domain| / delta^2) / r^2 with N = 2."""

    name = "moment_upper"
    label = "polar-moment upper bound"

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        if not profile.is_convex:
            return f"Not convex: {profile.kind.value}"
        return None

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        rigidity, provenance = profile.rigidity()
        inradius = profile.inradius
        moment = profile.moment_sharp
        upper = (moment + 4.0 * profile.area / profile.delta ** 2) / inradius ** 2
        return self._create_verdict(
            rigidity, upper, Relation.LE, provenance, Provenance.GEOMETRY,
            details={"moment_sharp": moment, "inradius": inradius},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )


class PerimeterInradiusBound(BaseBound):
    """|boundary| <= 2 |domain| / r, the delta -> infinity limit of the moment bound."""

    name = "perimeter_inradius"
    label = "perimeter-inradius inequality"

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        if not profile.is_convex:
            return f"Not convex: {profile.kind.value}"
        return None

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        inradius = profile.inradius
        upper = 2.0 * profile.area / inradius
        return self._create_verdict(
            profile.perimeter, upper, Relation.LE, Provenance.GEOMETRY, Provenance.GEOMETRY,
            details={"inradius": inradius},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )
