import time

from btl.models.reports import BoundVerdict, Provenance, Relation
from btl.services.bounds.base import BaseBound
from btl.services.domain_profile import DomainProfile


class BaseLowerBound(BaseBound):
    """Constant trial function: |boundary|^2 / (delta^2 |domain|) <= T."""

    name = "base_lower"
    label = "constant-trial lower bound"

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        rigidity, provenance = profile.rigidity()
        lower = profile.perimeter ** 2 / (profile.delta ** 2 * profile.area)
        return self._create_verdict(
            lower, rigidity, Relation.LE, Provenance.GEOMETRY, provenance,
            details={"perimeter": profile.perimeter, "area": profile.area},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )


class BaseUpperBound(BaseBound):
    """Trace-constant bound: T(delta) <= T(1) / min(1, delta^2)."""

    name = "base_upper"
    label = "trace-constant upper bound"

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        rigidity, provenance = profile.rigidity()
        unit_rigidity, unit_provenance = profile.rigidity(1.0)
        upper = unit_rigidity / min(1.0, profile.delta ** 2)
        return self._create_verdict(
            rigidity, upper, Relation.LE, provenance, unit_provenance,
            details={"rigidity_at_unit_delta": unit_rigidity, "trace_constant": 1.0 / unit_rigidity},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )
