import time

from btl.models.reports import BoundVerdict, Provenance, Relation
from btl.services.bounds.base import BaseBound
from btl.services.domain_profile import DomainProfile


class SteklovProductBound(BaseBound):
    """sigma_1 T / |boundary| <= 1, with equality for balls."""

    name = "steklov_product"
    label = "Steklov-torsion product"

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        sigma, rigidity, perimeter, provenance = profile.steklov()
        product = sigma * rigidity / perimeter
        return self._create_verdict(
            product, 1.0, Relation.LE, provenance, Provenance.EXACT,
            details={"sigma1": sigma, "rigidity": rigidity, "perimeter": perimeter},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )


class SteklovConstantTrial(BaseBound):
    """Constant test function in the Steklov quotient: sigma_1 <= delta^2 |domain| / |boundary|."""

    name = "steklov_constant_trial"
    label = "Steklov constant-trial bound"

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        sigma, _, perimeter, provenance = profile.steklov()
        if provenance == Provenance.FEM:
            area = profile.mesh.area
        else:
            area = profile.area
        upper = profile.delta ** 2 * area / perimeter
        return self._create_verdict(
            sigma, upper, Relation.LE, provenance, provenance,
            details={"area": area, "perimeter": perimeter},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )
