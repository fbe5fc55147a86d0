import math
import time
from typing import Optional

from btl.models.domain_types import DomainKind
from btl.models.reports import BoundVerdict, Provenance, Relation
from btl.services import exact
from btl.services.bounds.base import BaseBound
from btl.services.conformal import hardy_norm, hardy_norm_quadrature, image_area
from btl.services.domain_profile import DomainProfile
from btl.services.fem import rayleigh_T, transplanted_trial


def _needs_map(profile: DomainProfile) -> Optional[str]:
    if profile.conformal_map is None:
        return f"No conformal map for {profile.kind.value}"
    return None


class ConformalLowerBound(BaseBound):
    """
    (|boundary| / 2 pi)^2 T(B_rho) / rho^2 <= T with rho the Hardy norm of the map.

    rho is only a candidate for the infimum over base points; since
    rho -> T(B_rho) / rho^2 is decreasing the substitution keeps the bound valid.
    """

    name = "conformal_lower"
    label = "conformal transplantation lower bound"

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        return _needs_map(profile)

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        cmap = profile.conformal_map
        rho = hardy_norm(cmap)
        ball_rigidity = exact.ball_rigidity(exact.BallSpec(dimension=2, radius=rho, delta=profile.delta))
        lower = (profile.perimeter / (2.0 * math.pi)) ** 2 * ball_rigidity / rho ** 2
        rigidity, provenance = profile.rigidity()

        details = {"hardy_norm": rho, "hardy_norm_quadrature": hardy_norm_quadrature(cmap)}
        if profile.kind == DomainKind.MAPPED_DISK:
            solution = profile.fem_solution()
            trial = transplanted_trial(solution.mesh, cmap, profile.delta)
            details["transplanted_rayleigh"] = rayleigh_T(solution.mesh, profile.delta, trial, solution.system)

        return self._create_verdict(
            lower, rigidity, Relation.LE, Provenance.EXACT, provenance,
            details=details,
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )


class AreaDistortionBound(BaseBound):
    """pi sum_k k |a_k|^2 <= pi rho^2: the image area never exceeds the Hardy-norm disk."""

    name = "area_distortion"
    label = "conformal area estimate"

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        return _needs_map(profile)

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        cmap = profile.conformal_map
        rho = hardy_norm(cmap)
        return self._create_verdict(
            image_area(cmap), math.pi * rho ** 2, Relation.LE, Provenance.GEOMETRY, Provenance.GEOMETRY,
            details={"hardy_norm": rho},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )
