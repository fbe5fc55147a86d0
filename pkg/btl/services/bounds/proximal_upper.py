import math
import time
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from btl.models.reports import BoundVerdict, Provenance, Relation
from btl.services import exact
from btl.services.bounds.base import BaseBound
from btl.services.convexgeom import ray_extent
from btl.services.domain_profile import DomainProfile
from btl.services.specfun import EXP_LIMIT, bessel_ie

RING_ANGLES = 360
RING_NODES = 32


def proximal_log_factor(delta: float, inradius: float, proximal: float) -> float:
    """log(1 / C^2) = 2 log(I_1(delta L) / I_1(delta r)), from the scaled I_1."""
    ratio = bessel_ie(1, delta * proximal) / bessel_ie(1, delta * inradius)
    return 2.0 * (math.log(ratio) + delta * (proximal - inradius))


def proximal_factor(delta: float, inradius: float, proximal: float) -> float:
    """1 / C^2 = (I_1(delta L) / I_1(delta r))^2 in the plane."""
    return math.exp(proximal_log_factor(delta, inradius, proximal))


def _proximal_skip_reason(profile: DomainProfile) -> Optional[str]:
    if not profile.is_convex:
        return f"Not convex: {profile.kind.value}"
    proximal, _ = profile.proximal
    if proximal_log_factor(profile.delta, profile.inradius, proximal) > EXP_LIMIT:
        return f"Proximal factor exceeds the floating-point range at delta = {profile.delta}"
    return None


def outside_energy(profile: DomainProfile) -> float:
    """int over B_L minus the domain of u_{B_L}^2, in polar coordinates about the proximal center."""
    if profile.polygon is None:
        return 0.0
    proximal, center = profile.proximal
    ball = exact.BallSpec(dimension=2, radius=proximal, delta=profile.delta)
    angles = 2.0 * math.pi * np.arange(RING_ANGLES) / RING_ANGLES
    extents = np.minimum(ray_extent(profile.polygon, center, angles), proximal)
    nodes, weights = leggauss(RING_NODES)

    total = 0.0
    for extent in extents:
        half = 0.5 * (proximal - extent)
        if half <= 0.0:
            continue
        rho = extent + half * (nodes + 1.0)
        values = np.array([exact.ball_torsion_function(ball, float(s)) for s in rho])
        total += half * float(np.sum(weights * values ** 2 * rho))
    return total * 2.0 * math.pi / RING_ANGLES


class ProximalUpperBound(BaseBound):
    """T <= (I_1(delta L) / I_1(delta r))^2 T(B_L), with equality for disks."""

    name = "proximal_upper"
    label = "proximal-radius upper bound"

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        return _proximal_skip_reason(profile)

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        rigidity, provenance = profile.rigidity()
        inradius = profile.inradius
        proximal, _ = profile.proximal
        ball_rigidity = exact.ball_rigidity(exact.BallSpec(dimension=2, radius=proximal, delta=profile.delta))
        upper = proximal_factor(profile.delta, inradius, proximal) * ball_rigidity
        return self._create_verdict(
            rigidity, upper, Relation.LE, provenance, Provenance.EXACT,
            details={"inradius": inradius, "proximal_radius": proximal, "ball_rigidity": ball_rigidity},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )


class EnhancedProximalUpperBound(BaseBound):
    """The proximal bound minus delta^2 / C^2 times the energy of u_{B_L}^2 outside the domain."""

    name = "proximal_upper_enhanced"
    label = "enhanced proximal-radius upper bound"

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        return _proximal_skip_reason(profile)

    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        start_time = time.perf_counter()
        rigidity, provenance = profile.rigidity()
        inradius = profile.inradius
        proximal, _ = profile.proximal
        factor = proximal_factor(profile.delta, inradius, proximal)
        ball_rigidity = exact.ball_rigidity(exact.BallSpec(dimension=2, radius=proximal, delta=profile.delta))
        correction = profile.delta ** 2 * factor * outside_energy(profile)
        upper = factor * ball_rigidity - correction
        return self._create_verdict(
            rigidity, upper, Relation.LE, provenance, Provenance.EXACT,
            details={"plain_bound": factor * ball_rigidity, "correction": correction},
            execution_time_ms=(time.perf_counter() - start_time) * 1000,
        )
