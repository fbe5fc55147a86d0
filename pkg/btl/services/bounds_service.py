import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from btl.config import BTL_MAX_THREADS
from btl.models.domain_types import DomainSpec
from btl.models.reports import (
    BoundVerdict,
    Provenance,
    Relation,
    SweepReport,
    SweepRow,
    VerdictStatus,
    VerdictSummary,
)
from btl.services.bounds import (
    AreaDistortionBound,
    BaseBound,
    BaseLowerBound,
    BaseUpperBound,
    ConformalLowerBound,
    ConvexLowerBound,
    EnhancedProximalUpperBound,
    FourQuantityInequality,
    MomentUpperBound,
    ParallelPerimeterBound,
    PerimeterInradiusBound,
    ProximalUpperBound,
    SteklovConstantTrial,
    SteklovProductBound,
)
from btl.services.domain_profile import DomainProfile
from btl.services.mesh import build_mesh

logger = logging.getLogger(__name__)

# Bound descriptions for logging
BOUND_DESCRIPTIONS = {
    "base_lower": "Checking |boundary|^2 / (delta^2 |domain|) <= T (constant trial function)",
    "base_upper": "Checking T(delta) <= T(1) / min(1, delta^2) (trace constant)",
    "steklov_product": "Checking sigma_1 T / |boundary| <= 1 (Steklov-torsion product)",
    "steklov_constant_trial": "Checking sigma_1 <= delta^2 |domain| / |boundary|",
    "convex_lower": "Checking T > |boundary| / (delta tanh(delta r)) on convex sets",
    "moment_upper": "Checking T <= (I_# + 4 |domain| / delta^2) / r^2",
    "perimeter_inradius": "Checking |boundary| <= 2 |domain| / r",
    "proximal_upper": "Checking T <= (I_1(delta L) / I_1(delta r))^2 T(B_L)",
    "proximal_upper_enhanced": "Checking the proximal bound with the energy outside the domain removed",
    "four_quantity": "Checking |boundary|^2 / |domain| <= 4 pi (L / r)^2",
    "conformal_lower": "Checking (|boundary| / 2 pi)^2 T(B_rho) / rho^2 <= T for the Hardy norm rho",
    "area_distortion": "Checking conformal image area <= pi rho^2",
    "parallel_perimeter": "Checking inner parallel perimeters never exceed the perimeter",
}


class BoundsService:
    """Orchestrates parallel evaluation of every inequality on one domain."""

    def __init__(self, max_threads: int = BTL_MAX_THREADS):
        self.max_threads = max(1, max_threads)
        self.bounds: List[BaseBound] = [
            BaseLowerBound(),
            BaseUpperBound(),
            SteklovProductBound(),
            SteklovConstantTrial(),
            ConvexLowerBound(),
            MomentUpperBound(),
            PerimeterInradiusBound(),
            ProximalUpperBound(),
            EnhancedProximalUpperBound(),
            FourQuantityInequality(),
            ConformalLowerBound(),
            AreaDistortionBound(),
            ParallelPerimeterBound(),
        ]

    def verify(self, profile: DomainProfile) -> Tuple[VerdictSummary, List[BoundVerdict]]:
        """
        Run all applicable evaluators in parallel on one profiled domain.

        Args:
            profile: Domain, delta and mesh level to check

        Returns:
            Tuple of (VerdictSummary, List[BoundVerdict]) in evaluator order
        """
        logger.info("========== BOUND VERIFICATION STARTED ==========")
        logger.info(f"  Domain: {profile.kind.value} | delta = {profile.delta} | level = {profile.level}")
        logger.info(f"Running {len(self.bounds)} bound checks in PARALLEL THREADS:")

        for bound in self.bounds:
            description = BOUND_DESCRIPTIONS.get(bound.name, "Domain-specific inequality")
            logger.info(f"  -> {bound.name}: {description}")

        def run_bound_in_thread(bound: BaseBound) -> BoundVerdict:
            logger.debug(f"  [{bound.name}] Running in thread: {threading.current_thread().name}")
            reason = bound.applies_to(profile)
            if reason is not None:
                return bound._skip(reason)
            return bound.evaluate(profile)

        with ThreadPoolExecutor(max_workers=min(self.max_threads, len(self.bounds)),
                                thread_name_prefix="bound") as executor:
            futures = [executor.submit(run_bound_in_thread, b) for b in self.bounds]
            results: List[Any] = []
            for future in futures:
                try:
                    results.append(future.result())
                except Exception as e:
                    results.append(e)

        logger.info("---------- BOUND RESULTS ----------")

        verdicts: List[BoundVerdict] = []
        for i, result in enumerate(results):
            bound = self.bounds[i]
            if isinstance(result, Exception):
                logger.error(f"  [FAIL] {bound.name}: ERROR - {str(result)}")
                verdicts.append(BoundVerdict(
                    name=bound.name,
                    label=bound.label,
                    lhs=math.nan,
                    rhs=math.nan,
                    relation=Relation.LE,
                    slack=math.nan,
                    tolerance=0.0,
                    status=VerdictStatus.FAILED,
                    passed=False,
                    lhs_provenance=Provenance.GEOMETRY,
                    rhs_provenance=Provenance.GEOMETRY,
                    message=f"Evaluator error: {str(result)}",
                    details={"error_type": type(result).__name__},
                ))
            else:
                status_icon = self._get_status_icon(result.status)
                logger.info(f"  {status_icon} {bound.name}: {result.message} ({result.execution_time_ms:.2f}ms)")
                verdicts.append(result)

        summary = self._create_summary(verdicts)
        logger.info(
            "========== BOUND VERIFICATION COMPLETE ==========\n"
            f"  Overall Status: {summary.overall_status.value.upper()}\n"
            f"  Pass Ratio: {summary.pass_ratio}\n"
            f"  Passed: {summary.passed_checks} | "
            f"Failed: {summary.failed_checks} | "
            f"Inconclusive: {summary.inconclusive_checks} | "
            f"Skipped: {summary.skipped_checks}\n"
            "================================================="
        )
        return summary, verdicts

    def _get_status_icon(self, status: VerdictStatus) -> str:
        """Get a status indicator for logging."""
        icons = {
            VerdictStatus.PASSED: "[PASS]",
            VerdictStatus.FAILED: "[FAIL]",
            VerdictStatus.INCONCLUSIVE: "[INCO]",
            VerdictStatus.SKIPPED: "[SKIP]",
        }
        return icons.get(status, "[????]")

    def _create_summary(self, verdicts: List[BoundVerdict]) -> VerdictSummary:
        """Create summary from verdicts."""
        passed = sum(1 for v in verdicts if v.status == VerdictStatus.PASSED)
        failed = sum(1 for v in verdicts if v.status == VerdictStatus.FAILED)
        inconclusive = sum(1 for v in verdicts if v.status == VerdictStatus.INCONCLUSIVE)
        skipped = sum(1 for v in verdicts if v.status == VerdictStatus.SKIPPED)

        total = len(verdicts)
        active_checks = total - skipped
        ratio = passed / active_checks if active_checks > 0 else 0.0

        if failed > 0:
            overall_status = VerdictStatus.FAILED
        elif inconclusive > 0:
            overall_status = VerdictStatus.INCONCLUSIVE
        elif passed > 0:
            overall_status = VerdictStatus.PASSED
        else:
            overall_status = VerdictStatus.SKIPPED

        return VerdictSummary(
            overall_status=overall_status,
            pass_ratio=round(ratio, 4),
            total_checks=total,
            passed_checks=passed,
            failed_checks=failed,
            inconclusive_checks=inconclusive,
            skipped_checks=skipped,
        )


def _sweep_row(spec: DomainSpec, delta: float, level: Optional[int], mesh) -> SweepRow:
    profile = DomainProfile(spec, delta, level=level, mesh=mesh)
    rigidity, provenance = profile.rigidity()
    if provenance == Provenance.FEM:
        # the discrete limit belongs to the polygonal mesh domain
        limit = profile.mesh.perimeter ** 2 / profile.mesh.area
    else:
        limit = profile.perimeter ** 2 / profile.area
    scaled = delta ** 2 * rigidity
    return SweepRow(delta=delta, scaled_rigidity=scaled, limit=limit,
                    relative_gap=(scaled - limit) / limit, provenance=provenance)


def asymptotic_sweep(spec: DomainSpec, deltas: Sequence[float], level: Optional[int] = None,
                     max_threads: int = BTL_MAX_THREADS) -> SweepReport:
    """
    delta^2 T against |boundary|^2 / |domain| over decreasing deltas, with the
    gap ratio per step and the fitted power law of the gap.
    """
    deltas = [float(d) for d in deltas]
    if not deltas or any(d <= 0.0 for d in deltas):
        raise ValueError(f"deltas must be positive, got {deltas}")
    if any(later >= earlier for earlier, later in zip(deltas, deltas[1:])):
        raise ValueError(f"deltas must be strictly decreasing, got {deltas}")

    mesh = None
    if not spec.info["closed_form"]:
        mesh = build_mesh(spec, spec.info["default_level"] if level is None else level)

    with ThreadPoolExecutor(max_workers=max(1, min(max_threads, len(deltas))), thread_name_prefix="sweep") as executor:
        rows = list(executor.map(lambda d: _sweep_row(spec, d, level, mesh), deltas))

    gaps = [row.relative_gap for row in rows]
    ratios = [gaps[k] / gaps[k + 1] for k in range(len(gaps) - 1) if gaps[k + 1] != 0.0]
    fitted_order = None
    if len(rows) >= 2 and all(g > 0.0 for g in gaps):
        fitted_order = float(np.polyfit(np.log(deltas), np.log(gaps), 1)[0])

    for row in rows:
        logger.info(f"  delta = {row.delta:<8g} delta^2 T = {row.scaled_rigidity:.10g} "
                    f"limit = {row.limit:.10g} gap = {row.relative_gap:.3e}")
    return SweepReport(kind=spec.kind.value, rows=rows, gap_ratios=ratios, fitted_order=fitted_order)
