from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from btl.config import BTL_EXACT_TOLERANCE, BTL_FEM_TOLERANCE
from btl.models.reports import BoundVerdict, Provenance, Relation, VerdictStatus
from btl.services.domain_profile import DomainProfile


def verdict_slack(lhs: float, rhs: float, relation: Relation) -> float:
    """Signed slack normalised by max(|lhs|, |rhs|); positive when the relation holds."""
    scale = max(abs(lhs), abs(rhs))
    if relation in (Relation.LE, Relation.LT):
        difference = rhs - lhs
    else:
        difference = lhs - rhs
    return difference / scale if scale > 0.0 else 0.0


def verdict_status(slack: float, relation: Relation, tolerance: float) -> VerdictStatus:
    """Non-strict relations pass with slack >= -tol; strict ones need slack > tol and are inconclusive within it."""
    if slack < -tolerance:
        return VerdictStatus.FAILED
    if relation.is_strict and slack <= tolerance:
        return VerdictStatus.INCONCLUSIVE
    return VerdictStatus.PASSED


class BaseBound(ABC):
    """Abstract base class for all bound evaluators."""

    name: str = "base_bound"
    label: str = ""

    def applies_to(self, profile: DomainProfile) -> Optional[str]:
        """None when the evaluator applies, otherwise the reason it is skipped."""
        return None

    @abstractmethod
    def evaluate(self, profile: DomainProfile) -> BoundVerdict:
        """
        Evaluate one inequality on the profiled domain.

        Args:
            profile: Lazily computed quantities of the domain at its delta

        Returns:
            BoundVerdict with both sides, slack and status
        """
        pass

    def _create_verdict(
        self,
        lhs: float,
        rhs: float,
        relation: Relation,
        lhs_provenance: Provenance,
        rhs_provenance: Provenance,
        details: Optional[Dict[str, Any]] = None,
        execution_time_ms: float = 0,
    ) -> BoundVerdict:
        """Helper to create a consistent BoundVerdict."""
        uses_fem = Provenance.FEM in (lhs_provenance, rhs_provenance)
        tolerance = BTL_FEM_TOLERANCE if uses_fem else BTL_EXACT_TOLERANCE
        slack = verdict_slack(lhs, rhs, relation)
        status = verdict_status(slack, relation, tolerance)
        return BoundVerdict(
            name=self.name,
            label=self.label,
            lhs=lhs,
            rhs=rhs,
            relation=relation,
            slack=slack,
            tolerance=tolerance,
            status=status,
            passed=status == VerdictStatus.PASSED,
            lhs_provenance=lhs_provenance,
            rhs_provenance=rhs_provenance,
            message=f"{lhs:.10g} {relation.value} {rhs:.10g} (slack {slack:+.3e})",
            details=details,
            execution_time_ms=execution_time_ms,
        )

    def _skip(self, reason: str) -> BoundVerdict:
        """Return a SKIPPED verdict when the evaluator does not apply."""
        return BoundVerdict(
            name=self.name,
            label=self.label,
            lhs=0.0,
            rhs=0.0,
            relation=Relation.LE,
            slack=0.0,
            tolerance=0.0,
            status=VerdictStatus.SKIPPED,
            passed=False,
            lhs_provenance=Provenance.GEOMETRY,
            rhs_provenance=Provenance.GEOMETRY,
            message=reason,
            details={"skip_reason": reason},
        )
