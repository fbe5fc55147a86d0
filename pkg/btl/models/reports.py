from enum import Enum
from pydantic import BaseModel, Field
from typing import Optional, List, Dict, Any, Tuple

Point = Tuple[float, float]


class VerdictStatus(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    INCONCLUSIVE = "inconclusive"
    SKIPPED = "skipped"


class Relation(str, Enum):
    LE = "<="
    LT = "<"
    GE = ">="
    GT = ">"

    @property
    def is_strict(self) -> bool:
        return self in (Relation.LT, Relation.GT)


class Provenance(str, Enum):
    EXACT = "exact"
    FEM = "fem"
    GEOMETRY = "geometry"


class BoundVerdict(BaseModel):
    """One inequality instance evaluated on one domain."""
    name: str
    label: str = Field(description="Opaque reference label of the inequality")
    lhs: float
    rhs: float
    relation: Relation
    slack: float = Field(description="Signed slack normalised by max(|lhs|, |rhs|)")
    tolerance: float = Field(ge=0.0)
    status: VerdictStatus
    passed: bool
    lhs_provenance: Provenance
    rhs_provenance: Provenance
    message: str
    details: Optional[Dict[str, Any]] = None
    execution_time_ms: float = Field(default=0.0, exclude=True)


class VerdictSummary(BaseModel):
    """Overall bound-suite summary."""
    overall_status: VerdictStatus
    pass_ratio: float = Field(ge=0.0, le=1.0, description="Passed share of non-skipped verdicts")
    total_checks: int
    passed_checks: int
    failed_checks: int
    inconclusive_checks: int
    skipped_checks: int


class RidgeKind(str, Enum):
    POINT = "point"
    SEGMENT = "segment"


class HighRidge(BaseModel):
    """Centers of maximal inscribed disks: a point or a segment."""
    kind: RidgeKind
    endpoints: List[Point] = Field(min_length=1, max_length=2)


class ConvexGeometrySummary(BaseModel):
    area: float = Field(gt=0.0)
    perimeter: float = Field(gt=0.0)
    inradius: float = Field(gt=0.0)
    chebyshev_center: Point
    circumradius: float = Field(gt=0.0)
    circumcenter: Point
    diameter: float = Field(gt=0.0)
    high_ridge: HighRidge
    proximal_center: Point
    proximal_radius: float = Field(gt=0.0)
    moment_sharp: float = Field(gt=0.0)
    barycenter_moment: float = Field(gt=0.0)


class ExactReport(BaseModel):
    command: str = "exact"
    kind: str
    dimension: int
    delta: float
    rigidity: float
    perimeter: float
    volume: float
    boundary_value: Optional[float] = None
    l1_identity_defect: float
    steklov_sigma1: Optional[float] = None
    steklov_product: Optional[float] = None


class TorsionReport(BaseModel):
    command: str = "solve"
    kind: str
    delta: float
    level: int
    nodes: int
    triangles: int
    rigidity: float
    perimeter: float
    area: float
    solver_residual: float
    iterations: int
    method: str
    l1_identity_defect: float
    min_value: float
    max_principle_gap: float
    dual_gap: float
    min_angle_deg: float


class SteklovReport(BaseModel):
    command: str = "steklov"
    kind: str
    delta: float
    level: int
    nodes: int
    sigma1: float
    iterations: int
    rayleigh_residual: float
    constant_trial_bound: float


class BoundsReport(BaseModel):
    command: str = "bounds"
    kind: str
    delta: float
    summary: VerdictSummary
    verdicts: List[BoundVerdict]


class SweepRow(BaseModel):
    delta: float
    scaled_rigidity: float = Field(description="delta^2 * T")
    limit: float = Field(description="perimeter^2 / area")
    relative_gap: float
    provenance: Provenance


class SweepReport(BaseModel):
    command: str = "sweep"
    kind: str
    rows: List[SweepRow]
    gap_ratios: List[float]
    fitted_order: Optional[float] = None


class GeometryReport(BaseModel):
    command: str = "geom"
    kind: str
    summary: ConvexGeometrySummary
