import math

from btl.commands import UnsupportedPairingError
from btl.models.domain_types import DomainKind
from btl.models.reports import ConvexGeometrySummary, GeometryReport, HighRidge, RidgeKind
from btl.services.convexgeom import summarize
from btl.services.mesh import polygon_from_spec


def _disk_summary(radius: float, center) -> ConvexGeometrySummary:
    center = tuple(float(c) for c in center)
    moment = 0.5 * math.pi * radius ** 4
    return ConvexGeometrySummary(
        area=math.pi * radius ** 2,
        perimeter=2.0 * math.pi * radius,
        inradius=radius,
        chebyshev_center=center,
        circumradius=radius,
        circumcenter=center,
        diameter=2.0 * radius,
        high_ridge=HighRidge(kind=RidgeKind.POINT, endpoints=[center]),
        proximal_center=center,
        proximal_radius=radius,
        moment_sharp=moment,
        barycenter_moment=moment,
    )


def run_geom(config) -> GeometryReport:
    spec = config.domain
    if spec.kind == DomainKind.DISK:
        summary = _disk_summary(spec.params.radius, spec.params.center)
    elif spec.kind in (DomainKind.POLYGON, DomainKind.RECTANGLE) and spec.planar:
        summary = summarize(polygon_from_spec(spec))
    else:
        raise UnsupportedPairingError(f"'geom' needs a convex planar domain, got '{spec.kind.value}'")
    return GeometryReport(kind=spec.kind.value, summary=summary)
