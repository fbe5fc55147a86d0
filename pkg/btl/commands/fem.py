import logging
from typing import List, Tuple

from btl.models.reports import SteklovReport, TorsionReport
from btl.services.fem import assemble, dual_gap, solve_torsion, steklov_sigma1
from btl.services.mesh import TriMesh, build_mesh, check_quality

logger = logging.getLogger(__name__)


def mesh_for(config) -> TriMesh:
    spec = config.domain
    if config.segments is not None:
        spec = spec.with_segments(config.segments)
    level = spec.info["default_level"] if config.level is None else config.level
    return build_mesh(spec, level)


def run_solve(config) -> Tuple[TorsionReport, List[dict]]:
    """Torsion report plus the nodal field rows (x, y, u)."""
    mesh = mesh_for(config)
    quality = check_quality(mesh)
    solution = solve_torsion(mesh, config.delta)
    report = TorsionReport(
        kind=config.domain.kind.value,
        delta=config.delta,
        level=mesh.level,
        nodes=mesh.n_nodes,
        triangles=mesh.n_triangles,
        rigidity=solution.rigidity,
        perimeter=mesh.perimeter,
        area=mesh.area,
        solver_residual=solution.solver_residual,
        iterations=solution.iterations,
        method=solution.method,
        l1_identity_defect=solution.l1_identity_defect,
        min_value=solution.min_value,
        max_principle_gap=solution.max_principle_gap,
        dual_gap=dual_gap(mesh, config.delta, solution),
        min_angle_deg=quality.min_angle_deg,
    )
    fields = [
        {"x": float(x), "y": float(y), "u": float(u)}
        for (x, y), u in zip(mesh.nodes, solution.nodal_values)
    ]
    return report, fields


def run_steklov(config) -> SteklovReport:
    mesh = mesh_for(config)
    system = assemble(mesh, config.delta)
    result = steklov_sigma1(mesh, config.delta, system=system)
    return SteklovReport(
        kind=config.domain.kind.value,
        delta=config.delta,
        level=mesh.level,
        nodes=mesh.n_nodes,
        sigma1=result.sigma1,
        iterations=result.iterations,
        rayleigh_residual=result.rayleigh_residual,
        constant_trial_bound=config.delta ** 2 * mesh.area / mesh.perimeter,
    )
