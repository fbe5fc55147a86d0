"""
P1 finite elements for -Lap u + delta^2 u = 0 in the domain with unit Neumann
data, the boundary delta-torsional rigidity T = int_boundary u, and the first
modified Steklov eigenvalue.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse.linalg import cg, splu

from btl.config import (
    BTL_CG_MAXITER_FACTOR,
    BTL_CG_RTOL,
    BTL_DENSE_FALLBACK_NODES,
    BTL_RESIDUAL_LIMIT,
    BTL_STEKLOV_MAX_ITERATIONS,
    BTL_STEKLOV_RTOL,
)
from btl.models.domain_types import DomainSpec
from btl.services.conformal import ConformalMap, hardy_norm
from btl.services.convexgeom import ConvexPolygon, distance_to_boundary, inradius_and_chebyshev
from btl.services.exact import BallSpec, ball_torsion_function, slab_profile
from btl.services.mesh import TriMesh, build_mesh, check_quality

logger = logging.getLogger(__name__)

SOLVER_METHODS = ("auto", "cg", "dense")


class SolverConvergenceError(RuntimeError):
    """Linear solve did not reach the residual limit; carries the partial solution."""

    def __init__(self, message: str, residual: float, iterations: int, solution: Optional["TorsionSolution"] = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.solution = solution


class SteklovConvergenceError(RuntimeError):
    """Inverse iteration did not settle."""


@dataclass(frozen=True, eq=False)
class FemSystem:
    """Assembled P1 forms on one mesh for one delta."""

    mesh: TriMesh
    delta: float
    stiffness: sparse.csr_matrix
    mass: sparse.csr_matrix
    boundary_mass: sparse.csr_matrix
    load: np.ndarray

    @cached_property
    def matrix(self) -> sparse.csr_matrix:
        """A = K + delta^2 M."""
        return (self.stiffness + self.delta ** 2 * self.mass).tocsr()

    def energy(self, phi: np.ndarray) -> float:
        """||grad phi||^2 + delta^2 ||phi||^2."""
        return float(phi @ (self.matrix @ phi))

    def boundary_integral(self, phi: np.ndarray) -> float:
        return float(self.load @ phi)


@dataclass(frozen=True, eq=False)
class TorsionSolution:
    mesh: TriMesh
    delta: float
    nodal_values: np.ndarray
    rigidity: float
    solver_residual: float
    boundary_load_vector: np.ndarray
    iterations: int
    method: str
    converged: bool
    system: FemSystem = field(repr=False)

    @property
    def min_value(self) -> float:
        return float(self.nodal_values.min())

    @property
    def max_principle_gap(self) -> float:
        """max over interior nodes minus max over boundary nodes (<= 0 up to round-off)."""
        interior = self.nodal_values[self.mesh.interior_mask]
        if interior.size == 0:
            return -math.inf
        return float(interior.max() - self.nodal_values[self.mesh.boundary_nodes].max())

    @property
    def l1_norm(self) -> float:
        return float(np.sum(self.system.mass @ self.nodal_values))

    @property
    def l1_identity_defect(self) -> float:
        """|delta^2 int u - |boundary|| / |boundary|."""
        perimeter = self.mesh.perimeter
        return abs(self.delta ** 2 * self.l1_norm - perimeter) / perimeter


@dataclass(frozen=True, eq=False)
class SteklovResult:
    sigma1: float
    eigenvector: np.ndarray
    iterations: int
    rayleigh_residual: float


@dataclass(frozen=True)
class ConvergenceStudy:
    levels: List[int]
    mesh_sizes: List[float]
    rigidities: List[float]
    errors: List[float]
    orders: List[float]


def _check_delta(delta: float, allow_zero: bool = False) -> float:
    delta = float(delta)
    if not math.isfinite(delta) or delta < 0.0 or (delta == 0.0 and not allow_zero):
        raise ValueError(f"delta must be positive, got {delta}")
    return delta


def assemble(mesh: TriMesh, delta: float, check: bool = True) -> FemSystem:
    """Stiffness, domain mass, boundary mass and boundary load with exact P1 element integrals."""
    delta = _check_delta(delta, allow_zero=True)
    if check:
        check_quality(mesh)

    n = mesh.n_nodes
    t1, t2, t3 = mesh.triangles[:, 0], mesh.triangles[:, 1], mesh.triangles[:, 2]
    v1, v2, v3 = mesh.nodes[t1], mesh.nodes[t2], mesh.nodes[t3]
    v2mv1 = v2 - v1
    v3mv2 = v3 - v2
    v1mv3 = v1 - v3
    # 4 * area
    vol = 4.0 * mesh.signed_areas

    a12 = np.sum(v3mv2 * v1mv3, axis=1) / vol
    a23 = np.sum(v1mv3 * v2mv1, axis=1) / vol
    a31 = np.sum(v2mv1 * v3mv2, axis=1) / vol
    a11 = -a12 - a31
    a22 = -a12 - a23
    a33 = -a31 - a23
    local_a = np.column_stack((a12, a12, a23, a23, a31, a31, a11, a22, a33)).reshape(-1)
    i = np.column_stack((t1, t2, t2, t3, t3, t1, t1, t2, t3)).reshape(-1)
    j = np.column_stack((t2, t1, t3, t2, t1, t3, t1, t2, t3)).reshape(-1)
    stiffness = sparse.csr_matrix((local_a, (i, j)), shape=(n, n))

    # area/6 on the diagonal, area/12 off it
    b_ii = vol / 24.0
    b_ij = vol / 48.0
    local_b = np.column_stack((b_ij, b_ij, b_ij, b_ij, b_ij, b_ij, b_ii, b_ii, b_ii)).reshape(-1)
    mass = sparse.csr_matrix((local_b, (i, j)), shape=(n, n))

    e1, e2 = mesh.boundary_edges[:, 0], mesh.boundary_edges[:, 1]
    lengths = mesh.boundary_lengths
    local_s = np.column_stack((lengths / 6.0, lengths / 6.0, lengths / 3.0, lengths / 3.0)).reshape(-1)
    bi = np.column_stack((e1, e2, e1, e2)).reshape(-1)
    bj = np.column_stack((e2, e1, e1, e2)).reshape(-1)
    boundary_mass = sparse.csr_matrix((local_s, (bi, bj)), shape=(n, n))

    load = 0.5 * (np.bincount(e1, weights=lengths, minlength=n) + np.bincount(e2, weights=lengths, minlength=n))
    return FemSystem(mesh=mesh, delta=delta, stiffness=stiffness, mass=mass,
                     boundary_mass=boundary_mass, load=load)


def _dense_solve(system: FemSystem) -> np.ndarray:
    factor = cho_factor(system.matrix.toarray())
    return cho_solve(factor, system.load)


def _relative_residual(system: FemSystem, u: np.ndarray) -> float:
    return float(np.linalg.norm(system.load - system.matrix @ u) / np.linalg.norm(system.load))


def _solution(system: FemSystem, u: np.ndarray, residual: float, iterations: int,
              method: str, converged: bool) -> TorsionSolution:
    return TorsionSolution(
        mesh=system.mesh,
        delta=system.delta,
        nodal_values=u,
        rigidity=float(system.load @ u),
        solver_residual=residual,
        boundary_load_vector=system.load,
        iterations=iterations,
        method=method,
        converged=converged,
        system=system,
    )


def solve_torsion(
    mesh: TriMesh,
    delta: float,
    method: str = "auto",
    rtol: float = BTL_CG_RTOL,
    maxiter: Optional[int] = None,
    initial_guess: Optional[np.ndarray] = None,
    system: Optional[FemSystem] = None,
) -> TorsionSolution:
    """
    Solve (K + delta^2 M) u = load and return T = load . u.

    ``method="auto"`` runs Jacobi-preconditioned CG and falls back to a dense
    Cholesky factorisation for small meshes when CG stalls. CG starts from the
    constant |boundary| / (delta^2 |domain|), which already satisfies the
    L1 identity.
    """
    delta = _check_delta(delta)
    if method not in SOLVER_METHODS:
        raise ValueError(f"method must be one of {SOLVER_METHODS}, got '{method}'")
    system = _system_for(mesh, delta, system)
    n = mesh.n_nodes

    if method == "dense":
        u = _dense_solve(system)
        residual = _relative_residual(system, u)
        logger.info(f"Dense solve: {n} nodes, residual {residual:.2e}, T = {system.load @ u:.10g}")
        return _solution(system, u, residual, 0, "dense", residual <= BTL_RESIDUAL_LIMIT)

    matrix = system.matrix
    x0 = initial_guess if initial_guess is not None else np.full(n, mesh.perimeter / (delta ** 2 * mesh.area))
    preconditioner = sparse.diags(1.0 / matrix.diagonal())
    iterations = 0

    def count(_xk):
        nonlocal iterations
        iterations += 1

    u, info = cg(
        matrix, system.load, x0=x0, rtol=rtol, atol=0.0,
        maxiter=maxiter if maxiter is not None else BTL_CG_MAXITER_FACTOR * n,
        M=preconditioner, callback=count,
    )
    residual = _relative_residual(system, u)
    logger.debug(f"CG info={info} after {iterations} iterations, residual {residual:.2e}")

    if residual <= BTL_RESIDUAL_LIMIT:
        logger.info(f"CG solve: {n} nodes, {iterations} iterations, residual {residual:.2e}, "
                    f"T = {system.load @ u:.10g}")
        return _solution(system, u, residual, iterations, "cg", True)

    if method == "auto" and n <= BTL_DENSE_FALLBACK_NODES:
        logger.warning(f"CG stalled at residual {residual:.2e} after {iterations} iterations; "
                       f"using dense Cholesky for {n} nodes")
        dense = _dense_solve(system)
        dense_residual = _relative_residual(system, dense)
        return _solution(system, dense, dense_residual, iterations, "dense", dense_residual <= BTL_RESIDUAL_LIMIT)

    partial = _solution(system, u, residual, iterations, "cg", False)
    logger.error(f"CG did not converge: residual {residual:.2e} after {iterations} iterations ({n} nodes)")
    raise SolverConvergenceError(
        f"CG did not reach residual {BTL_RESIDUAL_LIMIT:.0e}: residual {residual:.3e} after {iterations} iterations",
        residual=residual, iterations=iterations, solution=partial,
    )


def steklov_sigma1(
    mesh: TriMesh,
    delta: float,
    system: Optional[FemSystem] = None,
    rtol: float = BTL_STEKLOV_RTOL,
    max_iterations: int = BTL_STEKLOV_MAX_ITERATIONS,
) -> SteklovResult:
    """Smallest sigma of A u = sigma B u by inverse iteration with B-seminorm normalisation."""
    delta = _check_delta(delta)
    system = _system_for(mesh, delta, system)
    matrix, boundary = system.matrix, system.boundary_mass
    lu = splu(matrix.tocsc())

    u = np.ones(mesh.n_nodes)
    sigma = math.inf
    for iteration in range(1, max_iterations + 1):
        u = lu.solve(boundary @ u)
        norm_sq = float(u @ (boundary @ u))
        if norm_sq <= 0.0:
            raise SteklovConvergenceError("Iterate has zero boundary trace")
        u = u / math.sqrt(norm_sq)
        previous, sigma = sigma, float(u @ (matrix @ u))
        if abs(sigma - previous) <= rtol * sigma:
            au = matrix @ u
            residual = float(np.linalg.norm(au - sigma * (boundary @ u)) / np.linalg.norm(au))
            logger.info(f"Steklov inverse iteration: sigma1 = {sigma:.10g} after {iteration} iterations")
            return SteklovResult(sigma1=sigma, eigenvector=u, iterations=iteration, rayleigh_residual=residual)

    logger.error(f"Steklov inverse iteration did not settle after {max_iterations} iterations")
    raise SteklovConvergenceError(f"No convergence after {max_iterations} iterations (last sigma {sigma:.6g})")


def _system_for(mesh: TriMesh, delta: float, system: Optional[FemSystem]) -> FemSystem:
    if system is not None and system.mesh is mesh and system.delta == delta:
        return system
    return assemble(mesh, delta)


def rayleigh_T(mesh: TriMesh, delta: float, trial: np.ndarray, system: Optional[FemSystem] = None) -> float:
    """(int_boundary phi)^2 / (||grad phi||^2 + delta^2 ||phi||^2)."""
    system = _system_for(mesh, delta, system)
    flux = system.boundary_integral(trial)
    if flux == 0.0:
        raise ValueError("Trial field has zero boundary integral")
    return flux ** 2 / system.energy(trial)


def unconstrained_functional(mesh: TriMesh, delta: float, trial: np.ndarray,
                             system: Optional[FemSystem] = None) -> float:
    """2 int_boundary phi - ||grad phi||^2 - delta^2 ||phi||^2; maximised by u with value T."""
    system = _system_for(mesh, delta, system)
    return 2.0 * system.boundary_integral(trial) - system.energy(trial)


def dual_gap(mesh: TriMesh, delta: float, solution: TorsionSolution) -> float:
    """|(||grad u||^2 + delta^2 ||u||^2) - T| / T."""
    system = _system_for(mesh, delta, solution.system)
    return abs(system.energy(solution.nodal_values) - solution.rigidity) / solution.rigidity


def distance_trial(mesh: TriMesh, poly: ConvexPolygon, delta: float) -> np.ndarray:
    """Interior-parallels trial u_I(d(x)/r) with the slab profile at delta * r."""
    inradius, _ = inradius_and_chebyshev(poly)
    distance = np.clip(distance_to_boundary(poly, mesh.nodes), 0.0, inradius)
    return slab_profile(delta * inradius, distance / inradius)


def transplanted_trial(mesh: TriMesh, cmap: ConformalMap, delta: float) -> np.ndarray:
    """Disk torsion function at delta * rho evaluated at the template preimages, rho the Hardy norm."""
    if mesh.preimage is None:
        raise ValueError("Mesh carries no template preimage")
    rho = hardy_norm(cmap)
    disk = BallSpec(dimension=2, radius=1.0, delta=delta * rho)
    radii = np.clip(np.linalg.norm(mesh.preimage, axis=1), 0.0, 1.0)
    return np.array([ball_torsion_function(disk, float(s)) for s in radii])


def convergence_study(spec: DomainSpec, delta: float, levels: Sequence[int], exact_value: float) -> ConvergenceStudy:
    """T_h per refinement level, errors against ``exact_value`` and empirical orders log2(e_k / e_{k+1})."""
    levels = list(levels)
    rigidities, sizes = [], []
    for level in levels:
        mesh = build_mesh(spec, level)
        rigidities.append(solve_torsion(mesh, delta).rigidity)
        sizes.append(mesh.max_edge_length)
    errors = [abs(t - exact_value) / exact_value for t in rigidities]
    orders = [
        math.log(errors[k] / errors[k + 1]) / math.log(sizes[k] / sizes[k + 1])
        for k in range(len(errors) - 1)
        if errors[k + 1] > 0.0
    ]
    logger.info(f"Convergence study on {spec.kind.value}: errors {errors}, orders {orders}")
    return ConvergenceStudy(levels=levels, mesh_sizes=sizes, rigidities=rigidities, errors=errors, orders=orders)
