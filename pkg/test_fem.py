"""
Tests for the P1 torsion solver, the Steklov eigenvalue and the variational checks.
Run with: pytest test_fem.py
"""

import math

import numpy as np
import pytest

from btl.models.domain_types import DomainSpec
from btl.services import exact
from btl.services.exact import BallSpec, BoxSpec, ShellSpec
from btl.services.fem import (
    SolverConvergenceError,
    assemble,
    convergence_study,
    distance_trial,
    dual_gap,
    rayleigh_T,
    solve_torsion,
    steklov_sigma1,
    transplanted_trial,
    unconstrained_functional,
)
from btl.services.mesh import build_mesh, conformal_map_from_spec, polygon_from_spec

SQUARE = DomainSpec.rectangle(1.0, 1.0)
DISK = DomainSpec.disk(1.0, segments=64)
ANNULUS = DomainSpec.annulus(1.0, 2.0, segments=48)
HEXAGON = DomainSpec.polygon([[math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)] for k in range(6)])
MAPPED = DomainSpec.mapped_disk([1.0, 0.1], segments=32)


def test_assembled_forms_on_a_fan():
    mesh = build_mesh(HEXAGON, 0)
    system = assemble(mesh, 0.0)
    np.testing.assert_allclose(np.asarray(system.stiffness.sum(axis=1)).ravel(), 0.0, atol=1e-13)
    ones = np.ones(mesh.n_nodes)
    np.testing.assert_allclose(system.load.sum(), mesh.perimeter, rtol=1e-13)
    np.testing.assert_allclose(ones @ (system.mass @ ones), mesh.area, rtol=1e-13)
    np.testing.assert_allclose(ones @ (system.boundary_mass @ ones), mesh.perimeter, rtol=1e-13)
    np.testing.assert_allclose(system.boundary_mass @ ones, system.load, atol=1e-14)


def test_stiffness_reproduces_gradient_energy():
    mesh = build_mesh(SQUARE, 2)
    system = assemble(mesh, 1.0)
    linear = 2.0 * mesh.nodes[:, 0] - mesh.nodes[:, 1]
    np.testing.assert_allclose(linear @ (system.stiffness @ linear), 5.0 * 4.0, rtol=1e-12)


ACCURACY_CASES = [
    {"name": "unit disk, delta 1", "spec": DISK, "level": 2, "delta": 1.0,
     "exact": BallSpec(dimension=2, radius=1.0, delta=1.0)},
    {"name": "square, delta 0.5", "spec": SQUARE, "level": 5, "delta": 0.5,
     "exact": BoxSpec(half_lengths=[1.0, 1.0], delta=0.5)},
    {"name": "square, delta 1", "spec": SQUARE, "level": 5, "delta": 1.0,
     "exact": BoxSpec(half_lengths=[1.0, 1.0], delta=1.0)},
    {"name": "square, delta 2", "spec": SQUARE, "level": 5, "delta": 2.0,
     "exact": BoxSpec(half_lengths=[1.0, 1.0], delta=2.0)},
    {"name": "annulus 1 < r < 2, delta 1", "spec": ANNULUS, "level": 2, "delta": 1.0,
     "exact": ShellSpec(dimension=2, inner_radius=1.0, outer_radius=2.0, delta=1.0)},
]


@pytest.mark.parametrize("case", ACCURACY_CASES, ids=[c["name"] for c in ACCURACY_CASES])
def test_rigidity_matches_closed_form(case):
    mesh = build_mesh(case["spec"], case["level"])
    solution = solve_torsion(mesh, case["delta"])
    assert solution.converged
    np.testing.assert_allclose(solution.rigidity, exact.rigidity(case["exact"]), rtol=0.01)


def test_disk_rigidity_reference_value():
    solution = solve_torsion(build_mesh(DISK, 2), 1.0)
    np.testing.assert_allclose(solution.rigidity, 14.07555, rtol=0.01)


@pytest.mark.parametrize("spec", [SQUARE, DISK, HEXAGON, ANNULUS], ids=["square", "disk", "hexagon", "annulus"])
def test_solution_properties(spec):
    mesh = build_mesh(spec, 2)
    solution = solve_torsion(mesh, 1.0)
    assert solution.solver_residual <= 1e-10
    assert solution.l1_identity_defect <= 1e-8
    assert solution.min_value >= -1e-10
    assert solution.max_principle_gap <= 1e-10
    assert dual_gap(mesh, 1.0, solution) <= 1e-9


def test_rigidity_decreases_in_delta():
    mesh = build_mesh(HEXAGON, 3)
    values = [solve_torsion(mesh, delta).rigidity for delta in [0.25, 0.5, 1.0, 2.0, 4.0]]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


@pytest.mark.parametrize("spec,level", [(SQUARE, 3), (DISK, 1)], ids=["square", "disk"])
def test_nodal_values_decrease_in_delta(spec, level):
    mesh = build_mesh(spec, level)
    low = solve_torsion(mesh, 0.5).nodal_values
    high = solve_torsion(mesh, 1.0).nodal_values
    assert np.all(low >= high - 1e-10)


def test_cg_and_dense_agree():
    mesh = build_mesh(SQUARE, 3)
    assert mesh.n_nodes <= 200
    iterative = solve_torsion(mesh, 1.0, method="cg", rtol=1e-14)
    dense = solve_torsion(mesh, 1.0, method="dense")
    assert dense.method == "dense"
    np.testing.assert_allclose(iterative.rigidity, dense.rigidity, rtol=1e-10)
    np.testing.assert_allclose(iterative.nodal_values, dense.nodal_values, atol=1e-10)


def test_cg_failure_carries_partial_solution():
    mesh = build_mesh(SQUARE, 5)
    with pytest.raises(SolverConvergenceError) as excinfo:
        solve_torsion(mesh, 1.0, method="cg", maxiter=3)
    error = excinfo.value
    assert error.residual > 1e-10
    assert error.iterations <= 3
    assert error.solution is not None
    assert not error.solution.converged


def test_unknown_method_and_bad_delta():
    mesh = build_mesh(SQUARE, 0)
    with pytest.raises(ValueError):
        solve_torsion(mesh, 1.0, method="lu")
    with pytest.raises(ValueError):
        solve_torsion(mesh, 0.0)
    with pytest.raises(ValueError):
        solve_torsion(mesh, -1.0)


def test_steklov_on_the_disk():
    mesh = build_mesh(DISK, 2)
    result = steklov_sigma1(mesh, 1.0)
    expected = exact.ball_steklov_sigma1(BallSpec(dimension=2, radius=1.0, delta=1.0))
    np.testing.assert_allclose(expected, 0.446390, atol=5e-7)
    np.testing.assert_allclose(result.sigma1, expected, rtol=0.01)
    assert result.rayleigh_residual < 1e-3
    solution = solve_torsion(mesh, 1.0, system=assemble(mesh, 1.0))
    np.testing.assert_allclose(result.sigma1 * solution.rigidity / mesh.perimeter, 1.0, atol=5e-3)


@pytest.mark.parametrize("spec", [SQUARE, HEXAGON, ANNULUS], ids=["square", "hexagon", "annulus"])
@pytest.mark.parametrize("delta", [0.5, 2.0])
def test_steklov_discrete_bounds(spec, delta):
    mesh = build_mesh(spec, 2)
    system = assemble(mesh, delta)
    sigma = steklov_sigma1(mesh, delta, system=system).sigma1
    rigidity = solve_torsion(mesh, delta, system=system).rigidity
    assert sigma <= delta ** 2 * mesh.area / mesh.perimeter * (1.0 + 1e-9)
    assert sigma * rigidity / mesh.perimeter <= 1.0 + 1e-8


def test_rayleigh_quotients():
    mesh = build_mesh(SQUARE, 4)
    system = assemble(mesh, 1.0)
    solution = solve_torsion(mesh, 1.0, system=system)
    rigidity = solution.rigidity

    np.testing.assert_allclose(rayleigh_T(mesh, 1.0, solution.nodal_values, system), rigidity, rtol=1e-9)
    np.testing.assert_allclose(unconstrained_functional(mesh, 1.0, solution.nodal_values, system), rigidity, rtol=1e-9)
    np.testing.assert_allclose(rayleigh_T(mesh, 1.0, np.ones(mesh.n_nodes), system), 8.0 ** 2 / 4.0, rtol=1e-12)

    trial = distance_trial(mesh, polygon_from_spec(SQUARE), 1.0)
    value = rayleigh_T(mesh, 1.0, trial, system)
    assert 0.0 < value <= rigidity
    assert unconstrained_functional(mesh, 1.0, trial, system) <= rigidity
    with pytest.raises(ValueError):
        rayleigh_T(mesh, 1.0, np.zeros(mesh.n_nodes), system)


def test_transplanted_trial_is_a_lower_bound():
    mesh = build_mesh(MAPPED, 2)
    system = assemble(mesh, 1.0)
    rigidity = solve_torsion(mesh, 1.0, system=system).rigidity
    trial = transplanted_trial(mesh, conformal_map_from_spec(MAPPED), 1.0)
    assert rayleigh_T(mesh, 1.0, trial, system) <= rigidity * (1.0 + 1e-12)
    with pytest.raises(ValueError):
        transplanted_trial(build_mesh(SQUARE, 0), conformal_map_from_spec(MAPPED), 1.0)


def test_second_order_convergence_on_the_square():
    spec = BoxSpec(half_lengths=[1.0, 1.0], delta=1.0)
    study = convergence_study(SQUARE, 1.0, [2, 3, 4, 5], exact.rigidity(spec))
    assert len(study.orders) == 3
    assert all(order >= 1.8 for order in study.orders)
    assert study.errors[-1] < study.errors[0]


def test_second_order_convergence_on_the_disk():
    spec = BallSpec(dimension=2, radius=1.0, delta=1.0)
    study = convergence_study(DomainSpec.disk(1.0, segments=16), 1.0, [0, 1, 2, 3], exact.rigidity(spec))
    assert study.orders[-1] >= 1.8
