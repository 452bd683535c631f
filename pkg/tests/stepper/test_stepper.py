import numpy as np
import pytest

from lagrangefsi.core.datatypes import FinishReason, Phase, SolverParams
from lagrangefsi.core.exceptions import StepFailure
from lagrangefsi.compat.hierarchy import CompatData
from lagrangefsi.compat.initial_data import solid_bump
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh
from lagrangefsi.solvers.newton import check_jacobian
from lagrangefsi.stepper.problem import FSIProblem
from lagrangefsi.stepper.residual import ResidualEvaluator, assemble_residual
from lagrangefsi.stepper.stepper import initial_state, march, penalty_pressure, step

@pytest.fixture
def mesh():
    box = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    return build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.25, solids=[box]))

@pytest.fixture
def params():
    return SolverParams(dt=0.01, t_end=0.05, eps_pen=1e-2)

def bump_problem(mesh, params, amplitude=1e-2):
    compat = CompatData.zero(mesh)
    compat.u0[:] = solid_bump(mesh, amplitude)
    return FSIProblem(mesh, params, compat)

def test_zero_data_stays_at_rest(mesh, params):
    trajectory = march(FSIProblem(mesh, params))
    assert trajectory.reached_end
    assert trajectory.t_star == params.t_end
    assert len(trajectory.records) == params.n_steps + 1
    for state in trajectory.states:
        assert np.all(state.v == 0.0)
        assert np.array_equal(state.eta, mesh.nodes)
    assert all(record.total_energy <= 1e-20 for record in trajectory.records)
    assert all(report.newton_iterations == 0 for report in trajectory.reports)

def test_jacobian_matches_differences(mesh, params):
    problem = bump_problem(mesh, params, amplitude=0.1)
    state = initial_state(problem)
    evaluator = ResidualEvaluator(problem, state, params.dt)
    rng = np.random.default_rng(7)
    x = evaluator.pack(state.v) + 0.05 * rng.standard_normal(len(problem.free_dofs))
    assert check_jacobian(evaluator.residual, evaluator.jacobian, x) < 1e-5

def test_step_solves_the_residual(mesh, params):
    problem = bump_problem(mesh, params)
    state = initial_state(problem)
    new_state, report = step(state, problem)
    assert report.converged
    assert report.failure is None
    assert np.isclose(new_state.t, params.dt)
    residual = assemble_residual(new_state, state, problem)
    assert np.abs(residual).max() <= 10 * params.newton_tol
    assert np.allclose(new_state.eta, state.eta + params.dt * new_state.v)

def test_energy_does_not_increase(mesh, params):
    trajectory = march(bump_problem(mesh, params))
    assert trajectory.reached_end
    energies = [record.total_energy for record in trajectory.records]
    assert energies[0] > 0.0
    increases = np.diff(energies)
    assert increases.max() <= 1e-10 * energies[0]

def test_keep_states_and_callback(mesh, params):
    seen = []
    trajectory = march(bump_problem(mesh, params), keep_states=False, on_state=lambda n, state, record: seen.append(n))
    assert seen == list(range(params.n_steps + 1))
    assert len(trajectory.states) == 2
    assert np.isclose(trajectory.states[-1].t, params.t_end)

def test_newton_failure_is_recorded(mesh):
    params = SolverParams(dt=0.01, t_end=0.03, newton_maxit=1, newton_tol=1e-300)
    trajectory = march(bump_problem(mesh, params))
    assert trajectory.finish_reason == FinishReason.NewtonFailure
    assert not trajectory.reached_end
    assert np.isclose(trajectory.t_star, 0.01)
    assert len(trajectory.records) == 1

def test_penalty_pressure(mesh, params):
    state = initial_state(FSIProblem(mesh, params))
    state.v = np.stack([mesh.nodes[:, 0], np.zeros(mesh.n_nodes)], axis=1)
    q = penalty_pressure(state, None, 0.5, mesh)
    assert np.allclose(q[mesh.cells_of(Phase.Fluid)], -2.0)
    assert np.all(q[mesh.cells_of(Phase.Solid)] == 0.0)
    assert np.allclose(penalty_pressure(state, None, 0.5, mesh, freeze_cofactor=True), q)
    with pytest.raises(ValueError):
        penalty_pressure(state, None, 0.0, mesh)

def test_step_must_move_forward(mesh, params):
    problem = FSIProblem(mesh, params)
    with pytest.raises(ValueError):
        ResidualEvaluator(problem, initial_state(problem), 0.0)

def test_with_params_keeps_the_data(mesh, params):
    problem = bump_problem(mesh, params)
    other = problem.with_params(kappa=0.5)
    assert other.params.kappa == 0.5
    assert other.compat is problem.compat
    assert np.allclose(other.kappa_load(0.1), 0.0)

def test_pure_fluid_container(params):
    container = build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.25), require_solid=False)
    problem = FSIProblem(container, params)
    assert len(problem.solid_cells) == 0
    assert problem.kappa_stiffness.nnz == 0
    trajectory = march(problem)
    assert trajectory.reached_end
    assert all(record.elastic_energy == 0.0 for record in trajectory.records)

def test_failed_step_can_raise(mesh):
    params = SolverParams(dt=0.01, t_end=0.03, newton_maxit=1, newton_tol=1e-300)
    problem = bump_problem(mesh, params)
    state = initial_state(problem)
    same, report = step(state, problem)
    assert same is state
    assert report.failure == FinishReason.NewtonFailure
    with pytest.raises(StepFailure) as failure:
        step(state, problem, raise_on_failure=True)
    assert failure.value.reason == FinishReason.NewtonFailure
    assert failure.value.report.converged is False
