import numpy as np
import pytest

from lagrangefsi.core.datatypes import DeformationState, SolverParams
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh
from lagrangefsi.stepper.diagnostics import (
    ZProxy,
    constraint_residual,
    displacement_h2,
    elastic_energy,
    h1_norm,
    kinetic_energy,
    min_det,
    record_state,
)
from lagrangefsi.stepper.problem import FSIProblem

@pytest.fixture
def problem():
    box = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    mesh = build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.25, solids=[box]))
    return FSIProblem(mesh, SolverParams(dt=0.01, t_end=0.1))

def test_energies_of_uniform_motion(problem):
    v = np.tile([1.0, 0.0], (problem.mesh.n_nodes, 1))
    assert np.isclose(kinetic_energy(v, problem), 0.5)
    assert np.isclose(h1_norm(v, problem), 1.0)
    assert np.isclose(elastic_energy(problem.mesh.nodes, problem), 0.0)

def test_translation_has_no_strain(problem):
    eta = problem.mesh.nodes + np.array([0.1, 0.2])
    assert np.isclose(elastic_energy(eta, problem), 0.0)
    assert np.isclose(min_det(eta, problem), 1.0)
    assert displacement_h2(eta, problem) > 0.0

def test_stretch_energy(problem):
    eta = 1.1 * problem.mesh.nodes
    E = (1.1 ** 2 - 1.0) * np.eye(2)
    density = problem.c.energy_density(E)
    assert np.isclose(elastic_energy(eta, problem), density * 0.25)

def test_constraint_residual(problem):
    mesh = problem.mesh
    v = np.stack([mesh.nodes[:, 0], np.zeros(mesh.n_nodes)], axis=1)
    assert np.isclose(constraint_residual(mesh.nodes, v, problem), np.sqrt(0.75))
    rotation = np.stack([-mesh.nodes[:, 1], mesh.nodes[:, 0]], axis=1)
    assert np.isclose(constraint_residual(mesh.nodes, rotation, problem), 0.0)

def test_zproxy_accumulates():
    proxy = ZProxy()
    proxy.update(0.0, 1.0, 2.0, 3.0)
    proxy.update(0.5, 2.0, 1.0, 1.0)
    assert proxy.terms == {"v_L2H1": 2.0, "eta_LinfH2": 4.0, "q_LinfL2": 9.0}
    assert proxy.value == 15.0

def test_record_state(problem):
    mesh = problem.mesh
    state = DeformationState(eta=mesh.nodes.copy(), v=np.zeros((mesh.n_nodes, 2)), q=np.zeros(mesh.n_cells))
    record = record_state(problem, state, 0, ZProxy())
    assert record.step == 0
    assert np.isclose(record.total_energy, 0.0)
    assert np.isclose(record.min_det, 1.0)
    assert record.zt_proxy == 0.0
