import numpy as np
import pytest

from lagrangefsi.core.datatypes import SolverParams
from lagrangefsi.core.exceptions import ExperimentError
from lagrangefsi.compat.hierarchy import CompatData
from lagrangefsi.compat.initial_data import solid_bump
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh
from lagrangefsi.stepper.problem import FSIProblem
from lagrangefsi.stepper.stepper import march
from lagrangefsi.experiments.norms import energy_trace, zt_norm

@pytest.fixture
def problem():
    box = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    mesh = build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.25, solids=[box]))
    compat = CompatData.zero(mesh)
    compat.u0[:] = solid_bump(mesh, 1e-2)
    return FSIProblem(mesh, SolverParams(dt=0.01, t_end=0.05, eps_pen=1e-2), compat)

def test_energy_trace_follows_the_records(problem):
    trajectory = march(problem)
    trace = energy_trace(trajectory)
    assert len(trace.times) == len(trajectory.records)
    assert np.allclose(np.array(trace.kinetic) + np.array(trace.elastic), trace.total)
    assert trace.max_increase() <= 1e-10 * trace.total[0]

def test_zt_norm_members(problem):
    trajectory = march(problem)
    norm = zt_norm(trajectory)
    assert set(norm.terms) == {"v_L2H1", "eta_LinfH2", "q_LinfL2"}
    assert norm.proxy_terms == []
    assert np.isclose(norm.value, sum(norm.terms.values()))
    assert norm.terms["v_L2H1"] > 0.0

def test_zt_norm_with_difference_quotients(problem):
    trajectory = march(problem)
    norm = zt_norm(trajectory, problem, difference_quotients=True)
    assert norm.proxy_terms == ["v_t_L2H1", "v_tt_L2L2"]
    assert all(norm.terms[name] >= 0.0 for name in norm.proxy_terms)
    with pytest.raises(ValueError):
        zt_norm(trajectory, difference_quotients=True)

def test_zt_norm_needs_enough_states(problem):
    trajectory = march(problem, keep_states=False)
    with pytest.raises(ExperimentError):
        zt_norm(trajectory, problem, difference_quotients=True)
