import numpy as np
import pytest

from lagrangefsi.core.datatypes import DeformationState, DiagnosticsRecord, FinishReason, Trajectory
from lagrangefsi.core.exceptions import ConfigValidationError
from lagrangefsi.readers.config import RunConfig
from lagrangefsi.experiments.sweeps import (
    common_levels,
    convergence_table,
    h1_problem,
    kappa_configs,
    run_name,
    sweep_table,
    trajectory_distance,
    worker_count,
)
from lagrangefsi.stepper.diagnostics import h1_norm

def trajectory(t_star, reason=FinishReason.Finished, zt=1.0):
    return Trajectory(records=[DiagnosticsRecord(zt_proxy=zt)], t_end=0.5, t_star=t_star, finish_reason=reason)

def test_worker_count_honors_the_cap(monkeypatch):
    monkeypatch.setenv("FSI_THREADS", "2")
    assert worker_count(5) == 2
    assert worker_count(1) == 1
    monkeypatch.setenv("FSI_THREADS", "0")
    with pytest.raises(ConfigValidationError):
        worker_count(3)
    monkeypatch.setenv("FSI_THREADS", "many")
    with pytest.raises(ConfigValidationError) as info:
        worker_count(3)
    assert info.value.field == "FSI_THREADS"

def test_sweep_table_sorts_by_kappa():
    runs = [
        (1e-3, trajectory(0.25, FinishReason.NewtonFailure, zt=7.0)),
        (1e-1, trajectory(0.5)),
        (1e-2, trajectory(0.5)),
    ]
    table = sweep_table(runs, 0.5)
    assert [row.kappa for row in table.rows] == [1e-1, 1e-2, 1e-3]
    assert table.rows[-1].zt_norm == 7.0
    assert not table.rows[-1].reached_end
    assert table.rows[0].run_name == "kappa_0.1"
    assert np.isclose(table.t_star_ratio, 0.5)

def test_kappa_configs_change_only_kappa():
    base = RunConfig()
    configs = kappa_configs(base, [0.1, 0.01], t_end=0.05)
    assert [c.numerics.kappa for c in configs] == [0.1, 0.01]
    assert all(c.numerics.t_end == 0.05 for c in configs)
    assert all(c.geometry == base.geometry and c.data == base.data for c in configs)

def test_run_name():
    assert run_name(0.001) == "kappa_0.001"

def constant_run(values, problem):
    states = [
        DeformationState(t=0.1 * n, eta=problem.mesh.nodes.copy(), v=np.full(problem.mesh.nodes.shape, value),
                         q=np.zeros(problem.mesh.n_cells))
        for n, value in enumerate(values)
    ]
    return Trajectory(states=states, t_end=0.2, t_star=states[-1].t)

def test_distances_cover_the_common_interval():
    problem = h1_problem(RunConfig().replace(geometry={"h": 0.25}))
    full = constant_run([0.0, 1.0, 1.0], problem)
    short = constant_run([0.0, 0.0], problem)
    assert common_levels([full, short]) == 2
    expected = np.sqrt(0.1) * h1_norm(np.ones(problem.mesh.nodes.shape), problem)
    assert np.isclose(trajectory_distance(full, short, problem), expected)
    assert np.isclose(trajectory_distance(full, short, problem, n_levels=3), expected)
    table = convergence_table([(0.1, full)], short, 0.01, problem, common_levels([full, short]))
    assert np.isclose(table.horizon, 0.1)
    assert np.isclose(table.rows[0].distance, expected)
    assert convergence_table([(0.1, full)], short, 0.01, problem).horizon is None
