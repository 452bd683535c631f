import numpy as np
import pytest

from lagrangefsi.compat.initial_data import solid_bump
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh
from lagrangefsi.operators.elasticity import ElasticityTensor
from lagrangefsi.experiments.lemma_key import (
    exponential_weights,
    integrate_relaxation,
    lemma_key_suite,
    lemma_key_trial,
    random_profile,
    scalar_mode_check,
)

@pytest.fixture
def mesh():
    box = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    return build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.25, solids=[box]))

@pytest.fixture
def c():
    return ElasticityTensor(lam=1.0, mu=1.0, dimension=2)

@pytest.mark.parametrize("step, eps", [(0.01, 1.0), (0.01, 1e-6), (1.0, 1.0)])
def test_exponential_weights_are_convex(step, eps):
    weights = exponential_weights(step, eps)
    assert all(w >= 0.0 for w in weights)
    assert np.isclose(sum(weights), 1.0)

def test_relaxation_with_constant_source():
    times = np.linspace(0.0, 1.0, 11)
    values = integrate_relaxation(np.zeros(3), lambda t: np.ones(3), 0.1, times)
    for t, y in zip(times, values):
        assert np.allclose(y, 1.0 - np.exp(-t / 0.1))

def test_bound_holds_for_every_eps(mesh, c):
    g = random_profile(mesh, np.random.default_rng(3))
    report = lemma_key_trial(mesh, c, solid_bump(mesh, 1e-2), g, [1.0, 1e-2, 1e-6], t_end=1.0, dt=0.05)
    assert report.eps_values == [1.0, 1e-2, 1e-6]
    assert len(report.sup_norms) == 3
    assert min(report.slack) >= -1e-12 * report.bound

def test_invalid_eps(mesh, c):
    g = random_profile(mesh, np.random.default_rng(0))
    with pytest.raises(ValueError):
        lemma_key_trial(mesh, c, np.zeros((mesh.n_nodes, 2)), g, [1.0, 0.0], t_end=1.0, dt=0.1)

def test_suite_is_seeded(mesh, c):
    u0 = np.zeros((mesh.n_nodes, 2))
    first = lemma_key_suite(mesh, c, u0, [1e-2], t_end=0.5, dt=0.05, trials=2, seed=4)
    second = lemma_key_suite(mesh, c, u0, [1e-2], t_end=0.5, dt=0.05, trials=2, seed=4)
    assert len(first) == 2
    assert [r.bound for r in first] == [r.bound for r in second]

def test_scalar_mode(mesh, c):
    result = scalar_mode_check(mesh, c, 1.0, [1.0, 1e-2], t_end=0.5, dt=0.05)
    assert result["eigenvalue"] > 0.0
    assert result["max_error"] <= 1e-10
    assert result["eigen_residual"] <= 1e-8
