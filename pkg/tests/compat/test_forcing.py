import numpy as np
import pytest

from lagrangefsi.compat.forcing import (
    CallableForce,
    ConstantForce,
    KappaForcingProfile,
    PulseForce,
    ZeroForce,
    make_forcing,
)
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh
from lagrangefsi.operators.elasticity import ElasticityTensor

@pytest.fixture
def mesh():
    box = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    return build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.125, solids=[box]))

def test_presets():
    assert make_forcing("zero", 2).is_zero
    gravity = make_forcing("gravity", 3, amplitude=9.81)
    assert np.allclose(gravity.value(0.0, np.zeros((4, 3))), [0.0, 0.0, -9.81])
    assert isinstance(make_forcing("pulse", 2), PulseForce)
    with pytest.raises(ValueError):
        make_forcing("wind", 2)

def test_constant_force_has_no_derivatives():
    f = ConstantForce([0.0, -1.0])
    x = np.random.default_rng(0).random((5, 2))
    assert np.allclose(f.evaluate(0.3, x, 2), 0.0)
    assert f.gradient(0.3, x).shape == (5, 2, 2)
    assert not f.is_zero
    assert ConstantForce([0.0, 0.0]).is_zero

def test_evaluate_rejects_high_orders():
    with pytest.raises(ValueError):
        ZeroForce(2).evaluate(0.0, np.zeros((1, 2)), 4)

def test_pulse_derivatives_match_differences():
    f = PulseForce(2, amplitude=2.0, omega=3.0)
    x = np.zeros((1, 2))
    s = 1e-5
    for order in (1, 2, 3):
        difference = (f.evaluate(0.4 + s, x, order - 1) - f.evaluate(0.4 - s, x, order - 1)) / (2.0 * s)
        assert np.allclose(f.evaluate(0.4, x, order), difference, rtol=1e-6, atol=1e-6)
    assert np.allclose(f.value(0.4, x)[:, 1], 0.0)

def test_callable_force_spatial_derivatives():
    f = CallableForce(2, lambda t, x: np.stack([x[..., 0] ** 2, t * x[..., 1]], axis=-1))
    x = np.array([[0.3, 0.7]])
    G = f.gradient(2.0, x)
    assert np.allclose(G[0], [[0.6, 0.0], [0.0, 2.0]], atol=1e-8)
    u = np.array([[1.0, 0.0]])
    assert np.allclose(f.second_derivative(2.0, x, u), [[2.0, 0.0]], atol=1e-5)

def test_callable_force_time_derivative_fallback():
    f = CallableForce(2, lambda t, x: np.sin(t) * np.ones_like(x), [lambda t, x: np.cos(t) * np.ones_like(x)])
    x = np.zeros((3, 2))
    assert np.allclose(f.evaluate(0.5, x, 1), np.cos(0.5))
    assert np.allclose(f.evaluate(0.5, x, 2), -np.sin(0.5), atol=1e-6)

def test_kappa_profile_is_quadratic_in_time(mesh):
    c = ElasticityTensor(lam=1.0, mu=1.0, dimension=2)
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    u0 = np.stack([x * y, np.zeros_like(x)], axis=1)
    w1 = np.stack([np.zeros_like(x), x ** 2], axis=1)
    w2 = np.stack([y, x], axis=1)
    profile = KappaForcingProfile.build(u0, w1, w2, c, mesh)
    for t in (0.0, 0.5, 2.0):
        expected = profile.bulk_weak[0] + t * profile.bulk_weak[1] + 0.5 * t * t * profile.bulk_weak[2]
        assert np.allclose(profile.load(t), expected)
        assert np.allclose(profile.load(t, include_interface_flux=False) - profile.g_weak(t), expected)
    assert profile.g(1.0).values.shape == (mesh.n_facets, 3, 2)

def test_kappa_profile_of_zero_data(mesh):
    c = ElasticityTensor(lam=1.0, mu=1.0, dimension=2)
    zero = np.zeros((mesh.n_nodes, 2))
    profile = KappaForcingProfile.build(zero, zero, zero, c, mesh)
    assert np.allclose(profile.h(0.3).weak, 0.0)
    assert np.allclose(profile.g(0.3).mean, 0.0)
