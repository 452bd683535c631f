import numpy as np
import pytest

from lagrangefsi.kinematics.tensors import (
    cofactor_array,
    cofactor_derivative,
    cofactor_jet,
    det_array,
    strain_jet,
    strain_offset_array,
)

@pytest.fixture
def rng():
    return np.random.default_rng(0)

@pytest.mark.parametrize("d", [2, 3])
def test_cofactor_matches_adjugate(rng, d):
    F = np.eye(d) + 0.2 * rng.standard_normal((50, d, d))
    a = cofactor_array(F)
    assert np.allclose(a, det_array(F)[:, None, None] * np.linalg.inv(F), rtol=0, atol=1e-12)
    assert np.allclose(np.einsum("nij,nji->n", a, F), d * det_array(F), rtol=0, atol=1e-12)

@pytest.mark.parametrize("d", [2, 3])
def test_cofactor_of_identity(d):
    assert np.allclose(cofactor_array(np.eye(d)), np.eye(d))
    assert det_array(np.eye(d)) == 1.0

def test_cofactor_rejects_other_dimensions():
    with pytest.raises(ValueError):
        cofactor_array(np.eye(4))

def test_strain_offset_symmetric(rng):
    F = np.eye(3) + 0.3 * rng.standard_normal((10, 3, 3))
    E = strain_offset_array(F)
    assert np.array_equal(E, np.swapaxes(E, -1, -2))
    assert np.allclose(strain_offset_array(np.eye(3)), 0.0)

@pytest.mark.parametrize("d", [2, 3])
def test_cofactor_derivative_matches_differences(rng, d):
    F = np.eye(d) + 0.2 * rng.standard_normal((d, d))
    Da = cofactor_derivative(F)
    step = 1e-6
    for m in range(d):
        for n in range(d):
            E = np.zeros((d, d))
            E[m, n] = step
            difference = (cofactor_array(F + E) - cofactor_array(F - E)) / (2.0 * step)
            assert np.allclose(Da[..., m, n], difference, atol=1e-8)

@pytest.mark.parametrize("d", [2, 3])
def test_cofactor_jet_matches_polynomial(rng, d):
    H1, H2, H3 = (0.1 * rng.standard_normal((d, d)) for _ in range(3))
    path = lambda t: cofactor_array(np.eye(d) + t * H1 + 0.5 * t ** 2 * H2 + t ** 3 / 6.0 * H3)
    # the cofactor along the path is a polynomial of degree at most 6 in t
    times = np.linspace(-1.0, 1.0, 9)
    samples = np.array([path(t) for t in times]).reshape(len(times), -1)
    coefficients = np.polyfit(times, samples, 6)
    first, second, third = cofactor_jet(H1, H2, H3)
    assert np.allclose(first.ravel(), coefficients[-2], atol=1e-10)
    assert np.allclose(second.ravel(), 2.0 * coefficients[-3], atol=1e-10)
    assert np.allclose(third.ravel(), 6.0 * coefficients[-4], atol=1e-10)

def test_strain_jet_first_order(rng):
    H1, H2, H3 = (0.1 * rng.standard_normal((2, 2)) for _ in range(3))
    E1, _, _ = strain_jet(H1, H2, H3)
    assert np.allclose(E1, H1 + H1.T)
