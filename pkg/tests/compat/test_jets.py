import numpy as np
import pytest

from lagrangefsi.compat.jets import ConfigurationJet, finite_difference_jet
from lagrangefsi.kinematics.tensors import cofactor_jet
from lagrangefsi.operators.elasticity import ElasticityTensor, svk_stress

@pytest.mark.parametrize("d", [2, 3])
def test_difference_jet_agrees_with_closed_form(d):
    rng = np.random.default_rng(5)
    H1, H2, H3 = (0.2 * rng.standard_normal((d, d)) for _ in range(3))
    for exact, estimate in zip(cofactor_jet(H1, H2, H3), finite_difference_jet(H1, H2, H3)):
        assert np.allclose(exact, estimate, atol=1e-5)

def test_stress_jet_matches_path_differences():
    rng = np.random.default_rng(6)
    H1, H2, H3 = (0.2 * rng.standard_normal((2, 2)) for _ in range(3))
    c = ElasticityTensor(lam=1.5, mu=0.8, dimension=2)
    jet = ConfigurationJet(H1, H2, H3)
    P1, P2, P3 = jet.stress(c.contract)
    P = lambda t: svk_stress(np.eye(2) + t * H1 + 0.5 * t * t * H2 + t ** 3 / 6.0 * H3, c)
    s = 1e-3
    assert np.allclose(P1, (P(s) - P(-s)) / (2.0 * s), atol=1e-5)
    assert np.allclose(P2, (P(s) - 2.0 * P(0.0) + P(-s)) / (s * s), atol=1e-5)
    assert np.allclose(P3, (P(2.0 * s) - 2.0 * P(s) + 2.0 * P(-s) - P(-2.0 * s)) / (2.0 * s ** 3), atol=1e-4)
