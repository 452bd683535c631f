import numpy as np
import pytest

from lagrangefsi.mesh.quadrature import QuadratureRule, FacetRule, local_signs

@pytest.mark.parametrize("dimension", [2, 3])
def test_partition_of_unity(dimension):
    rule = QuadratureRule(dimension, 3)
    assert len(rule) == 3 ** dimension
    assert np.isclose(rule.weights.sum(), 2.0 ** dimension)
    assert np.allclose(rule.shape.sum(axis=1), 1.0)
    assert np.allclose(rule.shape_gradients.sum(axis=1), 0.0)

def test_local_signs_bit_order():
    assert local_signs(2).tolist() == [[-1, -1], [1, -1], [-1, 1], [1, 1]]

def test_gauss_rule_integrates_quartic():
    rule = QuadratureRule(2, 3)
    x, y = rule.points[:, 0], rule.points[:, 1]
    assert np.isclose(np.sum(rule.weights * x ** 4 * y ** 2), (2.0 / 5.0) * (2.0 / 3.0))

def test_facet_rule_on_face():
    rule = FacetRule(2, axis=1, side=1)
    assert np.allclose(rule.points[:, 1], 1.0)
    assert np.isclose(rule.weights.sum(), 2.0)
    with pytest.raises(ValueError):
        FacetRule(2, axis=0, side=0)

def test_invalid_rules():
    with pytest.raises(ValueError):
        QuadratureRule(1, 3)
    with pytest.raises(ValueError):
        QuadratureRule(2, 0)
