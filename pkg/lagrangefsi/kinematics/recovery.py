"""Interpolation to rule points and lumped L2 recovery back to the nodes."""

import numpy as np
from lagrangefsi.core.datatypes import Phase, PointRule

def at_points(field: np.ndarray, mesh, cells: np.ndarray, rule: PointRule = PointRule.Gauss) -> np.ndarray:
    """Interpolate a nodal field (n_nodes, ...) to the rule points, shape (C, Q, ...)."""
    local = field[mesh.cells[cells]]
    return np.tensordot(mesh.rule(rule).shape, local, axes=([1], [1])).swapaxes(0, 1)

def cell_gradient(field: np.ndarray, mesh, cells: np.ndarray, rule: PointRule = PointRule.Gauss) -> np.ndarray:
    """Gradient of a nodal field at the rule points, shape (C, Q, ..., d); the last axis differentiates."""
    local = field[mesh.cells[cells]]
    dN = mesh.physical_gradients(rule)
    return np.einsum("qaj,ca...->cq...j", dN, local)

def recover(values: np.ndarray, mesh, cells: np.ndarray, rule: PointRule = PointRule.Gauss) -> np.ndarray:
    """
    Lumped L2 projection of point values (C, Q, ...) onto the nodes of the cells.

    Nodes not touched by the cells get zero.
    """
    rule_data = mesh.rule(rule)
    weights = rule_data.weights[:, None] * rule_data.shape
    numerator = np.zeros((mesh.n_nodes,) + values.shape[2:])
    denominator = np.zeros(mesh.n_nodes)
    contribution = np.einsum("qa,cq...->ca...", weights, values)
    np.add.at(numerator, mesh.cells[cells], contribution)
    np.add.at(denominator, mesh.cells[cells], np.broadcast_to(weights.sum(axis=0), (len(cells), weights.shape[1])))
    touched = denominator > 0
    numerator[touched] /= denominator[touched].reshape((-1,) + (1,) * (values.ndim - 2))
    return numerator

def nodal_gradient(field: np.ndarray, mesh, phase: Phase) -> np.ndarray:
    cells = mesh.cells_of(phase)
    return recover(cell_gradient(field, mesh, cells), mesh, cells)

def nodal_divergence(field: np.ndarray, mesh, phase: Phase) -> np.ndarray:
    """Divergence over the last axis of a nodal field (n_nodes, ..., d)."""
    gradient = nodal_gradient(field, mesh, phase)
    return np.trace(gradient, axis1=-2, axis2=-1)

def strong_divergence(values: np.ndarray, mesh, phase: Phase, rule: PointRule = PointRule.Gauss) -> np.ndarray:
    """Nodal divergence of point values (C, Q, ..., d) given on the phase cells."""
    cells = mesh.cells_of(phase)
    return nodal_divergence(recover(values, mesh, cells, rule), mesh, phase)

def nodal_laplacian(field: np.ndarray, mesh, phase: Phase) -> np.ndarray:
    return nodal_divergence(nodal_gradient(field, mesh, phase), mesh, phase)
