"""Lagrangian fluid operators with cofactor coefficients. License: GPL-3.0"""

import numpy as np
from typing import Union

from lagrangefsi.core.datatypes import Phase, PointRule
from lagrangefsi.core.exceptions import PhaseMismatchError
from lagrangefsi.kinematics.fields import PointField, ScalarField, CofactorField
from lagrangefsi.kinematics.recovery import cell_gradient, strong_divergence
from lagrangefsi.operators.assembly import assemble_vector
from lagrangefsi.operators.elasticity import OperatorOutput, check_on_phase

def restrict(field: PointField, cells: np.ndarray) -> np.ndarray:
    """Values of a point field on a subset of its cells, in the order of `cells`."""
    position = np.full(field.mesh.n_cells, -1)
    position[field.cells] = np.arange(len(field.cells))
    selected = position[cells]
    if np.any(selected < 0):
        raise PhaseMismatchError(f"{type(field).__name__} on {field.phase.value} cells does not cover the requested cells")
    return field.values[selected]

def metric(a: np.ndarray) -> np.ndarray:
    """B^{jk} = a^j_l a^k_l."""
    return a @ np.swapaxes(a, -1, -2)

def viscous_flux(a: np.ndarray, G: np.ndarray, nu: float) -> np.ndarray:
    """nu a^j_l a^k_l v^i,_k, indexed [i, j]."""
    return nu * G @ metric(a)

def pressure_flux(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """a^k_i q, indexed [i, k]."""
    return q[..., None, None] * np.swapaxes(a, -1, -2)

def lagrangian_div_array(a: np.ndarray, G: np.ndarray) -> np.ndarray:
    """a^k_i v^i,_k for point values of a and G = grad v."""
    return np.einsum("...ki,...ik->...", a, G)

def fluid_viscous(a: CofactorField, v: np.ndarray, mesh, nu: float = 1.0) -> OperatorOutput:
    """
    The viscous term -nu (a^j_l a^k_l v^i,_k),_j on the fluid cells.

    Parameters:
        a (CofactorField): Cofactor at the Gauss points of (at least) the fluid cells.
        v (np.ndarray): Nodal velocity, shape (n_nodes, d).
        nu (float): Kinematic viscosity.

    Returns:
        OperatorOutput: Weak pairing nu int a^j_l a^k_l v^i,_k phi^i,_j and strong nodal values.
    """
    v = check_on_phase(v, mesh, Phase.Fluid)
    cells = mesh.cells_of(Phase.Fluid)
    rule = PointRule(a.rule)
    P = viscous_flux(restrict(a, cells), cell_gradient(v, mesh, cells, rule), nu)
    return OperatorOutput(
        values=-strong_divergence(P, mesh, Phase.Fluid, rule),
        weak=assemble_vector(P, mesh, cells, rule),
        phase=Phase.Fluid,
        interior=mesh.interior_nodes(Phase.Fluid, depth=2),
    )

def lagrangian_div(a: CofactorField, v: np.ndarray) -> ScalarField:
    """Pointwise a^k_i v^i,_k at the points of the cofactor field."""
    mesh = a.mesh
    v = check_on_phase(v, mesh, a.phase)
    G = cell_gradient(v, mesh, a.cells, PointRule(a.rule))
    return ScalarField(values=lagrangian_div_array(a.values, G), mesh=mesh, phase=a.phase, rule=a.rule, cells=a.cells)

def _pressure_values(q: Union[ScalarField, np.ndarray], a: CofactorField, cells: np.ndarray) -> np.ndarray:
    if isinstance(q, PointField):
        if PointRule(q.rule) != PointRule(a.rule):
            raise PhaseMismatchError(f"Pressure on {q.rule.value} points paired with a cofactor on {a.rule.value} points")
        return restrict(q, cells)
    q = np.asarray(q, dtype=float)
    if q.shape == (a.mesh.n_cells,):
        n_points = len(a.mesh.rule(a.rule))
        return np.repeat(q[cells][:, None], n_points, axis=1)
    raise PhaseMismatchError(f"Pressure of shape {q.shape} is neither a point field nor cellwise over {a.mesh.n_cells} cells")

def pressure_term(a: CofactorField, q: Union[ScalarField, np.ndarray], mesh=None) -> OperatorOutput:
    """
    The pressure term (a^k_i q),_k on the fluid cells, paired as int a^k_i q phi^i,_k.

    `q` is a ScalarField on the points of `a` or a cellwise array (n_cells,).
    """
    mesh = a.mesh if mesh is None else mesh
    cells = mesh.cells_of(Phase.Fluid)
    rule = PointRule(a.rule)
    values = _pressure_values(q, a, cells)
    if not np.all(np.isfinite(values)):
        raise PhaseMismatchError("Pressure is not defined on every fluid cell")
    P = pressure_flux(restrict(a, cells), values)
    return OperatorOutput(
        values=strong_divergence(P, mesh, Phase.Fluid, rule),
        weak=assemble_vector(P, mesh, cells, rule),
        phase=Phase.Fluid,
        interior=mesh.interior_nodes(Phase.Fluid, depth=2),
    )
