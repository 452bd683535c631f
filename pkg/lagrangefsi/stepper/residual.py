"""
Backward-Euler residual of the coupled system and its exact Jacobian in the new velocity.

All terms live in one global weak form over the container, so the interface
tractions cancel between the phases and only the kappa interface flux remains
as an explicit load. With eta = eta_old + dt v the residual reads

    M (v - v_old) / dt + nu int a a^T : grad v grad phi - int q a^T : grad phi
        + int F S(F) : grad phi + kappa int c grad v : grad phi - loads,

where q = q_h(t) - (1/eps) a_i^j v^i,_j is taken at the fluid cell centres.
"""

import numpy as np
import scipy.sparse as sp
from typing import Optional, Tuple

from lagrangefsi.core.datatypes import DeformationState, PointRule
from lagrangefsi.kinematics.recovery import at_points, cell_gradient
from lagrangefsi.kinematics.tensors import cofactor_array, cofactor_derivative
from lagrangefsi.operators.assembly import assemble_vector, assemble_matrix, assemble_load, assemble_mass
from lagrangefsi.operators.elasticity import svk_stress, svk_tangent
from lagrangefsi.operators.fluid import metric, viscous_flux, pressure_flux, lagrangian_div_array

def _kinematics(eta: np.ndarray, problem, cells: np.ndarray, rule: PointRule):
    F = cell_gradient(eta, problem.mesh, cells, rule)
    d = problem.dimension
    if problem.params.freeze_cofactor:
        a = np.broadcast_to(np.eye(d), F.shape).copy()
        Da = np.zeros(F.shape + (d, d))
    else:
        a = cofactor_array(F)
        Da = cofactor_derivative(F)
    return F, a, Da

def viscous_term(eta: np.ndarray, v: np.ndarray, problem, dt: float, jacobian: bool = False):
    mesh, cells, nu = problem.mesh, problem.fluid_cells, problem.params.nu
    out = np.zeros_like(v)
    if len(cells) == 0:
        return out, None
    _, a, Da = _kinematics(eta, problem, cells, PointRule.Gauss)
    G = cell_gradient(v, mesh, cells)
    out += assemble_vector(viscous_flux(a, G, nu), mesh, cells)
    if not jacobian:
        return out, None
    I = np.eye(problem.dimension)
    B = metric(a)
    dB = np.einsum("...klmn,...jl->...kjmn", Da, a) + np.einsum("...kl,...jlmn->...kjmn", a, Da)
    T = nu * np.einsum("im,...nj->...ijmn", I, B) + nu * dt * np.einsum("...ik,...kjmn->...ijmn", G, dB)
    return out, assemble_matrix(T, mesh, cells)

def penalty_term(eta: np.ndarray, v: np.ndarray, t: float, problem, dt: float, jacobian: bool = False):
    mesh, cells, eps = problem.mesh, problem.fluid_cells, problem.params.eps_pen
    out = np.zeros_like(v)
    if len(cells) == 0:
        return out, None
    _, a, Da = _kinematics(eta, problem, cells, PointRule.Center)
    G = cell_gradient(v, mesh, cells, PointRule.Center)
    q = problem.hierarchy_pressure(t)[cells][:, None] - lagrangian_div_array(a, G) / eps
    out -= assemble_vector(pressure_flux(a, q), mesh, cells, PointRule.Center)
    if not jacobian:
        return out, None
    dq = -(np.swapaxes(a, -1, -2) + dt * np.einsum("...kimn,...ik->...mn", Da, G)) / eps
    T = (
        -np.einsum("...mn,...ji->...ijmn", dq, a)
        - dt * q[..., None, None, None, None] * np.einsum("...jimn->...ijmn", Da)
    )
    return out, assemble_matrix(T, mesh, cells, PointRule.Center)

def elastic_term(eta: np.ndarray, problem, dt: float, jacobian: bool = False):
    mesh, cells = problem.mesh, problem.solid_cells
    out = np.zeros_like(eta)
    if len(cells) == 0:
        return out, None
    F = cell_gradient(eta, mesh, cells)
    out += assemble_vector(svk_stress(F, problem.c), mesh, cells)
    if not jacobian:
        return out, None
    return out, assemble_matrix(dt * svk_tangent(F, problem.c), mesh, cells)

def body_load(eta: np.ndarray, t: float, problem, dt: float, jacobian: bool = False):
    """f o eta on the fluid cells, f at the reference points on the solid; the Jacobian is d(-load)/dv."""
    mesh, f = problem.mesh, problem.forcing
    out = np.zeros_like(eta)
    if f.is_zero:
        return out, None
    J = None
    if len(problem.fluid_cells):
        x = at_points(eta, mesh, problem.fluid_cells)
        out += assemble_load(f.value(t, x), mesh, problem.fluid_cells)
        if jacobian:
            J = -assemble_mass(mesh, problem.fluid_cells, problem.dimension, coefficient=dt * f.gradient(t, x))
    if len(problem.solid_cells):
        out += assemble_load(f.value(t, problem.solid_points), mesh, problem.solid_cells)
    return out, J

def internal_force(problem, eta: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    """Viscous, penalty, elastic and kappa terms without inertia and loads, shape (n_nodes, d)."""
    dt = problem.params.dt
    out = viscous_term(eta, v, problem, dt)[0] + penalty_term(eta, v, t, problem, dt)[0] + elastic_term(eta, problem, dt)[0]
    out += problem.params.kappa * (problem.kappa_stiffness @ v.ravel()).reshape(v.shape)
    return out

class ResidualEvaluator():
    """
    Residual and Jacobian of one backward-Euler step as functions of the free velocity dofs.

    Parameters:
        problem (FSIProblem): The problem.
        state_old (DeformationState): The accepted state at the start of the step.
        t_new (float): The time the step reaches.

    Raises:
        ValueError: If t_new is not after state_old.t.
    """

    def __init__(self, problem, state_old: DeformationState, t_new: float):
        self.dt = t_new - state_old.t
        if not self.dt > 0:
            raise ValueError(f"Invalid time step {self.dt!r}: t_new must be after t_old={state_old.t!r}")
        self.problem = problem
        self.state_old = state_old
        self.t_new = t_new
        self._fixed_load = problem.kappa_load(t_new)
        if problem.extra_load is not None:
            self._fixed_load = self._fixed_load + problem.extra_load(t_new)

    def unpack(self, x: np.ndarray) -> np.ndarray:
        v = np.zeros(self.problem.n_dofs)
        v[self.problem.free_dofs] = x
        return v.reshape(self.state_old.v.shape)

    def pack(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v, dtype=float).ravel()[self.problem.free_dofs]

    def configuration(self, v: np.ndarray) -> np.ndarray:
        return self.state_old.eta + self.dt * v

    def evaluate(self, v: np.ndarray, jacobian: bool = False) -> Tuple[np.ndarray, Optional[sp.csr_matrix]]:
        """Full residual (n_nodes, d) and, on request, the Jacobian over all dofs."""
        problem, dt, t = self.problem, self.dt, self.t_new
        eta = self.configuration(v)
        inertia = (problem.mass @ (v - self.state_old.v).ravel()).reshape(v.shape) / dt
        viscous, J_vis = viscous_term(eta, v, problem, dt, jacobian)
        penalty, J_pen = penalty_term(eta, v, t, problem, dt, jacobian)
        elastic, J_el = elastic_term(eta, problem, dt, jacobian)
        kappa = problem.params.kappa * (problem.kappa_stiffness @ v.ravel()).reshape(v.shape)
        load, J_load = body_load(eta, t, problem, dt, jacobian)
        residual = inertia + viscous + penalty + elastic + kappa - load - self._fixed_load
        if not jacobian:
            return residual, None
        J = problem.mass / dt + problem.params.kappa * problem.kappa_stiffness
        for block in (J_vis, J_pen, J_el, J_load):
            if block is not None:
                J = J + block
        return residual, sp.csr_matrix(J)

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.pack(self.evaluate(self.unpack(x))[0])

    def jacobian(self, x: np.ndarray) -> sp.csr_matrix:
        _, J = self.evaluate(self.unpack(x), jacobian=True)
        free = self.problem.free_dofs
        return J[free][:, free]

def assemble_residual(state_new: DeformationState, state_old: DeformationState, problem) -> np.ndarray:
    """
    The global residual of the step state_old -> state_new, with eta_new = eta_old + dt v_new.

    Returns:
        np.ndarray: Residual of shape (n_nodes, d), zero on the outer-boundary rows.

    Raises:
        ValueError: If state_new.t is not after state_old.t.
    """
    evaluator = ResidualEvaluator(problem, state_old, state_new.t)
    residual, _ = evaluator.evaluate(np.asarray(state_new.v, dtype=float))
    residual[problem.mesh.boundary_nodes] = 0.0
    return residual
