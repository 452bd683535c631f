"""Per-state norms, energies and the accumulated Z-norm proxy."""

import numpy as np
from typing import Dict, Optional

from lagrangefsi.core.datatypes import DeformationState, DiagnosticsRecord, Phase, PointRule, StepReport
from lagrangefsi.kinematics.fields import gradient, jacobian_det
from lagrangefsi.kinematics.recovery import at_points, cell_gradient, nodal_gradient
from lagrangefsi.kinematics.tensors import cofactor_array, strain_offset_array
from lagrangefsi.operators.fluid import lagrangian_div_array

def kinetic_energy(v: np.ndarray, problem) -> float:
    """1/2 v^T M v with the consistent mass over the container."""
    x = np.asarray(v, dtype=float).ravel()
    return float(0.5 * x @ (problem.mass @ x))

def elastic_energy(eta: np.ndarray, problem) -> float:
    """(1/4) int_solid c(E):E with E = F^T F - I."""
    mesh, cells = problem.mesh, problem.solid_cells
    if len(cells) == 0:
        return 0.0
    E = strain_offset_array(cell_gradient(eta, mesh, cells))
    density = problem.c.energy_density(E)
    return float(np.sum(mesh.weights(PointRule.Gauss)[None, :] * density))

def h1_norm(v: np.ndarray, problem) -> float:
    x = np.asarray(v, dtype=float).ravel()
    return float(np.sqrt(max(x @ (problem.mass @ x) + x @ (problem.h1_stiffness @ x), 0.0)))

def displacement_h2(eta: np.ndarray, problem) -> float:
    """Discrete H2 norm of eta - Id on the solid; second derivatives from the recovered gradient."""
    mesh, cells = problem.mesh, problem.solid_cells
    if len(cells) == 0:
        return 0.0
    u = eta - mesh.nodes
    w = mesh.weights(PointRule.Gauss)[None, :]
    U = at_points(u, mesh, cells)
    G = cell_gradient(u, mesh, cells)
    H = cell_gradient(nodal_gradient(u, mesh, Phase.Solid), mesh, cells)
    total = np.sum(w * np.sum(U ** 2, axis=-1))
    total += np.sum(w * np.sum(G ** 2, axis=(-2, -1)))
    total += np.sum(w * np.sum(H ** 2, axis=(-3, -2, -1)))
    return float(np.sqrt(total))

def pressure_l2(q: np.ndarray, problem) -> float:
    cells = problem.fluid_cells
    return float(np.sqrt(problem.mesh.cell_volume * np.sum(q[cells] ** 2)))

def constraint_residual(eta: np.ndarray, v: np.ndarray, problem) -> float:
    """Cellwise L2 norm of a^k_i v^i,_k at the fluid cell centres."""
    mesh, cells = problem.mesh, problem.fluid_cells
    if len(cells) == 0:
        return 0.0
    G = cell_gradient(v, mesh, cells, PointRule.Center)
    if problem.params.freeze_cofactor:
        divergence = np.trace(G, axis1=-2, axis2=-1)
    else:
        a = cofactor_array(cell_gradient(eta, mesh, cells, PointRule.Center))
        divergence = lagrangian_div_array(a, G)
    return float(np.sqrt(mesh.cell_volume * np.sum(divergence ** 2)))

def min_det(eta: np.ndarray, problem) -> float:
    return float(jacobian_det(gradient(eta, problem.mesh), warn=False).values.min())

class ZProxy():
    """
    Running proxy of the solution-space norm:
    int_0^t |v|_H1^2 + sup |eta - Id|_H2(solid)^2 + sup |q|_L2^2.
    """

    def __init__(self):
        self.velocity_integral = 0.0
        self.displacement_sup = 0.0
        self.pressure_sup = 0.0

    def update(self, dt: float, v_h1: float, eta_h2: float, q_l2: float) -> float:
        self.velocity_integral += dt * v_h1 ** 2
        self.displacement_sup = max(self.displacement_sup, eta_h2 ** 2)
        self.pressure_sup = max(self.pressure_sup, q_l2 ** 2)
        return self.value

    @property
    def value(self) -> float:
        return self.velocity_integral + self.displacement_sup + self.pressure_sup

    @property
    def terms(self) -> Dict[str, float]:
        return {
            "v_L2H1": self.velocity_integral,
            "eta_LinfH2": self.displacement_sup,
            "q_LinfL2": self.pressure_sup,
        }

def record_state(problem, state: DeformationState, step: int, zproxy: ZProxy, report: Optional[StepReport] = None) -> DiagnosticsRecord:
    """Diagnostics of an accepted state; the velocity integral uses the right endpoint of each step."""
    kinetic = kinetic_energy(state.v, problem)
    elastic = elastic_energy(state.eta, problem)
    v_h1 = h1_norm(state.v, problem)
    eta_h2 = displacement_h2(state.eta, problem)
    q_l2 = pressure_l2(state.q, problem)
    zt = zproxy.update(problem.dt if step > 0 else 0.0, v_h1, eta_h2, q_l2)
    return DiagnosticsRecord(
        step=step,
        t=state.t,
        kinetic_energy=kinetic,
        elastic_energy=elastic,
        total_energy=kinetic + elastic,
        v_h1=v_h1,
        eta_h2_solid=eta_h2,
        q_l2=q_l2,
        constraint_residual=constraint_residual(state.eta, state.v, problem),
        min_det=min_det(state.eta, problem),
        zt_proxy=zt,
        newton_iterations=0 if report is None else report.newton_iterations,
        residual_norm=0.0 if report is None else report.residual_norm,
    )
