"""
The initial-data hierarchy q0, w1, q1, w2, q2, w3 at t=0. License: GPL-3.0

Every pressure member solves a mixed problem on the fluid cells in divergence form,

    Delta q = div V + r   in the fluid,   dq/dN = V . N on the outer boundary,   q = q_Gamma on the interface,

through the weak equation int grad q . grad psi = int V . grad psi - int r psi.
Time derivatives of the cofactor follow the jet Id + t u0 + t^2/2 w1 + t^3/6 w2.
"""

import numpy as np
from typing import Callable, Dict, Optional, Tuple
from colorama import Fore, Style
from pydantic import BaseModel, ConfigDict, Field

from lagrangefsi.core.datatypes import Phase, PointRule, SolverParams
from lagrangefsi.core.exceptions import MeshError, SolverError
from lagrangefsi.core.pipeline import Pipeline
from lagrangefsi.kinematics.recovery import at_points, cell_gradient, nodal_gradient, strong_divergence
from lagrangefsi.operators.assembly import (
    assemble_scalar_stiffness,
    assemble_gradient_load,
    assemble_scalar_load,
    lumped_mass,
)
from lagrangefsi.operators.elasticity import ElasticityTensor
from lagrangefsi.operators.fluid import lagrangian_div_array
from lagrangefsi.solvers.sparse_system import SparseSystem, solve_spd
from lagrangefsi.compat.forcing import BodyForce, KappaForcingProfile
from lagrangefsi.compat.jets import ConfigurationJet

HIERARCHY_COLOR = f"{Fore.CYAN}"

class CompatData(BaseModel):
    """Nodal initial-data hierarchy; pressures vanish off the fluid nodes."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    u0: np.ndarray = Field(description="Initial velocity, shape (n_nodes, d)")
    w1: np.ndarray = Field(description="First time derivative of the velocity at t=0")
    w2: np.ndarray = Field(description="Second time derivative of the velocity at t=0")
    w3: np.ndarray = Field(description="Third time derivative of the velocity at t=0")
    q0: np.ndarray = Field(description="Initial pressure, shape (n_nodes,)")
    q1: np.ndarray = Field(description="First time derivative of the pressure at t=0")
    q2: np.ndarray = Field(description="Second time derivative of the pressure at t=0")
    profile: Optional[KappaForcingProfile] = Field(description="The kappa forcings h and g", default=None)

    @classmethod
    def zero(cls, mesh) -> "CompatData":
        v = np.zeros((mesh.n_nodes, mesh.dimension))
        q = np.zeros(mesh.n_nodes)
        return cls(u0=v, w1=v.copy(), w2=v.copy(), w3=v.copy(), q0=q, q1=q.copy(), q2=q.copy())

    def pressure(self, t: float) -> np.ndarray:
        """Nodal q0 + t q1 + t^2/2 q2."""
        return self.q0 + t * self.q1 + 0.5 * t * t * self.q2

    def member_norms(self, mesh) -> Dict[str, float]:
        """Lumped L2 norms of every member, velocities over the container and pressures over the fluid."""
        m_all = lumped_mass(mesh, mesh.cells_of(Phase.Both))
        m_fluid = lumped_mass(mesh, mesh.cells_of(Phase.Fluid))
        norms = {}
        for name in ("u0", "w1", "w2", "w3"):
            value = getattr(self, name)
            norms[name] = float(np.sqrt(np.sum(m_all * np.sum(value ** 2, axis=1))))
        for name in ("q0", "q1", "q2"):
            norms[name] = float(np.sqrt(np.sum(m_fluid * getattr(self, name) ** 2)))
        return norms

def _fluid_cells(mesh) -> np.ndarray:
    cells = mesh.cells_of(Phase.Fluid)
    if len(cells) == 0:
        raise MeshError("The mesh has no fluid cells")
    return cells

def elasticity_of(mesh, params: SolverParams) -> ElasticityTensor:
    return ElasticityTensor(lam=params.lam, mu=params.mu, dimension=mesh.dimension)

def _zeros_like(field: np.ndarray) -> np.ndarray:
    return np.zeros_like(field)

def point_jet(mesh, cells: np.ndarray, u0: np.ndarray, w1: Optional[np.ndarray] = None, w2: Optional[np.ndarray] = None) -> ConfigurationJet:
    """Jet coefficients at the Gauss points of the cells."""
    w1 = _zeros_like(u0) if w1 is None else w1
    w2 = _zeros_like(u0) if w2 is None else w2
    return ConfigurationJet(*(cell_gradient(x, mesh, cells) for x in (u0, w1, w2)))

def nodal_jet(mesh, phase: Phase, u0: np.ndarray, w1: Optional[np.ndarray] = None, w2: Optional[np.ndarray] = None) -> ConfigurationJet:
    """Jet coefficients at the nodes from one-sided recovered gradients of the phase."""
    w1 = _zeros_like(u0) if w1 is None else w1
    w2 = _zeros_like(u0) if w2 is None else w2
    return ConfigurationJet(*(nodal_gradient(x, mesh, phase) for x in (u0, w1, w2)))

def _apply(G: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.einsum("...ik,...k->...i", G, u)

def _transpose(A: np.ndarray) -> np.ndarray:
    return np.swapaxes(A, -1, -2)

def forcing_jet(f: BodyForce, x: np.ndarray, u0: np.ndarray, w1: np.ndarray, order: int) -> np.ndarray:
    """
    Time derivative of F = f(t, eta(t, x)) at t=0 along the jet, at points x.

    order 0: f; order 1: f_t + grad f u0; order 2: f_tt + 2 grad f_t u0 + d^2 f[u0, u0] + grad f w1.
    """
    if order == 0:
        return f.value(0.0, x)
    if order == 1:
        return f.evaluate(0.0, x, 1) + _apply(f.gradient(0.0, x), u0)
    if order == 2:
        return (
            f.evaluate(0.0, x, 2)
            + 2.0 * _apply(f.gradient(0.0, x, 1), u0)
            + f.second_derivative(0.0, x, u0)
            + _apply(f.gradient(0.0, x), w1)
        )
    raise ValueError(f"Invalid forcing jet order {order}, must be 0, 1 or 2")

def normal_component(X: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """N . X N for nodal tensors X."""
    return np.einsum("ni,nij,nj->n", normals, X, normals)

def solve_pressure(V: np.ndarray, r: np.ndarray, dirichlet_values: np.ndarray, mesh, params: SolverParams) -> np.ndarray:
    """
    Solve the mixed pressure problem for point values V (C, Q, d) and r (C, Q) on the fluid cells.

    Raises:
        MeshError: Without fluid cells or interface nodes.
        SolverError: If the conjugate gradient solve does not converge.
    """
    cells = _fluid_cells(mesh)
    if len(mesh.interface_nodes) == 0:
        raise MeshError("The pressure problem needs interface nodes for its Dirichlet data")
    system = SparseSystem(
        matrix=assemble_scalar_stiffness(mesh, cells),
        rhs=assemble_gradient_load(V, mesh, cells) - assemble_scalar_load(r, mesh, cells),
        dirichlet_dofs=mesh.interface_nodes,
        dirichlet_values=np.asarray(dirichlet_values, dtype=float),
        active_dofs=mesh.nodes_of(Phase.Fluid),
    )
    q, report = solve_spd(system, tol=params.cg_tol, maxit=params.cg_maxit)
    if not report.converged:
        raise SolverError(
            f"Pressure solve did not converge: residual {report.residual_norm:.3e} after {report.iterations} iterations"
        )
    return q

def _interface_values(values: np.ndarray, dirichlet: Optional[Callable], mesh) -> np.ndarray:
    if dirichlet is not None:
        return np.asarray(dirichlet(mesh.nodes[mesh.interface_nodes]), dtype=float)
    return values

def _fluid_only(mesh) -> np.ndarray:
    return mesh.node_in_fluid & ~mesh.node_in_solid

def build_q0(u0: np.ndarray, f: BodyForce, mesh, params: SolverParams, dirichlet: Optional[Callable] = None) -> np.ndarray:
    """
    q0 with Delta q0 = div f(0) + (a_i^j)_t(0) u0^i,_j in the fluid and
    q0 = nu [grad u0 N] . N on the interface.

    Parameters:
        dirichlet (Callable): Optional points -> interface values replacing the traction datum.

    Returns:
        np.ndarray: Nodal q0, zero off the fluid nodes.
    """
    cells = _fluid_cells(mesh)
    x = mesh.points(cells, PointRule.Gauss)
    jet = point_jet(mesh, cells, u0)
    laplacian = strong_divergence(jet.H1, mesh, Phase.Fluid)
    V = forcing_jet(f, x, at_points(u0, mesh, cells), None, 0) + params.nu * at_points(laplacian, mesh, cells)
    r = lagrangian_div_array(jet.a1, jet.H1)
    gamma = mesh.interface_nodes
    H = nodal_gradient(u0, mesh, Phase.Fluid)[gamma]
    values = params.nu * normal_component(H, mesh.node_normals[gamma])
    return solve_pressure(V, r, _interface_values(values, dirichlet, mesh), mesh, params)

def interface_balance(u0: np.ndarray, q0: np.ndarray, mesh, params: SolverParams) -> np.ndarray:
    """Nodal nu Delta u0 - grad q0 from the fluid side."""
    cells = _fluid_cells(mesh)
    laplacian = strong_divergence(cell_gradient(u0, mesh, cells), mesh, Phase.Fluid)
    return params.nu * laplacian - nodal_gradient(q0, mesh, Phase.Fluid)

def build_w1(u0: np.ndarray, q0: np.ndarray, f: BodyForce, mesh, params: SolverParams) -> np.ndarray:
    """w1 = nu Delta u0 - grad q0 + f(0) on the fluid, w1 = f(0) on the solid and the interface."""
    w1 = f.value(0.0, mesh.nodes)
    fluid = _fluid_only(mesh)
    w1[fluid] += interface_balance(u0, q0, mesh, params)[fluid]
    return w1

def _viscous_first(jet: ConfigurationJet, nu: float) -> np.ndarray:
    return nu * (jet.H2 + jet.H1 @ jet.B1)

def _viscous_second(jet: ConfigurationJet, nu: float) -> np.ndarray:
    return nu * (jet.H3 + 2.0 * jet.H2 @ jet.B1 + jet.H1 @ jet.B2)

def fluid_flux_first(jet: ConfigurationJet, q0: np.ndarray, nu: float) -> np.ndarray:
    """Time derivative of the fluid flux nu G a a^T - q a^T without the -q1 I part."""
    return _viscous_first(jet, nu) - q0[..., None, None] * _transpose(jet.a1)

def fluid_flux_second(jet: ConfigurationJet, q0: np.ndarray, q1: np.ndarray, nu: float) -> np.ndarray:
    return _viscous_second(jet, nu) - q0[..., None, None] * _transpose(jet.a2) - 2.0 * q1[..., None, None] * _transpose(jet.a1)

def _first_momentum(u0, w1, q0, f, mesh, params):
    """Nodal and point values of V1 = F_t(0) + div(nu (grad w1 + grad u0 B1) - q0 a1^T) on the fluid."""
    cells = _fluid_cells(mesh)
    jet = point_jet(mesh, cells, u0, w1)
    flux = fluid_flux_first(jet, at_points(q0, mesh, cells), params.nu)
    divergence = strong_divergence(flux, mesh, Phase.Fluid)
    x = mesh.points(cells, PointRule.Gauss)
    V_points = at_points(divergence, mesh, cells) + forcing_jet(f, x, at_points(u0, mesh, cells), at_points(w1, mesh, cells), 1)
    V_nodes = divergence + forcing_jet(f, mesh.nodes, u0, w1, 1)
    return V_points, V_nodes, jet

def _second_momentum(u0, w1, w2, q0, q1, f, mesh, params):
    cells = _fluid_cells(mesh)
    jet = point_jet(mesh, cells, u0, w1, w2)
    flux = fluid_flux_second(jet, at_points(q0, mesh, cells), at_points(q1, mesh, cells), params.nu)
    divergence = strong_divergence(flux, mesh, Phase.Fluid)
    x = mesh.points(cells, PointRule.Gauss)
    V_points = at_points(divergence, mesh, cells) + forcing_jet(f, x, at_points(u0, mesh, cells), at_points(w1, mesh, cells), 2)
    V_nodes = divergence + forcing_jet(f, mesh.nodes, u0, w1, 2)
    return V_points, V_nodes, jet

def _solid_stress_divergence(u0, w1, w2, mesh, c: ElasticityTensor, order: int) -> np.ndarray:
    cells = mesh.cells_of(Phase.Solid)
    if len(cells) == 0:
        return np.zeros_like(u0)
    P = point_jet(mesh, cells, u0, w1, w2).stress(c.contract)[order - 1]
    return strong_divergence(P, mesh, Phase.Solid)

def build_q1(u0, w1, q0, f: BodyForce, mesh, params: SolverParams, dirichlet: Optional[Callable] = None) -> np.ndarray:
    """
    q1 from the first time derivative of the constraint and of the interface traction balance:

        Delta q1 = div V1 + 2 tr(a1 grad w1) + tr(a2 grad u0),
        q1 = N . [nu (grad w1 + grad u0 B1)] N - q0 N . a1 N - (P1 N) . N  on the interface.
    """
    c = elasticity_of(mesh, params)
    V, _, jet = _first_momentum(u0, w1, q0, f, mesh, params)
    r = 2.0 * lagrangian_div_array(jet.a1, jet.H2) + lagrangian_div_array(jet.a2, jet.H1)
    gamma = mesh.interface_nodes
    normals = mesh.node_normals[gamma]
    fluid = nodal_jet(mesh, Phase.Fluid, u0, w1)
    solid = nodal_jet(mesh, Phase.Solid, u0, w1)
    flux = fluid_flux_first(fluid, q0, params.nu)[gamma]
    P1 = solid.stress(c.contract)[0][gamma]
    values = normal_component(flux - P1, normals)
    return solve_pressure(V, r, _interface_values(values, dirichlet, mesh), mesh, params)

def fluid_w2(u0, w1, q0, q1, f: BodyForce, mesh, params: SolverParams) -> np.ndarray:
    """The fluid formula V1 - grad q1 at every node."""
    _, V_nodes, _ = _first_momentum(u0, w1, q0, f, mesh, params)
    return V_nodes - nodal_gradient(q1, mesh, Phase.Fluid)

def solid_w2(u0, f: BodyForce, mesh, params: SolverParams) -> np.ndarray:
    """The solid formula f_t(0) + div P_t(0) at every node."""
    c = elasticity_of(mesh, params)
    return f.evaluate(0.0, mesh.nodes, 1) + _solid_stress_divergence(u0, None, None, mesh, c, 1)

def build_w2(u0, w1, q0, q1, f: BodyForce, mesh, params: SolverParams) -> np.ndarray:
    """w2 on the fluid-only nodes from the fluid formula, on the solid nodes from the solid one."""
    w2 = solid_w2(u0, f, mesh, params)
    fluid = _fluid_only(mesh)
    w2[fluid] = fluid_w2(u0, w1, q0, q1, f, mesh, params)[fluid]
    return w2

def build_q2(u0, w1, w2, q0, q1, f: BodyForce, mesh, params: SolverParams, dirichlet: Optional[Callable] = None) -> np.ndarray:
    """
    q2 from the second time derivative of the constraint and of the traction balance:

        Delta q2 = div V2 + 3 tr(a1 grad w2) + 3 tr(a2 grad w1) + tr(a3 grad u0),
        q2 = N . [nu (grad w2 + 2 grad w1 B1 + grad u0 B2)] N - (P2 N) . N - q0 N . a2 N - 2 q1 N . a1 N.
    """
    c = elasticity_of(mesh, params)
    V, _, jet = _second_momentum(u0, w1, w2, q0, q1, f, mesh, params)
    r = (
        3.0 * lagrangian_div_array(jet.a1, jet.H3)
        + 3.0 * lagrangian_div_array(jet.a2, jet.H2)
        + lagrangian_div_array(jet.a3, jet.H1)
    )
    gamma = mesh.interface_nodes
    normals = mesh.node_normals[gamma]
    fluid = nodal_jet(mesh, Phase.Fluid, u0, w1, w2)
    solid = nodal_jet(mesh, Phase.Solid, u0, w1, w2)
    flux = fluid_flux_second(fluid, q0, q1, params.nu)[gamma]
    P2 = solid.stress(c.contract)[1][gamma]
    values = normal_component(flux - P2, normals)
    return solve_pressure(V, r, _interface_values(values, dirichlet, mesh), mesh, params)

def build_w3(u0, w1, w2, q0, q1, q2, f: BodyForce, mesh, params: SolverParams) -> np.ndarray:
    """
    w3 = nu div(grad w2 + 2 grad w1 B1 + grad u0 B2) + F_tt(0) - (a2^T grad q0 + 2 a1^T grad q1 + grad q2) on the fluid,
    w3 = f_tt(0) + div P_tt(0) on the solid.
    """
    c = elasticity_of(mesh, params)
    cells = _fluid_cells(mesh)
    jet = point_jet(mesh, cells, u0, w1, w2)
    viscous = strong_divergence(_viscous_second(jet, params.nu), mesh, Phase.Fluid)
    fluid_jet = nodal_jet(mesh, Phase.Fluid, u0, w1, w2)
    gradient = lambda q: nodal_gradient(q, mesh, Phase.Fluid)
    pressure = (
        _apply(_transpose(fluid_jet.a2), gradient(q0))
        + 2.0 * _apply(_transpose(fluid_jet.a1), gradient(q1))
        + gradient(q2)
    )
    fluid_values = viscous + forcing_jet(f, mesh.nodes, u0, w1, 2) - pressure
    w3 = f.evaluate(0.0, mesh.nodes, 2) + _solid_stress_divergence(u0, w1, None, mesh, c, 2)
    fluid = _fluid_only(mesh)
    w3[fluid] = fluid_values[fluid]
    return w3

def build_pressure_hierarchy(u0, w1, q0, f: BodyForce, mesh, params: SolverParams,
                             dirichlet_q1: Optional[Callable] = None,
                             dirichlet_q2: Optional[Callable] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    q1 and q2. The datum of q2 involves w2, which is built here through the same
    formula `build_velocity_hierarchy` uses.
    """
    q1 = build_q1(u0, w1, q0, f, mesh, params, dirichlet=dirichlet_q1)
    w2 = build_w2(u0, w1, q0, q1, f, mesh, params)
    q2 = build_q2(u0, w1, w2, q0, q1, f, mesh, params, dirichlet=dirichlet_q2)
    return q1, q2

def build_velocity_hierarchy(u0, w1, q0, q1, f: BodyForce, mesh, params: SolverParams,
                             q2: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """w2 and w3; q2 is computed when it is not supplied."""
    w2 = build_w2(u0, w1, q0, q1, f, mesh, params)
    if q2 is None:
        q2 = build_q2(u0, w1, w2, q0, q1, f, mesh, params)
    w3 = build_w3(u0, w1, w2, q0, q1, q2, f, mesh, params)
    return w2, w3

def build_compat(u0: np.ndarray, f: BodyForce, mesh, params: SolverParams, verbose: bool = False) -> CompatData:
    """Run the whole hierarchy and the kappa forcing profile as a pipeline."""
    c = elasticity_of(mesh, params)
    pipeline = Pipeline(verbose=verbose)

    def q0_stage(data):
        data["q0"] = build_q0(data["u0"], f, mesh, params)
        return data

    def w1_stage(data):
        data["w1"] = build_w1(data["u0"], data["q0"], f, mesh, params)
        return data

    def pressure_stage(data):
        data["q1"], data["q2"] = build_pressure_hierarchy(data["u0"], data["w1"], data["q0"], f, mesh, params)
        return data

    def velocity_stage(data):
        data["w2"], data["w3"] = build_velocity_hierarchy(
            data["u0"], data["w1"], data["q0"], data["q1"], f, mesh, params, q2=data["q2"]
        )
        return data

    def forcing_stage(data):
        data["profile"] = KappaForcingProfile.build(data["u0"], data["w1"], data["w2"], c, mesh)
        return data

    pipeline.add("q0", q0_stage)
    pipeline.add("w1", w1_stage)
    pipeline.add("q1_q2", pressure_stage)
    pipeline.add("w2_w3", velocity_stage)
    pipeline.add("h_g", forcing_stage)
    data = pipeline({"u0": np.asarray(u0, dtype=float).copy()})
    compat = CompatData(**data)
    if verbose:
        norms = ", ".join(f"{k}={v:.3e}" for k, v in compat.member_norms(mesh).items())
        print(f"{HIERARCHY_COLOR}hierarchy: {norms}{Style.RESET_ALL}")
    return compat
