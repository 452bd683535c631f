"""The discrete FSI problem: mesh, parameters, data and the matrices that never change. License: GPL-3.0"""

import numpy as np
from typing import Callable, Optional
from colorama import Fore, Style

from lagrangefsi.core.datatypes import Phase, PointRule, SolverParams
from lagrangefsi.mesh.phase_mesh import build_mesh
from lagrangefsi.kinematics.recovery import at_points
from lagrangefsi.operators.assembly import assemble_mass, assemble_matrix
from lagrangefsi.compat.forcing import BodyForce, ZeroForce, make_forcing
from lagrangefsi.compat.initial_data import initial_velocity
from lagrangefsi.compat.hierarchy import CompatData, build_compat, elasticity_of
from lagrangefsi.readers.field_reader import FieldReader

PROBLEM_COLOR = f"{Fore.GREEN}"

class FSIProblem():
    """
    Everything a step needs besides the state.

    Parameters:
        mesh (PhaseMesh): The reference mesh.
        params (SolverParams): Material and numerical parameters.
        compat (CompatData): The initial-data hierarchy, zero when None.
        forcing (BodyForce): The body force on the whole container, zero when None.
        extra_load (Callable): Optional t -> weak load (n_nodes, d) added to the right-hand side.
    """

    def __init__(
            self,
            mesh,
            params: SolverParams,
            compat: Optional[CompatData] = None,
            forcing: Optional[BodyForce] = None,
            extra_load: Optional[Callable[[float], np.ndarray]] = None,
            verbose: bool = False,
        ):
        self.mesh = mesh
        self.params = params
        self.verbose = verbose
        d = mesh.dimension
        self.dimension = d
        self.c = elasticity_of(mesh, params)
        self.compat = CompatData.zero(mesh) if compat is None else compat
        self.forcing = ZeroForce(d) if forcing is None else forcing
        self.extra_load = extra_load

        self.fluid_cells = mesh.cells_of(Phase.Fluid)
        self.solid_cells = mesh.cells_of(Phase.Solid)
        self.all_cells = mesh.cells_of(Phase.Both)
        self.n_dofs = mesh.n_nodes * d
        self.dirichlet_dofs = (mesh.boundary_nodes[:, None] * d + np.arange(d)).ravel()
        self.free_dofs = np.setdiff1d(np.arange(self.n_dofs), self.dirichlet_dofs)

        self.mass = assemble_mass(mesh, self.all_cells, d)
        self.solid_mass = assemble_mass(mesh, self.solid_cells, d)
        self.kappa_stiffness = assemble_matrix(self.c.tensor(), mesh, self.solid_cells)
        I = np.eye(d)
        self.h1_stiffness = assemble_matrix(np.einsum("ik,jl->ijkl", I, I), mesh, self.all_cells)

        self.fluid_points = mesh.points(self.fluid_cells, PointRule.Gauss)
        self.solid_points = mesh.points(self.solid_cells, PointRule.Gauss)
        self._pressure_members = [
            self._cellwise(getattr(self.compat, name)) for name in ("q0", "q1", "q2")
        ]

    def _cellwise(self, nodal: np.ndarray) -> np.ndarray:
        out = np.zeros(self.mesh.n_cells)
        if len(self.fluid_cells):
            out[self.fluid_cells] = at_points(nodal, self.mesh, self.fluid_cells, PointRule.Center)[:, 0]
        return out

    @property
    def dt(self) -> float:
        return self.params.dt

    def hierarchy_pressure(self, t: float) -> np.ndarray:
        """Cellwise q0 + t q1 + t^2/2 q2 at the fluid cell centres, zero on the solid."""
        q0, q1, q2 = self._pressure_members
        return q0 + t * q1 + 0.5 * t * t * q2

    def kappa_load(self, t: float) -> np.ndarray:
        """kappa (h - g) or kappa h as a weak load, zero when the forcings are disabled."""
        if not self.params.include_kappa_forcing or self.compat.profile is None or self.params.kappa == 0.0:
            return np.zeros((self.mesh.n_nodes, self.dimension))
        return self.params.kappa * self.compat.profile.load(t, self.params.include_interface_flux)

    def with_params(self, **updates) -> "FSIProblem":
        """The same data with some parameters replaced, the hierarchy is reused."""
        params = SolverParams(**{**self.params.model_dump(), **updates})
        return FSIProblem(self.mesh, params, self.compat, self.forcing, self.extra_load, self.verbose)

    @classmethod
    def from_config(cls, config, u0_override: Optional[np.ndarray] = None, verbose: bool = False) -> "FSIProblem":
        """
        Build the mesh, the forcing, the initial velocity and its hierarchy from a RunConfig.

        Parameters:
            u0_override (np.ndarray): Nodal initial velocity replacing the configured preset.
        """
        mesh = build_mesh(config.geometry_spec())
        params = config.solver_params()
        data = config.data
        forcing = make_forcing(data.forcing, mesh.dimension, data.forcing_amplitude, data.forcing_omega)
        if u0_override is not None:
            u0 = np.asarray(u0_override, dtype=float).copy()
            u0[mesh.boundary_nodes] = 0.0
        else:
            values = None
            if data.initial_data == "file":
                values = FieldReader(mesh.n_nodes, mesh.dimension)(data.initial_data_file)
            u0 = initial_velocity(mesh, data.initial_data, data.amplitude, values)
        if verbose:
            print(f"{PROBLEM_COLOR}mesh: {mesh.n_nodes} nodes, {mesh.n_cells} cells "
                  f"({len(mesh.cells_of(Phase.Solid))} solid), {mesh.n_facets} interface facets{Style.RESET_ALL}")
        compat = build_compat(u0, forcing, mesh, params, verbose=verbose)
        return cls(mesh, params, compat, forcing, verbose=verbose)
