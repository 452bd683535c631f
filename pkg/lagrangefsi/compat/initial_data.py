"""Initial velocity presets. License: GPL-3.0"""

import numpy as np
from typing import Optional

from lagrangefsi.core.exceptions import ConfigValidationError
from lagrangefsi.core.datatypes import Phase

INITIAL_DATA_PRESETS = ("zero", "solid_bump", "fluid_swirl", "file")

def zero_velocity(mesh) -> np.ndarray:
    return np.zeros((mesh.n_nodes, mesh.dimension))

def solid_bump(mesh, amplitude: float = 1e-2) -> np.ndarray:
    """
    A C1 bump along e_1 inside each solid component.

    Boxes use the product of sin^2 over the resolved box, so the velocity and
    its gradient vanish on the interface. Balls use cos^2(pi r / 2R) cut to the
    nodes strictly inside the resolved component.
    """
    u = zero_velocity(mesh)
    solid_only = mesh.node_in_solid & ~mesh.node_in_fluid
    for r, region in enumerate(mesh.spec.solids):
        nodes = np.unique(mesh.cells[mesh.cell_region == r].ravel())
        x = mesh.nodes[nodes]
        if region.kind == "box":
            lower, upper = x.min(axis=0), x.max(axis=0)
            profile = np.prod(np.sin(np.pi * (x - lower) / (upper - lower)) ** 2, axis=1)
        else:
            radius = np.linalg.norm(x - np.array(region.center), axis=1)
            profile = np.where(radius < region.radius, np.cos(0.5 * np.pi * radius / region.radius) ** 2, 0.0)
        u[nodes, 0] = amplitude * profile * solid_only[nodes]
    return u

def fluid_swirl(mesh, amplitude: float = 1e-2) -> np.ndarray:
    """Divergence-free velocity curl(psi) with psi = (x (L1 - x) y (L2 - y))^2, zero on the outer boundary."""
    x = mesh.nodes / np.array(mesh.extent)
    X, Y = x[:, 0], x[:, 1]
    L1, L2 = mesh.extent[0], mesh.extent[1]
    p = X * (1.0 - X)
    q = Y * (1.0 - Y)
    dp = (1.0 - 2.0 * X) / L1
    dq = (1.0 - 2.0 * Y) / L2
    u = zero_velocity(mesh)
    # psi = p^2 q^2, u = (psi_y, -psi_x)
    u[:, 0] = amplitude * 2.0 * p ** 2 * q * dq
    u[:, 1] = -amplitude * 2.0 * p * dp * q ** 2
    if mesh.dimension == 3:
        Z = x[:, 2]
        u[:, :2] *= (16.0 * Z * (1.0 - Z))[:, None]
    return u

def initial_velocity(mesh, preset: str = "solid_bump", amplitude: float = 1e-2, values: Optional[np.ndarray] = None) -> np.ndarray:
    """
    The initial velocity u0 for a named preset.

    Raises:
        ConfigValidationError: On an unknown preset or a file preset without values.
    """
    if preset == "zero":
        u = zero_velocity(mesh)
    elif preset == "solid_bump":
        u = solid_bump(mesh, amplitude)
    elif preset == "fluid_swirl":
        u = fluid_swirl(mesh, amplitude)
    elif preset == "file":
        if values is None:
            raise ConfigValidationError("The file preset requires nodal values from initial_data_file", field="initial_data_file")
        u = np.asarray(values, dtype=float)
        if u.shape != (mesh.n_nodes, mesh.dimension):
            raise ConfigValidationError(
                f"Initial data of shape {u.shape} does not match ({mesh.n_nodes}, {mesh.dimension})", field="initial_data_file"
            )
        u = u.copy()
    else:
        raise ConfigValidationError(f"Unknown initial data preset '{preset}', expected one of {INITIAL_DATA_PRESETS}", field="initial_data")
    u[mesh.boundary_nodes] = 0.0
    return u

def solid_part(u: np.ndarray, mesh) -> np.ndarray:
    """Copy of u zeroed off the solid nodes."""
    out = np.zeros_like(u)
    nodes = mesh.nodes_of(Phase.Solid)
    out[nodes] = u[nodes]
    return out
