"""Discrete evaluation of the compatibility conditions on the interface and the outer boundary."""

import numpy as np

from lagrangefsi.core.datatypes import CompatReport, Phase, SolverParams
from lagrangefsi.compat.forcing import BodyForce
from lagrangefsi.compat.hierarchy import (
    CompatData,
    nodal_jet,
    interface_balance,
    fluid_w2,
    fluid_flux_first,
    fluid_flux_second,
    elasticity_of,
)
from lagrangefsi.kinematics.recovery import nodal_gradient

def tangential(vectors: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """[v]_tan = v - (v . N) N."""
    return vectors - np.sum(vectors * normals, axis=-1, keepdims=True) * normals

def _max_norm(vectors: np.ndarray) -> float:
    if vectors.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(vectors, axis=-1)))

def check_compatibility(compat: CompatData, forcing: BodyForce, mesh, params: SolverParams) -> CompatReport:
    """
    Maximum violation of each compatibility condition.

    c1 is split into the tangential shear of u0, the outer-boundary values of
    w1 and w2, and the interface balance nu Delta u0 - grad q0 = 0; c2 and c3
    are the tangential first and second time derivatives of the traction
    balance; c4 is the fluid/solid mismatch of w2 on the interface.
    """
    gamma = mesh.interface_nodes
    normals = mesh.node_normals[gamma]
    boundary = mesh.boundary_nodes
    c = elasticity_of(mesh, params)
    u0, w1, w2 = compat.u0, compat.w1, compat.w2

    H = nodal_gradient(u0, mesh, Phase.Fluid)[gamma]
    c1_tangential = _max_norm(tangential(np.einsum("nij,nj->ni", H, normals), normals))
    c1_boundary = max(_max_norm(w1[boundary]), _max_norm(w2[boundary]))
    c1_interface_balance = _max_norm(interface_balance(u0, compat.q0, mesh, params)[gamma])

    fluid = nodal_jet(mesh, Phase.Fluid, u0, w1, w2)
    solid = nodal_jet(mesh, Phase.Solid, u0, w1, w2)
    P1, P2, _ = solid.stress(c.contract)
    first = fluid_flux_first(fluid, compat.q0, params.nu) - P1
    second = fluid_flux_second(fluid, compat.q0, compat.q1, params.nu) - P2
    c2 = _max_norm(tangential(np.einsum("nij,nj->ni", first[gamma], normals), normals))
    c3 = _max_norm(tangential(np.einsum("nij,nj->ni", second[gamma], normals), normals))

    w2_fluid = fluid_w2(u0, w1, compat.q0, compat.q1, forcing, mesh, params)
    c4 = _max_norm(w2_fluid[gamma] - w2[gamma])

    return CompatReport(
        c1_tangential=c1_tangential,
        c1_boundary=c1_boundary,
        c1_interface_balance=c1_interface_balance,
        c2=c2,
        c3=c3,
        c4=c4,
        tolerance=params.compat_tol,
        member_norms=compat.member_norms(mesh),
    )
