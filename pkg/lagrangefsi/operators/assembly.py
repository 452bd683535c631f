"""Weak-form assembly over Q1 cells. Vector dofs are numbered node * ncomp + component."""

import numpy as np
import scipy.sparse as sp
from lagrangefsi.core.datatypes import PointRule

def local_dofs(mesh, cells: np.ndarray, ncomp: int) -> np.ndarray:
    dofs = mesh.cells[cells][:, :, None] * ncomp + np.arange(ncomp)
    return dofs.reshape(len(cells), mesh.cells.shape[1] * ncomp)

def _to_csr(local: np.ndarray, dofs: np.ndarray, size: int) -> sp.csr_matrix:
    n = dofs.shape[1]
    rows = np.broadcast_to(dofs[:, :, None], (len(dofs), n, n))
    cols = np.broadcast_to(dofs[:, None, :], (len(dofs), n, n))
    return sp.coo_matrix((local.ravel(), (rows.ravel(), cols.ravel())), shape=(size, size)).tocsr()

def assemble_vector(P: np.ndarray, mesh, cells: np.ndarray, rule: PointRule = PointRule.Gauss) -> np.ndarray:
    """sum_q w P:grad(phi_a) for stress-like point values P (C, Q, d, d); returns (n_nodes, d)."""
    local = np.einsum("q,cqij,qaj->cai", mesh.weights(rule), P, mesh.physical_gradients(rule), optimize=True)
    out = np.zeros((mesh.n_nodes, P.shape[-2]))
    np.add.at(out, mesh.cells[cells], local)
    return out

def assemble_matrix(T: np.ndarray, mesh, cells: np.ndarray, rule: PointRule = PointRule.Gauss) -> sp.csr_matrix:
    """Matrix of the tangent T[..., i, j, k, l] = dP_ij / dG_kl, G the velocity gradient."""
    d = mesh.dimension
    dN = mesh.physical_gradients(rule)
    T = np.broadcast_to(T, (len(cells), len(mesh.weights(rule))) + (d,) * 4)
    local = np.einsum("q,qaj,cqijkl,qbl->caibk", mesh.weights(rule), dN, T, dN, optimize=True)
    n = local.shape[1] * d
    return _to_csr(local.reshape(len(cells), n, n), local_dofs(mesh, cells, d), mesh.n_nodes * d)

def assemble_load(f: np.ndarray, mesh, cells: np.ndarray, rule: PointRule = PointRule.Gauss) -> np.ndarray:
    """int f . phi for point values f (C, Q, k); returns (n_nodes, k)."""
    local = np.einsum("q,cqi,qa->cai", mesh.weights(rule), f, mesh.rule(rule).shape, optimize=True)
    out = np.zeros((mesh.n_nodes, f.shape[-1]))
    np.add.at(out, mesh.cells[cells], local)
    return out

def assemble_mass(mesh, cells: np.ndarray, ncomp: int, coefficient: np.ndarray = None, rule: PointRule = PointRule.Gauss) -> sp.csr_matrix:
    """
    Consistent mass matrix, optionally with a pointwise coupling coefficient.

    Parameters:
        coefficient (np.ndarray): Optional (C, Q, ncomp, ncomp) values K with entries int K_ik psi_a psi_b.
    """
    rule_data = mesh.rule(rule)
    w = mesh.weights(rule)
    N = rule_data.shape
    if coefficient is None:
        scalar = np.einsum("q,qa,qb->ab", w, N, N)
        local = np.einsum("ab,ik->aibk", scalar, np.eye(ncomp))
        local = np.broadcast_to(local, (len(cells),) + local.shape)
    else:
        local = np.einsum("q,qa,qb,cqik->caibk", w, N, N, coefficient, optimize=True)
    n = N.shape[1] * ncomp
    return _to_csr(np.ascontiguousarray(local).reshape(len(cells), n, n), local_dofs(mesh, cells, ncomp), mesh.n_nodes * ncomp)

def lumped_mass(mesh, cells: np.ndarray, rule: PointRule = PointRule.Gauss) -> np.ndarray:
    rule_data = mesh.rule(rule)
    local = np.broadcast_to(mesh.weights(rule) @ rule_data.shape, (len(cells), rule_data.shape.shape[1]))
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.cells[cells], local)
    return out

def assemble_scalar_stiffness(mesh, cells: np.ndarray) -> sp.csr_matrix:
    """int grad(psi_a) . grad(psi_b) for scalar Q1 functions."""
    dN = mesh.physical_gradients(PointRule.Gauss)
    local = np.einsum("q,qaj,qbj->ab", mesh.weights(PointRule.Gauss), dN, dN)
    local = np.broadcast_to(local, (len(cells),) + local.shape)
    return _to_csr(np.ascontiguousarray(local), mesh.cells[cells], mesh.n_nodes)

def assemble_gradient_load(V: np.ndarray, mesh, cells: np.ndarray) -> np.ndarray:
    """int V . grad(psi_a) for point vectors V (C, Q, d); returns (n_nodes,)."""
    local = np.einsum("q,cqj,qaj->ca", mesh.weights(PointRule.Gauss), V, mesh.physical_gradients(PointRule.Gauss), optimize=True)
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.cells[cells], local)
    return out

def assemble_scalar_load(r: np.ndarray, mesh, cells: np.ndarray) -> np.ndarray:
    """int r psi_a for point scalars r (C, Q); returns (n_nodes,)."""
    local = np.einsum("q,cq,qa->ca", mesh.weights(PointRule.Gauss), r, mesh.rule(PointRule.Gauss).shape, optimize=True)
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.cells[cells], local)
    return out

def facet_groups(mesh):
    """Yield (facet indices, FacetRule) per (axis, side) of the solid cells."""
    for (axis, side), rule in mesh.facet_rules.items():
        selected = np.flatnonzero((mesh.facet_axis == axis) & (mesh.facet_side == side))
        if len(selected):
            yield selected, rule

def facet_size(mesh) -> int:
    return mesh.rule(PointRule.Gauss).n_points ** (mesh.dimension - 1)

def facet_gradient(field: np.ndarray, mesh) -> np.ndarray:
    """Solid-side gradient of a nodal vector field at the interface facet points, (F, Qf, d, d)."""
    out = np.zeros((mesh.n_facets, facet_size(mesh), field.shape[1], mesh.dimension))
    for selected, rule in facet_groups(mesh):
        Qf = len(rule.weights)
        local = field[mesh.cells[mesh.facet_solid_cell[selected]]]
        dN = rule.shape_gradients * (2.0 / mesh.h)
        out[selected, :Qf] = np.einsum("qaj,cai->cqij", dN, local)
    return out

def facet_weights(mesh) -> np.ndarray:
    """Physical weights of the facet points, (F, Qf)."""
    out = np.zeros((mesh.n_facets, facet_size(mesh)))
    for selected, rule in facet_groups(mesh):
        out[selected, :len(rule.weights)] = rule.weights * mesh.facet_jacobian
    return out

def assemble_facet_load(values: np.ndarray, mesh) -> np.ndarray:
    """int_Gamma values . phi over the interface facets, values of shape (F, Qf, d)."""
    out = np.zeros((mesh.n_nodes, values.shape[-1]))
    for selected, rule in facet_groups(mesh):
        Qf = len(rule.weights)
        local = np.einsum("q,fqi,qa->fai", rule.weights * mesh.facet_jacobian, values[selected, :Qf], rule.shape)
        np.add.at(out, mesh.cells[mesh.facet_solid_cell[selected]], local)
    return out
