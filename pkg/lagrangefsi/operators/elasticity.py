"""The isotropic elasticity tensor and the solid operators L, N and G. License: GPL-3.0"""

import numpy as np
import scipy.sparse as sp
from typing import Any
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lagrangefsi.core.datatypes import Phase
from lagrangefsi.core.exceptions import MeshError, PhaseMismatchError
from lagrangefsi.kinematics.recovery import cell_gradient, strong_divergence
from lagrangefsi.kinematics.tensors import strain_offset_array
from lagrangefsi.operators.assembly import (
    assemble_vector,
    assemble_matrix,
    assemble_facet_load,
    facet_gradient,
    facet_weights,
)

class ElasticityTensor(BaseModel):
    """c^{ijkl} = lam d^{ij} d^{kl} + mu (d^{ik} d^{jl} + d^{il} d^{jk})."""
    model_config = ConfigDict(frozen=True)

    lam: float = Field(description="Lame constant lambda", gt=0)
    mu: float = Field(description="Lame constant mu", gt=0)
    dimension: int = Field(description="Space dimension", default=3)

    @field_validator("dimension")
    @classmethod
    def check_dimension(cls, value):
        if value not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {value}")
        return value

    def c_eval(self, i: int, j: int, k: int, l: int) -> float:
        """Entry c^{ijkl} with 1-based indices."""
        for index in (i, j, k, l):
            if not 1 <= index <= self.dimension:
                raise ValueError(f"Index {index} out of range 1..{self.dimension} for {type(self).__name__}")
        delta = lambda p, q: 1.0 if p == q else 0.0
        return self.lam * delta(i, j) * delta(k, l) + self.mu * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k))

    def tensor(self) -> np.ndarray:
        I = np.eye(self.dimension)
        return (
            self.lam * np.einsum("ij,kl->ijkl", I, I)
            + self.mu * (np.einsum("ik,jl->ijkl", I, I) + np.einsum("il,jk->ijkl", I, I))
        )

    def contract(self, G: np.ndarray) -> np.ndarray:
        """c^{ijkl} G_kl on the last two axes."""
        trace = np.trace(G, axis1=-2, axis2=-1)[..., None, None]
        return self.lam * trace * np.eye(G.shape[-1]) + self.mu * (G + np.swapaxes(G, -1, -2))

    def energy_density(self, E: np.ndarray) -> np.ndarray:
        """(1/4) c^{ijkl} E_ij E_kl."""
        return 0.25 * np.einsum("...ij,...ij->...", self.contract(E), E)

def c_eval(i: int, j: int, k: int, l: int, c: ElasticityTensor) -> float:
    return c.c_eval(i, j, k, l)

class OperatorOutput(BaseModel):
    """
    A discrete operator applied to a field.

    Attributes:
        values: Strong nodal values (zero off the phase), diagnostic quality on `interior`.
        weak: Nodal pairing vector against every test function.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray = Field(description="Strong nodal values, shape (n_nodes, d)")
    weak: np.ndarray = Field(description="Weak pairing vector, shape (n_nodes, d)")
    phase: Phase = Field(description="The phase the operator acts on")
    interior: np.ndarray = Field(description="Nodes two layers inside the phase")

    @model_validator(mode="after")
    def check_finite(self):
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.weak))):
            raise ValueError(f"Invalid {type(self).__name__}: non-finite entries")
        return self

class InterfaceField(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray = Field(description="Values at the facet points, shape (F, Qf, d)")
    mean: np.ndarray = Field(description="Facet averages, shape (F, d)")
    normals: np.ndarray = Field(description="Facet normals pointing into the solid, shape (F, d)")
    mesh: Any = Field(description="The PhaseMesh", repr=False)

    def weak(self) -> np.ndarray:
        return assemble_facet_load(self.values, self.mesh)

def check_on_phase(field: np.ndarray, mesh, phase: Phase) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.shape != (mesh.n_nodes, mesh.dimension):
        raise PhaseMismatchError(f"Field of shape {field.shape} does not match ({mesh.n_nodes}, {mesh.dimension})")
    if not np.all(np.isfinite(field[mesh.nodes_of(phase)])):
        raise PhaseMismatchError(f"Field is not defined on every {phase.value} node")
    return field

def svk_stress(F: np.ndarray, c: ElasticityTensor) -> np.ndarray:
    """First Piola-type stress P^i_l = c^{mjkl} (F^T F - I)_{mj} F^i_k."""
    return F @ c.contract(strain_offset_array(F))

def svk_tangent(F: np.ndarray, c: ElasticityTensor) -> np.ndarray:
    """dP_ij / dF_mn of svk_stress."""
    d = F.shape[-1]
    I = np.eye(d)
    S = c.contract(strain_offset_array(F))
    FFt = F @ np.swapaxes(F, -1, -2)
    return (
        np.einsum("im,...nj->...ijmn", I, S)
        + 2.0 * c.lam * np.einsum("...ij,...mn->...ijmn", F, F)
        + 2.0 * c.mu * np.einsum("...in,...mj->...ijmn", F, F)
        + 2.0 * c.mu * np.einsum("...im,jn->...ijmn", FFt, I)
    )

def stiffness_L(c: ElasticityTensor, mesh, symmetrize: bool = True) -> sp.csr_matrix:
    """
    Matrix A with <A u, w> = int_solid c(grad u + grad u^T) : grad w.

    The discrete L is -A; with symmetrize=False the bilinear form is int c grad u : grad w.
    """
    factor = 2.0 if symmetrize else 1.0
    return assemble_matrix(factor * c.tensor(), mesh, mesh.cells_of(Phase.Solid))

def linear_L(u: np.ndarray, c: ElasticityTensor, mesh, symmetrize: bool = True) -> OperatorOutput:
    """
    L(u)^i = [c^{ijkl} (u^k,_l + u^l,_k)],_j on the solid.

    With symmetrize=False this is the bracket [c^{ijkl} u^k,_l],_j.
    """
    u = check_on_phase(u, mesh, Phase.Solid)
    cells = mesh.cells_of(Phase.Solid)
    G = cell_gradient(u, mesh, cells)
    P = c.contract(G + np.swapaxes(G, -1, -2)) if symmetrize else c.contract(G)
    return OperatorOutput(
        values=strong_divergence(P, mesh, Phase.Solid),
        weak=-assemble_vector(P, mesh, cells),
        phase=Phase.Solid,
        interior=mesh.interior_nodes(Phase.Solid, depth=2),
    )

def nonlinear_N(eta: np.ndarray, c: ElasticityTensor, mesh) -> OperatorOutput:
    """N(eta) = -c^{mjkl} [(eta,_m . eta,_j - d_mj) eta^i,_k],_l, paired as int P : grad phi."""
    eta = check_on_phase(eta, mesh, Phase.Solid)
    cells = mesh.cells_of(Phase.Solid)
    P = svk_stress(cell_gradient(eta, mesh, cells), c)
    return OperatorOutput(
        values=-strong_divergence(P, mesh, Phase.Solid),
        weak=assemble_vector(P, mesh, cells),
        phase=Phase.Solid,
        interior=mesh.interior_nodes(Phase.Solid, depth=2),
    )

def traction_G(eta: np.ndarray, c: ElasticityTensor, mesh) -> InterfaceField:
    """G(eta)^i = c^{mjkl} (eta,_m . eta,_j - d_mj) eta^i,_k N_l on the interface facets, solid side."""
    if mesh.n_facets == 0:
        raise MeshError("The mesh has no interface facets")
    eta = check_on_phase(eta, mesh, Phase.Solid)
    P = svk_stress(facet_gradient(eta, mesh), c)
    values = np.einsum("fqil,fl->fqi", P, mesh.facet_normal)
    weights = facet_weights(mesh)
    mean = np.einsum("fq,fqi->fi", weights, values) / weights.sum(axis=1)[:, None]
    return InterfaceField(values=values, mean=mean, normals=mesh.facet_normal, mesh=mesh)

def interface_flux(P_facets: np.ndarray, mesh) -> np.ndarray:
    """Pointwise P N at the facet points for stress values (F, Qf, d, d)."""
    return np.einsum("fqil,fl->fqi", P_facets, mesh.facet_normal)
