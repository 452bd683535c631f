import warnings
import numpy as np
from typing import Any, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lagrangefsi.core.datatypes import Phase, PointRule
from lagrangefsi.core.exceptions import MeshError, PhaseMismatchError, InjectivityWarning
from lagrangefsi.kinematics.tensors import cofactor_array, det_array, strain_offset_array
from lagrangefsi.kinematics.recovery import cell_gradient

class PointField(BaseModel):
    """Values at the points of a rule on the cells of one phase."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray = Field(description="Point values, shape (C, Q, ...)")
    mesh: Any = Field(description="The PhaseMesh the values live on", repr=False)
    phase: Phase = Field(description="The phase whose cells carry the values", default=Phase.Both)
    rule: PointRule = Field(description="The point rule", default=PointRule.Gauss)
    cells: np.ndarray = Field(description="The cells, in the order of the first axis")

    @model_validator(mode="after")
    def check_values(self):
        if self.values.shape[0] != len(self.cells):
            raise ValueError(f"Invalid {type(self).__name__}: {self.values.shape[0]} cells of values for {len(self.cells)} cells")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"Invalid {type(self).__name__}: non-finite entries")
        return self

    def points(self) -> np.ndarray:
        return self.mesh.points(self.cells, self.rule)

class TensorField(PointField):

    @model_validator(mode="after")
    def check_dimension(self):
        d = self.mesh.dimension
        if self.values.shape[-2:] != (d, d):
            raise ValueError(f"Invalid TensorField: entries of shape {self.values.shape[-2:]} for dimension {d}")
        return self

class ScalarField(PointField):
    pass

class CofactorField(TensorField):
    source: Optional[TensorField] = Field(description="The gradient it was computed from", default=None, repr=False)

class StrainOffsetField(TensorField):
    source: Optional[TensorField] = Field(description="The gradient it was computed from", default=None, repr=False)

def _check_nodal(field: np.ndarray, mesh, phase: Phase) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.ndim != 2 or field.shape[0] != mesh.n_nodes:
        raise PhaseMismatchError(f"Nodal field of shape {field.shape} does not match {mesh.n_nodes} nodes")
    if not np.all(np.isfinite(field[mesh.nodes_of(phase)])):
        raise PhaseMismatchError(f"Nodal field is not defined on every {phase.value} node")
    return field

def gradient(field: np.ndarray, mesh, phase: Phase = Phase.Both, rule: PointRule = PointRule.Gauss) -> TensorField:
    """
    Gradient of a nodal vector field at the rule points of the phase cells.

    Parameters:
        field (np.ndarray): Nodal values, shape (n_nodes, d).
        mesh (PhaseMesh): The mesh.
        phase (Phase): Cells on which the gradient is evaluated.
        rule (PointRule): Gauss or cell-center points.

    Raises:
        PhaseMismatchError: If the field is undefined on a node of the phase.
        MeshError: If the cells have zero measure.
    """
    phase = Phase(phase)
    if not mesh.jacobian > 0:
        raise MeshError(f"Degenerate cells of measure {mesh.cell_volume}")
    field = _check_nodal(field, mesh, phase)
    if field.shape[1] != mesh.dimension:
        raise PhaseMismatchError(f"Vector field with {field.shape[1]} components on a {mesh.dimension}D mesh")
    cells = mesh.cells_of(phase)
    return TensorField(values=cell_gradient(field, mesh, cells, rule), mesh=mesh, phase=phase, rule=rule, cells=cells)

def cofactor(F: TensorField) -> CofactorField:
    return CofactorField(values=cofactor_array(F.values), mesh=F.mesh, phase=F.phase, rule=F.rule, cells=F.cells, source=F)

def jacobian_det(F: TensorField, warn: bool = True) -> ScalarField:
    """Pointwise det F; warns with InjectivityWarning where it is not positive."""
    det = det_array(F.values)
    if warn and det.size and det.min() <= 0.0:
        warnings.warn(f"det(grad eta) reaches {det.min():.3e}, the configuration is not injective", InjectivityWarning)
    return ScalarField(values=det, mesh=F.mesh, phase=F.phase, rule=F.rule, cells=F.cells)

def strain_offset(F: TensorField) -> StrainOffsetField:
    return StrainOffsetField(values=strain_offset_array(F.values), mesh=F.mesh, phase=F.phase, rule=F.rule, cells=F.cells, source=F)

def identity_configuration(mesh) -> np.ndarray:
    return mesh.nodes.copy()
