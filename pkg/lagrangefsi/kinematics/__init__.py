from .fields import (
    PointField,
    TensorField,
    ScalarField,
    CofactorField,
    StrainOffsetField,
    gradient,
    cofactor,
    jacobian_det,
    strain_offset,
    identity_configuration,
)
from .tensors import (
    cofactor_array,
    det_array,
    strain_offset_array,
    cofactor_derivative,
    cofactor_jet,
    metric_jet,
    strain_jet,
)
from .recovery import (
    at_points,
    cell_gradient,
    recover,
    nodal_gradient,
    nodal_divergence,
    nodal_laplacian,
    strong_divergence,
)

__all__ = [
    "PointField",
    "TensorField",
    "ScalarField",
    "CofactorField",
    "StrainOffsetField",
    "gradient",
    "cofactor",
    "jacobian_det",
    "strain_offset",
    "identity_configuration",
    "cofactor_array",
    "det_array",
    "strain_offset_array",
    "cofactor_derivative",
    "cofactor_jet",
    "metric_jet",
    "strain_jet",
    "at_points",
    "cell_gradient",
    "recover",
    "nodal_gradient",
    "nodal_divergence",
    "nodal_laplacian",
    "strong_divergence",
]
