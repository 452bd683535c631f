from .elasticity import (
    ElasticityTensor,
    OperatorOutput,
    InterfaceField,
    c_eval,
    svk_stress,
    svk_tangent,
    stiffness_L,
    linear_L,
    nonlinear_N,
    traction_G,
)
from .fluid import (
    fluid_viscous,
    lagrangian_div,
    lagrangian_div_array,
    pressure_term,
    viscous_flux,
    pressure_flux,
)
from .assembly import (
    assemble_vector,
    assemble_matrix,
    assemble_load,
    assemble_mass,
    lumped_mass,
    assemble_facet_load,
)

__all__ = [
    "ElasticityTensor",
    "OperatorOutput",
    "InterfaceField",
    "c_eval",
    "svk_stress",
    "svk_tangent",
    "stiffness_L",
    "linear_L",
    "nonlinear_N",
    "traction_G",
    "fluid_viscous",
    "lagrangian_div",
    "lagrangian_div_array",
    "pressure_term",
    "viscous_flux",
    "pressure_flux",
    "assemble_vector",
    "assemble_matrix",
    "assemble_load",
    "assemble_mass",
    "lumped_mass",
    "assemble_facet_load",
]
