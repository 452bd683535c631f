from .quadrature import QuadratureRule, FacetRule
from .phase_mesh import SolidRegion, GeometrySpec, PhaseMesh, build_mesh, check_geometry, FLUID, SOLID

__all__ = [
    "QuadratureRule",
    "FacetRule",
    "SolidRegion",
    "GeometrySpec",
    "PhaseMesh",
    "build_mesh",
    "check_geometry",
    "FLUID",
    "SOLID",
]
