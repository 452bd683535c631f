from .sparse_system import SparseSystem, solve_spd, check_spd
from .newton import solve_newton, check_jacobian

__all__ = [
    "SparseSystem",
    "solve_spd",
    "check_spd",
    "solve_newton",
    "check_jacobian",
]
