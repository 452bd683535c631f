from .problem import FSIProblem
from .residual import ResidualEvaluator, assemble_residual, internal_force
from .diagnostics import (
    ZProxy,
    record_state,
    kinetic_energy,
    elastic_energy,
    h1_norm,
    displacement_h2,
    pressure_l2,
    constraint_residual,
    min_det,
)
from .stepper import penalty_pressure, initial_state, step, march, run

__all__ = [
    "FSIProblem",
    "ResidualEvaluator",
    "assemble_residual",
    "internal_force",
    "ZProxy",
    "record_state",
    "kinetic_energy",
    "elastic_energy",
    "h1_norm",
    "displacement_h2",
    "pressure_l2",
    "constraint_residual",
    "min_det",
    "penalty_pressure",
    "initial_state",
    "step",
    "march",
    "run",
]
