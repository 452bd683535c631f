from .forcing import (
    BodyForce,
    ZeroForce,
    ConstantForce,
    PulseForce,
    CallableForce,
    make_forcing,
    KappaForcingProfile,
    forcing_hg,
)
from .initial_data import initial_velocity, solid_bump, fluid_swirl, INITIAL_DATA_PRESETS
from .jets import ConfigurationJet, finite_difference_jet
from .hierarchy import (
    CompatData,
    build_q0,
    build_w1,
    build_q1,
    build_w2,
    build_q2,
    build_w3,
    build_pressure_hierarchy,
    build_velocity_hierarchy,
    build_compat,
)
from .checker import check_compatibility, tangential

__all__ = [
    "BodyForce",
    "ZeroForce",
    "ConstantForce",
    "PulseForce",
    "CallableForce",
    "make_forcing",
    "KappaForcingProfile",
    "forcing_hg",
    "initial_velocity",
    "solid_bump",
    "fluid_swirl",
    "INITIAL_DATA_PRESETS",
    "ConfigurationJet",
    "finite_difference_jet",
    "CompatData",
    "build_q0",
    "build_w1",
    "build_q1",
    "build_w2",
    "build_q2",
    "build_w3",
    "build_pressure_hierarchy",
    "build_velocity_hierarchy",
    "build_compat",
    "check_compatibility",
    "tangential",
]
