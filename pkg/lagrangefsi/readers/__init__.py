from .reader import Reader
from .config import (
    RunConfig,
    GeometryConfig,
    PhysicsConfig,
    NumericsConfig,
    DataConfig,
    ExperimentConfig,
    OutputConfig,
    FORCING_PRESETS,
    describe_defaults,
)
from .config_reader import ConfigReader, parse_config
from .field_reader import FieldReader

__all__ = [
    "Reader",
    "RunConfig",
    "GeometryConfig",
    "PhysicsConfig",
    "NumericsConfig",
    "DataConfig",
    "ExperimentConfig",
    "OutputConfig",
    "FORCING_PRESETS",
    "describe_defaults",
    "ConfigReader",
    "parse_config",
    "FieldReader",
]
