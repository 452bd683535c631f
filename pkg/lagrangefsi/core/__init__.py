from .pipeline import Pipeline
from . import datatypes
from . import exceptions

__all__ = [
    "Pipeline",
    "datatypes",
    "exceptions",
]
