from abc import ABC, abstractmethod
from typing import Dict

from lagrangefsi.core.datatypes import Verdict

class Metric(ABC):
    """Turns measured values into a PASS/FAIL verdict."""

    def __init__(self, name: str):
        self.name = name

    @abstractmethod
    def eval(self, measured: Dict[str, float]) -> Verdict:
        raise NotImplementedError(
            f"Metric {type(self).__name__} is missing the required 'eval' method."
        )

    def __call__(self, measured: Dict[str, float]) -> Verdict:
        return self.eval(measured)
