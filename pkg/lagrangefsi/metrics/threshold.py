import math
from typing import Dict, List, Literal, Sequence

from lagrangefsi.core.datatypes import Verdict
from lagrangefsi.metrics.metric import Metric

class ThresholdMetric(Metric):
    """
    PASS when measured[key] compares to the threshold as requested.

    Parameters:
        comparison (str): "le" for value <= threshold, "ge" for value >= threshold.
    """

    def __init__(self, name: str, key: str, threshold: float, comparison: Literal["le", "ge"] = "le"):
        super().__init__(name)
        if comparison not in ("le", "ge"):
            raise ValueError(f"Invalid comparison '{comparison}' for {type(self).__name__}, expected 'le' or 'ge'")
        self.key = key
        self.threshold = threshold
        self.comparison = comparison

    def eval(self, measured: Dict[str, float]) -> Verdict:
        if self.key not in measured:
            raise ValueError(f"Metric {self.name} needs the measured value '{self.key}'")
        value = measured[self.key]
        if math.isnan(value):
            passed = False
        elif self.comparison == "le":
            passed = value <= self.threshold
        else:
            passed = value >= self.threshold
        sign = "<=" if self.comparison == "le" else ">="
        return Verdict(
            name=self.name,
            passed=bool(passed),
            measured=dict(measured),
            detail=f"{self.key} {sign} {self.threshold!r}",
        )

class RangeMetric(Metric):
    """PASS when lower <= measured[key] <= upper."""

    def __init__(self, name: str, key: str, lower: float, upper: float):
        super().__init__(name)
        self.key = key
        self.lower = lower
        self.upper = upper

    def eval(self, measured: Dict[str, float]) -> Verdict:
        value = measured[self.key]
        return Verdict(
            name=self.name,
            passed=bool(self.lower <= value <= self.upper),
            measured=dict(measured),
            detail=f"{self.lower!r} <= {self.key} <= {self.upper!r}",
        )

class AllMetric(Metric):
    """PASS when every sub-metric passes on the same measurements."""

    def __init__(self, name: str, metrics: Sequence[Metric]):
        super().__init__(name)
        self.metrics: List[Metric] = list(metrics)

    def eval(self, measured: Dict[str, float]) -> Verdict:
        verdicts = [metric.eval(measured) for metric in self.metrics]
        return Verdict(
            name=self.name,
            passed=all(v.passed for v in verdicts),
            measured=dict(measured),
            detail="; ".join(v.detail for v in verdicts),
        )

def flag(name: str, passed: bool, measured: Dict[str, float], detail: str = "") -> Verdict:
    """A verdict for a property checked directly."""
    return Verdict(name=name, passed=bool(passed), measured=dict(measured), detail=detail)
