from .metric import Metric
from .threshold import ThresholdMetric, RangeMetric, AllMetric, flag

__all__ = [
    "Metric",
    "ThresholdMetric",
    "RangeMetric",
    "AllMetric",
    "flag",
]
