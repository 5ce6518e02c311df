"""Heavy path WSPD spanners, compact routing tables and memoryless local routing."""

from .errors import CorruptionError, DuplicatePointError, HpwError, InputError, MetricError, TreeError, WspdError
from .metric import EuclideanMetric, Hypercube, MatrixMetric
from .pipeline import Build, build_pipeline

__all__ = [
    "Build",
    "CorruptionError",
    "DuplicatePointError",
    "EuclideanMetric",
    "HpwError",
    "Hypercube",
    "InputError",
    "MatrixMetric",
    "MetricError",
    "TreeError",
    "WspdError",
    "build_pipeline",
]
