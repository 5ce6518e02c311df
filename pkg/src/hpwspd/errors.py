"""Exception hierarchy shared by every stage of the pipeline."""


class HpwError(Exception):
    """Base class for all errors raised by hpwspd."""


class InputError(HpwError, ValueError):
    """Malformed points, metric, or parameters."""


class DuplicatePointError(InputError):
    """Two input points coincide."""


class MetricError(InputError):
    """An explicit distance matrix is not a metric."""


class TreeError(HpwError):
    """A decomposition tree violates a structural property."""


class WspdError(HpwError):
    """A WSPD lookup found zero or several separating pairs."""


class CorruptionError(HpwError):
    """Routing state is inconsistent; a correct build never raises this."""
