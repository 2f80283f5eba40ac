"""Exception types. Each carries enough data to reproduce the failure."""


class GromovLabError(Exception):
    """Base class; ``witness`` is a tuple of indices or values, or None."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness

    def to_dict(self):
        return {
            "error": type(self).__name__,
            "message": str(self),
            "witness": None if self.witness is None else list(self.witness),
        }


class MetricSpaceError(GromovLabError, ValueError):
    """A distance table is not a valid (finite) metric."""


class TransformNotMetricOnThisSpace(MetricSpaceError):
    """Applying a transform produced a table violating the triangle inequality."""


class BracketFailure(GromovLabError, ValueError):
    """Sign conditions for a bisection bracket do not hold."""


class InvalidRange(GromovLabError, ValueError):
    pass


class BoundedTransform(GromovLabError, ValueError):
    pass


class CannotPerturb(GromovLabError, RuntimeError):
    pass


class TransformSpecError(GromovLabError, ValueError):
    """Unparseable or out-of-range transform description."""
