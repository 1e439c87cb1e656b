"""Exception types raised across the package."""


class ScrollforgeError(Exception):
    """Base class for all package errors."""


class NoMatchingRegion(ScrollforgeError, LookupError):
    """No piece guard holds at the queried state (mis-specified system)."""

    def __init__(self, x):
        self.x = x
        super().__init__(f"no piece guard holds at x = {list(map(float, x))}")


class NotSingleZeroEigenvalue(ScrollforgeError, ValueError):
    """Zero is not a simple root of the characteristic polynomial."""


class SchemaError(ScrollforgeError, ValueError):
    """A system document does not match the expected schema."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class DimensionError(ScrollforgeError, ValueError):
    """A matrix or vector has the wrong shape (everything here is 3-dimensional)."""


class Divergence(ScrollforgeError, ArithmeticError):
    """A trajectory left the configured bound or became non-finite."""

    def __init__(self, time, state, bound):
        self.time = time
        self.state = state
        self.bound = bound
        super().__init__(f"trajectory diverged at t = {time:.6g} (|x| > {bound:g})")


class DegenerateSeries(ScrollforgeError, ValueError):
    """The mean-square displacement has zero variance; K_c is undefined."""


class EmptyTrajectory(ScrollforgeError, ValueError):
    """An analysis was requested on a trajectory without samples."""
