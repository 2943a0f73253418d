"""Exception types shared across the package."""


class PowerProvError(Exception):
    """Base class for all powerprov errors."""


class MalformedTrace(PowerProvError):
    """Trace input violates the format or a structural invariant."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class SimultaneousEvents(MalformedTrace):
    """Two events share the same timestamp."""


class UnknownJob(MalformedTrace):
    """Departure references a job that is not currently active."""


class ZeroMean(PowerProvError):
    """Operation needs a workload with positive mean."""


class Unreachable(PowerProvError):
    """Requested peak-to-mean ratio cannot be reached for this trace."""


class InvalidTarget(PowerProvError):
    """Target parameter outside its valid range."""


class Infeasible(PowerProvError):
    """Schedule violates x(t) >= a(t) or a boundary condition."""

    def __init__(self, message, time=None):
        self.time = time
        if time is not None:
            message = f"{message} (t={time!r})"
        super().__init__(message)


class FleetExhausted(PowerProvError):
    """A job arrived but no server id was left on the stack."""


class CapExceeded(PowerProvError):
    """Instance exceeds the exhaustive-search caps of the DP oracle."""


class InvalidRange(PowerProvError):
    """Slot/lookahead parameters outside the supported range."""


class NotACriticalSegment(PowerProvError):
    """Interval does not match any of the four segment shapes."""
