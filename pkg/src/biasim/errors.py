"""Exception types shared across the simulation engine."""


class SimError(Exception):
    """Base class for all simulator errors."""


class UnknownParameter(SimError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"unknown parameter path: {path!r}")


class ValueOutOfRange(SimError):
    def __init__(self, path: str, value, lo=None, hi=None):
        self.path = path
        self.value = value
        bounds = ""
        if lo is not None or hi is not None:
            bounds = f" (allowed {lo}..{hi})"
        super().__init__(f"value {value!r} out of range for {path!r}{bounds}")


class InvalidConfig(SimError):
    def __init__(self, path: str, reason: str = ""):
        self.path = path
        msg = f"invalid configuration key: {path!r}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class HistoryTooShort(SimError):
    """Routine choice requested before the trip window is full."""


class AllCriteriaSuppressed(SimError):
    """Every criterion with positive priority is halo-suppressed; the mark is undefined."""


class InfeasibleProfile(SimError):
    """No sampled priority vector makes the assigned mode the rational best choice."""


class InvalidScript(SimError):
    """A scenario script failed validation; the message names the offending field."""


class UnknownSession(SimError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session: {session_id!r}")


class IoFailure(SimError):
    """Wraps OS-level failures while writing run artifacts."""
