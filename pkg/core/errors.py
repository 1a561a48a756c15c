class OrbifoldError(Exception):
    """Base class for every error raised by the engines."""
    pass


class InputError(OrbifoldError):
    """Malformed or inconsistent input data."""
    pass


class CheckFailure(OrbifoldError):
    """A verified identity does not hold.

    Args:
        message: Human readable summary
        report: The report that recorded the failing check, if any
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
