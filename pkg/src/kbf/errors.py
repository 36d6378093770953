class KbfError(Exception):
    """Base class for errors raised by this package."""


class NotPositiveDefiniteError(KbfError):
    """Cholesky hit a non-positive pivot; the matrix needs (more) loading."""


class NumericalFailureError(KbfError):
    """An iterative kernel did not converge or produced non-finite values."""


class InfeasibleLoadingError(KbfError):
    """No finite diagonal load reaches the requested condition-number cap."""


class ConfigurationError(KbfError):
    pass


class SnapshotFormatError(KbfError):
    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
