"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class TqmeError(Exception):
    exit_code = 1


class ValidationError(TqmeError, ValueError):
    exit_code = 2


class RangeError(ValidationError):
    """A scalar argument fell outside its admissible interval."""


class PlannerError(ValidationError):
    pass


class MitigationError(ValidationError):
    pass


class DimensionError(TqmeError, ValueError):
    exit_code = 3


class CircuitError(DimensionError):
    pass


class DatasetError(TqmeError):
    exit_code = 4

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ResourceGuardError(TqmeError):
    exit_code = 5
