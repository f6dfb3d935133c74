"""Exception types shared across the package."""


class SmcLabError(Exception):
    """Base class for all smclab errors."""


class InvalidInputError(SmcLabError, ValueError):
    """Empty input, mismatched lengths, or malformed parameters."""


class DomainError(SmcLabError, ValueError):
    """A value outside the mathematical domain, e.g. a return <= -100%."""


class CapacityError(SmcLabError, ValueError):
    """Input exceeds a documented size cap of a combinatorial routine."""


class DataError(SmcLabError, ValueError):
    """Malformed or inconsistent input data; message carries file/line context."""


class AlignmentError(SmcLabError, ValueError):
    """Two series that must share a date vector do not."""
