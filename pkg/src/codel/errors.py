"""Exception types shared across the package."""


class CodelError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(CodelError, ValueError):
    """A configuration value or function argument is out of its valid range."""


class InsufficientDataError(CodelError, ValueError):
    """The input is too short for the requested computation."""


class ShapeError(CodelError, ValueError):
    """An array has the wrong length or dimensionality."""


class ContractError(CodelError, RuntimeError):
    """A caller violated an internal precondition (e.g. non-descent direction)."""
