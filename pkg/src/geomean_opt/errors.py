"""Exception hierarchy shared by all solver modules."""


class GeomeanError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(GeomeanError, ValueError):
    """Malformed or out-of-contract input (wrong shape, non-unit vector, ...)."""


class NotPSD(GeomeanError):
    """A matrix required to be positive semidefinite is indefinite beyond tolerance."""


class NotPositiveDefinite(GeomeanError):
    """A matrix required to be positive definite is singular or indefinite."""


class DegenerateInnerProduct(GeomeanError):
    """Some form has a non-positive inner product with the candidate solution."""


class TooManySubsets(GeomeanError):
    """The subset enumeration guard for the hierarchy objective was exceeded."""


class DegenerateMoments(GeomeanError):
    """All contracted moment matrices vanished; nothing to sample from."""


class DomainError(GeomeanError, ValueError):
    """Argument outside the mathematical domain of a special function."""


class FormulaSingular(GeomeanError):
    """A closed-form expression is singular at the requested parameters."""


class UnsupportedDimension(GeomeanError):
    """Dimension outside the guard of an exhaustive-search routine."""


class ParseError(GeomeanError, ValueError):
    """An on-disk document could not be parsed or failed validation."""
