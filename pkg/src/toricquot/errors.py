"""Exception hierarchy.  The CLI maps these onto exit codes."""


class ToricError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ToricError):
    """Malformed input: bad fan JSON, wrong divisor length, etc."""


class FanValidationError(InputError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid fan: " + "; ".join(self.violations))


class TorusFactorError(InputError):
    """Rays do not span N (x) Q; split off the torus factor first."""


class PreconditionError(ToricError):
    """An operation was called outside its domain (e.g. non-Cartier divisor)."""


class NotCartierError(PreconditionError):
    pass


class UnsupportedCaseError(ToricError):
    """The requested computation is outside the supported regime."""


class ResourceError(ToricError):
    """A computation exceeded its configured budget."""


class GroebnerBudgetExceeded(ResourceError):
    pass


class SearchFailure(ResourceError):
    def __init__(self, message, last_certificates=None):
        super().__init__(message)
        self.last_certificates = last_certificates or {}


class FieldError(ToricError):
    """A field that cannot be used for the requested purpose."""
