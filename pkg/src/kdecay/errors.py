"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class UnsupportedCaseError(DomainError):
    """The requested case has no closed form (e.g. polynomial order != derivative order)."""


class DivergenceError(ArithmeticError):
    """A numeric computation produced a non-finite value."""


class ConfigError(ValueError):
    """A configuration file or section failed to parse or validate.

    ``field`` names the offending key (dotted path) when known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
