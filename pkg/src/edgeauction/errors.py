"""Exception types shared across the package."""


class EdgeAuctionError(Exception):
    """Base class for all package errors."""


class ConfigError(EdgeAuctionError, ValueError):
    """A configuration value violates a constraint.

    ``field`` names the offending setting (dotted path when it comes from
    a config file) so callers can point the user at it.
    """

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class DomainError(EdgeAuctionError, ValueError):
    """A numeric argument lies outside the domain of a formula."""


class ContractViolation(EdgeAuctionError, ValueError):
    """Inputs are structurally inconsistent (wrong set size, duplicate ids, ...)."""


class NumericalConditioningError(EdgeAuctionError, ArithmeticError):
    """A least-squares system is rank deficient or too ill-conditioned to trust."""
