"""Exception hierarchy shared across the package."""


class EcomarlError(Exception):
    """Base class for all package errors."""


class ConfigurationError(EcomarlError):
    """Invalid environment or run configuration (bad task, pattern, level...)."""


class ActionError(EcomarlError):
    """Action arity or range does not match the environment's action spec."""


class LifecycleError(EcomarlError):
    """Operation invalid for the episode's current lifecycle state."""


class DomainError(EcomarlError):
    """Numeric input outside an operation's mathematical domain."""


class ContractError(EcomarlError):
    """Mismatched buffer/sequence shapes passed between components."""
