"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid layout, table, or experiment configuration."""


class PostselectionError(RuntimeError):
    """Requested post-selection outcome has (numerically) zero probability."""


class ContractViolation(RuntimeError):
    """An operation was called on a state that breaks its precondition."""
