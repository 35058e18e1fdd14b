"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid scenario configuration or CLI/config-file input."""


class NumericalDomainError(ValueError):
    """An operand left the documented numerical domain.

    Raised e.g. for Ei(x) with x >= 0, non-positive estimated link
    variances, or degenerate exponential rate sets that survive the
    perturbation guard.
    """
