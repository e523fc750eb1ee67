"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
GeometryError / NumericalError -> 4.
"""


class ConfigError(ValueError):
    """Bad or missing configuration value."""


class DataError(ValueError):
    """Malformed input file or inconsistent input data."""


class GeometryError(ValueError):
    """A geometric precondition does not hold (off-surface, cut locus, ...)."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed (singular system, ill-posed fit)."""
