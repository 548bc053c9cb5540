"""Exception families used across the package.

The CLI maps these onto distinct exit codes (config=2, data/io=3,
numeric=4), so library code should raise the most specific one.
"""


class ConfigError(ValueError):
    """Invalid configuration value, flag, or precondition violation."""


class DataFormatError(RuntimeError):
    """On-disk data is missing, truncated, or fails header validation."""


class NumericError(RuntimeError):
    """A computation produced NaN/inf or an otherwise unusable result."""


class IntegrityError(RuntimeError):
    """A structural contract was violated (e.g. a positive leaked into a negative set)."""
