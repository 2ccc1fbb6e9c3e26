"""Exception types raised across the package."""


class DcorkitError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(DcorkitError, ValueError):
    """Paired samples have different lengths."""


class SampleSizeError(DcorkitError, ValueError):
    """Sample is too small for the requested estimator or test."""


class ParameterError(DcorkitError, ValueError):
    """Distribution or configuration parameter outside its domain."""


class SingularityError(DcorkitError, ValueError):
    """Correlation matrix is singular; partial correlation undefined."""


class DataError(DcorkitError, ValueError):
    """Input data is unusable: non-finite values, bad file contents."""


class ConfigError(DcorkitError, ValueError):
    """Invalid run configuration (CLI flags or config file)."""
