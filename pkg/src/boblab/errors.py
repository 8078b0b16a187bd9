"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: ConfigurationError -> 2,
SolverDivergenceError -> 3, ThresholdError -> 4.
"""


class BoblabError(Exception):
    """Base class for package errors."""


class ConfigurationError(BoblabError):
    """Invalid parameter or config value (caught before any computation)."""


class GridMismatchError(BoblabError):
    """Fields on incompatible grids were combined."""


class SupportViolationError(BoblabError):
    """Data violate a documented support precondition of a norm."""


class SolverDivergenceError(BoblabError):
    """Time stepper or Picard iteration produced NaN/blow-up."""


class ResolutionError(BoblabError):
    """Oscillatory quadrature under-resolved (phase step too large)."""


class ThresholdError(BoblabError):
    """A verify-command threshold configured as assert failed."""
