"""Shared exception types."""


class EvlabError(Exception):
    """Base class for all library errors."""


class PoleError(EvlabError):
    """Evaluation requested at (or too close to) a pole."""


class RegionError(EvlabError):
    """Argument outside the region where the chosen method is valid."""


class CeilingError(EvlabError):
    """Argument beyond a configured hard ceiling (e.g. |Im s| for zeta)."""


class DivergenceError(EvlabError):
    """Integral or series does not converge for these parameters."""


class QuadratureFailure(EvlabError):
    """Adaptive quadrature did not reach the requested tolerance."""


class BudgetExceededError(EvlabError):
    """Evaluation budget exhausted; partial result may be attached."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class GridFailureError(EvlabError):
    """Moment grid refinement failed to stabilize within budget."""


class MaassFileError(EvlabError):
    """Malformed Maass-form data file; message names the offending line."""


class MissingPrimeError(MaassFileError):
    """A required prime eigenvalue is absent from the data file."""


class InvariantViolationError(MaassFileError):
    """Loaded data violates a structural invariant (e.g. eigenvalue bound)."""


class InsufficientCoefficientsError(EvlabError):
    """An operation needs eigenvalues beyond the available prime range."""

    def __init__(self, message, required_pmax=None, missing=None):
        super().__init__(message)
        self.required_pmax = required_pmax
        self.missing = missing


class ConfigError(EvlabError):
    """Invalid run configuration."""
