"""Exception types raised across the package."""


class ModelSpaceError(Exception):
    """Base class for all package errors."""


class RepresentationError(ModelSpaceError, ValueError):
    """An arc list or measure literal is not in canonical form."""


class UnsupportedScheduleError(ModelSpaceError, ValueError):
    """Unknown gap-schedule family tag."""


class DomainError(ModelSpaceError, ValueError):
    """Input lies outside the domain where an operation is defined."""


class SingularityError(ModelSpaceError, ValueError):
    """Evaluation requested on (or within resolution of) a singular support."""


class UnsupportedOrderError(ModelSpaceError, ValueError):
    """Derivative order outside the supported range."""


class DecompositionRequiredError(ModelSpaceError, ValueError):
    """Operation is only defined for the Beurling-Carleson part of a measure."""


class HypothesisViolationError(ModelSpaceError, ValueError):
    """Inner function violates the hypothesis of the approximation theorem."""


class GridMismatchError(ModelSpaceError, ValueError):
    """Grid functions live on different grids."""


class IntegrabilityError(ModelSpaceError, ValueError):
    """Blow-up profile is not integrable for the requested parameters."""


class DerivativeUnavailableError(ModelSpaceError, ValueError):
    """A derivative was requested from a function known only by samples."""


class UnsupportedFormError(ModelSpaceError, ValueError):
    """Function representation not supported by the requested operation."""


class SupportMismatchError(ModelSpaceError, ValueError):
    """Measure support is not contained in the profile's zero set."""


class ConfigError(ModelSpaceError, ValueError):
    """Experiment configuration failed validation."""
