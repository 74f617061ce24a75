"""Exception hierarchy.

The CLI maps these onto its exit-code contract: config problems exit 2,
numerical failures exit 3, non-identifiable fits exit 4.
"""


class CasimirKitError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CasimirKitError, ValueError):
    """Domain violation or malformed input data."""


class UnknownPresetError(InvalidInputError, KeyError):
    """Material preset name not in the built-in catalog."""


class PFAValidityError(InvalidInputError):
    """Curvature-to-gap ratio too small for the proximity mapping."""


class NumericalError(CasimirKitError, RuntimeError):
    """A numerical procedure failed to reach its documented accuracy."""


class QuadratureError(NumericalError):
    """Adaptive integration exhausted its evaluation budget.

    Carries the partial estimates so a failure is diagnosable.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class DerivativeNoiseError(NumericalError):
    """Finite-difference estimate is dominated by evaluation noise."""


class RegularizationMismatchError(NumericalError):
    """Independent cavity-energy routes disagree beyond tolerance."""


class NonIdentifiableError(CasimirKitError):
    """Objective is flat: the requested parameter cannot be determined."""


class NoSolutionError(CasimirKitError):
    """A root/crossover was requested where none exists in the search window."""


class ConvergenceError(CasimirKitError):
    """Iterative search exhausted its bracket without converging."""


class ConfigError(CasimirKitError):
    """CLI configuration failed schema validation.

    ``field`` is the dotted path of the offending entry, e.g.
    ``mirror_a.coatings[0].thickness_nm``.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
