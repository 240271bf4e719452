"""Exception hierarchy.

Two families matter to callers: :class:`ConfigError` for inputs that can
never be evaluated (bad parameters, degenerate geometry) and
:class:`NumericalError` for computations that were attempted and failed.
The command line maps them to distinct exit codes.
"""


class HeunError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(HeunError, ValueError):
    pass


class NumericalError(HeunError, ArithmeticError):
    pass


# -- configuration / geometry -------------------------------------------------

class FuchsRelationViolated(ConfigError):
    pass


class DegenerateConfig(ConfigError):
    """Singular points coincide (or nearly so)."""


class DuplicatePoints(ConfigError):
    pass


class DegenerateMap(ConfigError):
    """Moebius map with vanishing determinant."""


class DegenerateCrossRatio(ConfigError):
    pass


class DegenerateFrame(ConfigError):
    pass


class SingularAtOrigin(ConfigError):
    """A singular point sits at z=0 where a Taylor expansion is required."""


class NotCanonical(ConfigError):
    pass


class BadFamilyForConfig(ConfigError):
    pass


class ResonantGamma(ConfigError):
    pass


class ZeroModulus(ConfigError):
    pass


class LogarithmicCase(ConfigError):
    pass


class ResonantExponents(ConfigError):
    pass


# -- numerical failures -------------------------------------------------------

class SingularPointHit(NumericalError):
    pass


class OutsideDisk(NumericalError):
    pass


class OutsideDomain(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class NotConverged(NoConvergence):
    pass


class SeriesOverflow(NumericalError, OverflowError):
    pass


class InsufficientTerms(NumericalError):
    pass


class SingularApproach(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class NonIntegrableEndpoint(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass


class NoRootInWindow(NumericalError):
    pass
