"""Exception types shared across the package."""


class Levinson2DError(Exception):
    """Base class for all package-specific failures."""


class DomainError(Levinson2DError, ValueError):
    """An argument lies outside the mathematical domain of the routine."""


class ConfigError(Levinson2DError, ValueError):
    """A run configuration is malformed. The message names the offending field."""


class OutOfValidatedRange(Levinson2DError, ValueError):
    """Inputs are formally legal but outside the range the solver is validated for."""


class UnsupportedOrigin(Levinson2DError, ValueError):
    """The potential is too singular at r = 0 for the series start."""


class IntegrationFailure(Levinson2DError, RuntimeError):
    """The ODE stepper could not meet its tolerance."""


class GridInsufficient(Levinson2DError, RuntimeError):
    """The energy scan grid cannot isolate roots even after refinement."""


class BranchAmbiguity(Levinson2DError, RuntimeError):
    """Phase unwrapping hit the minimum step while still jumping by >= pi/2."""


class NotConverged(Levinson2DError, RuntimeError):
    """Threshold extrapolants disagree beyond tolerance."""


class CrossingAmbiguity(Levinson2DError, RuntimeError):
    """At full coupling a gap-edge ratio sits on a critical surface within tolerance."""


class IllConditioned(Levinson2DError, RuntimeError):
    """A least-squares fit failed its residual sanity bound."""


class UnsupportedRegime(Levinson2DError, ValueError):
    """Tail parameters outside the regime the theorem machinery covers."""


class InfiniteSpectrum(UnsupportedRegime):
    """Attractive inverse-square tail strong enough to bind infinitely many states."""


class ExcludedCase(UnsupportedRegime):
    """Degenerate tail exponent (alpha = 0, or an exponent colliding with j +- 1/2)."""
