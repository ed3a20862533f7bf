"""Exception types raised across the package.

Every error that callers are expected to handle subclasses
:class:`TailCovarError`, so ``except TailCovarError`` catches any failure
coming out of the library while letting genuine bugs propagate.  Most
errors are also ``ValueError`` subclasses because they signal bad inputs.
"""

from __future__ import annotations

__all__ = [
    "TailCovarError",
    "NonFiniteData",
    "TooShort",
    "BadK",
    "BadLevel",
    "NonPositiveThreshold",
    "BadSpec",
    "ThetaOutOfBox",
    "RegionTooLarge",
    "DegenerateMoments",
    "NoConvergence",
    "BadEta",
    "NoRoot",
    "RootFail",
    "TooFewExceedances",
    "WindowTooShort",
    "Unsupported",
    "EtaStarOutOfRange",
]


class TailCovarError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteData(TailCovarError, ValueError):
    """Input data contains NaN or infinite values."""


class TooShort(TailCovarError, ValueError):
    """Input series is shorter than the minimum usable length."""


class BadK(TailCovarError, ValueError):
    """A tail sample fraction ``k`` is out of range for the sample size."""


class BadLevel(TailCovarError, ValueError):
    """A probability level ``p`` is outside ``(0, 1)``."""


class NonPositiveThreshold(TailCovarError, ValueError):
    """The order statistic used as tail threshold is not strictly positive.

    Log-based tail estimators need positive exceedances; callers with
    negative data must shift it before estimation.
    """


class BadSpec(TailCovarError, ValueError):
    """A model or weight-scheme specification violates its constraints."""


class ThetaOutOfBox(TailCovarError, ValueError):
    """A family parameter lies outside the family's admissible box."""


class RegionTooLarge(TailCovarError, ValueError):
    """A weight region extends beyond the domain covered by ``k3`` and ``n``."""


class DegenerateMoments(TailCovarError, ValueError):
    """All empirical tail moments vanish, so the fit is unidentified."""


class NoConvergence(TailCovarError, RuntimeError):
    """The minimizer failed to converge from every start point."""


class BadEta(TailCovarError, ValueError):
    """A residual tail dependence coefficient lies outside ``(1/2, 1]``."""


class NoRoot(TailCovarError, RuntimeError):
    """The adjustment-factor equation has no root in the search interval."""


class RootFail(TailCovarError, RuntimeError):
    """A bracketed root search failed to enclose a sign change."""


class TooFewExceedances(TailCovarError, ValueError):
    """Fewer than two observations exceed the conditioning threshold."""


class WindowTooShort(TailCovarError, ValueError):
    """A rolling window is too long for the available series."""


class Unsupported(TailCovarError, ValueError):
    """The requested operation needs a capability the family does not have."""


# The adjustment-factor equation failing to bracket inside (0, 1] is surfaced
# under both names: ``NoRoot`` at the solver and ``EtaStarOutOfRange`` when it
# propagates out of the composite estimator.
EtaStarOutOfRange = NoRoot
