"""Exception and warning types shared across the package."""


class BloicError(Exception):
    """Base class for errors raised by this package."""


class DivergentMetric(BloicError):
    """A pulse metric (log-spectrum integral or excursion sum) is infinite."""


class DiscreteDistribution(BloicError):
    """Differential entropy was requested for a discrete law."""


class OutOfRange(BloicError, ValueError):
    """An argument lies outside the domain of a transcendental solver."""


class InvalidRegime(BloicError, ValueError):
    """The PAPR/pulse combination admits no DC-biased construction."""


class UnknownFigure(BloicError, KeyError):
    pass


class AsymptoticOnly(UserWarning):
    """Emitted when a high-SNR-only expression is evaluated outside its regime."""
