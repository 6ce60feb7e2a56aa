"""Capacity bounds for bandlimited optical intensity channels."""

from . import bounds, distributions, mi, pulses, simulate
from .errors import (AsymptoticOnly, BloicError, DiscreteDistribution, DivergentMetric,
                     InvalidRegime, OutOfRange, UnknownFigure)

__all__ = [
    "bounds", "distributions", "mi", "pulses", "simulate",
    "AsymptoticOnly", "BloicError", "DiscreteDistribution", "DivergentMetric",
    "InvalidRegime", "OutOfRange", "UnknownFigure",
]
