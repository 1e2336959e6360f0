"""Finite-blocklength normal approximation for the complex AWGN channel."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..constellation import q_function

LOG2E = math.log2(math.e)


@dataclass(frozen=True)
class NormalApproxPoint:
    n: int
    rate: float
    snr: float
    epsilon: float


def capacity(snr: float) -> float:
    return math.log2(1.0 + snr)


def dispersion(snr: float) -> float:
    """Channel dispersion in bits^2 per channel use."""
    return snr * (snr + 2.0) / (snr + 1.0) ** 2 * LOG2E**2


def normal_approximation(n: int, rate: float, snr: float) -> float:
    """Block error probability ``Q((n(C - R) + log2(n)/2) / sqrt(n V))``."""
    if snr <= 0:
        raise ValueError("snr must be positive")
    if n < 1 or rate <= 0:
        raise ValueError("need n >= 1 and rate > 0")
    arg = (n * (capacity(snr) - rate) + 0.5 * math.log2(n)) / math.sqrt(n * dispersion(snr))
    return min(1.0, max(0.0, q_function(arg)))


def normal_approx_point(n: int, rate: float, snr: float) -> NormalApproxPoint:
    return NormalApproxPoint(n, rate, snr, normal_approximation(n, rate, snr))
