"""Flat SISO block channel ``y = h x + n`` with genie-CSI matched filtering."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .codec import KronConfig, bit_rate
from .errors import ConfigError


class ChannelModel(enum.Enum):
    AWGN = "awgn"
    RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class ChannelRealization:
    h: complex
    sigma2: float
    model: ChannelModel = ChannelModel.AWGN

    def __post_init__(self) -> None:
        if self.sigma2 < 0:
            raise ValueError("noise variance must be non-negative")
        if self.model is ChannelModel.AWGN and self.h != 1:
            raise ValueError("AWGN realizations have h = 1")


def calibrate_noise(ebn0_db: float, rate: float | KronConfig) -> float:
    """Per-sample complex noise variance for unit-energy symbols.

    ``rate`` is the bits per channel symbol used to define Eb; a ``KronConfig``
    stands for its :func:`~kronrod.codec.bit_rate`.
    """
    if isinstance(rate, KronConfig):
        rate = bit_rate(rate)
    if rate <= 0:
        raise ConfigError("bit rate must be positive to calibrate Eb/N0")
    return 1.0 / (rate * 10.0 ** (ebn0_db / 10.0))


def complex_gaussian(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_channel(model: ChannelModel, rng: np.random.Generator, size: int | None = None):
    """One block-fading coefficient (or ``size`` of them); AWGN gives ones."""
    model = ChannelModel(model)
    if model is ChannelModel.AWGN:
        return 1.0 + 0j if size is None else np.ones(size, dtype=np.complex128)
    h = complex_gaussian(rng, 1 if size is None else size)
    return complex(h[0]) if size is None else h


def transmit(x: np.ndarray, realization: ChannelRealization, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    return realization.h * x + complex_gaussian(rng, x.shape, realization.sigma2)


def matched_filter(y: np.ndarray, h) -> np.ndarray:
    """``conj(h) * y``; ``h`` may be a scalar or one coefficient per row of ``y``."""
    h = np.asarray(h)
    y = np.asarray(y)
    if h.ndim == 1 and y.ndim == 2:
        h = h[:, None]
    return np.conj(h) * y
