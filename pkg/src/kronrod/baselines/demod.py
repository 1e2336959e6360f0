"""PSK demodulation with genie channel knowledge, hard bits or exact LLRs."""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from ..constellation import ConstellationSet


def _prepare(y, h):
    y = np.asarray(y, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim == 1 and y.ndim == 2:
        h = h[:, None]
    return np.conj(h) * y, np.abs(h) ** 2


def psk_hard_demod(y, h, cset: ConstellationSet) -> np.ndarray:
    """Nearest-point decision after matched filtering; bits per row, MSB first."""
    yhat, gain = _prepare(y, h)
    d = np.abs(yhat[..., None] - gain[..., None] * cset.points)
    idx = np.argmin(d, axis=-1)
    bits = cset.label_array[idx]
    return bits.reshape(*idx.shape[:-1], -1)


def psk_soft_demod(y, h, sigma2: float, cset: ConstellationSet) -> np.ndarray:
    """Full-sum LLRs ``log P(b=0 | y) / P(b=1 | y)`` for every labelled bit.

    After matched filtering ``yhat = |h|^2 x + conj(h) n`` with noise variance
    ``|h|^2 sigma2``, so each point contributes
    ``-|yhat - |h|^2 p|^2 / (|h|^2 sigma2)`` to the log-likelihood.
    """
    yhat, gain = _prepare(y, h)
    loglik = -np.abs(yhat[..., None] - gain[..., None] * cset.points) ** 2 / (
        gain[..., None] * sigma2
    )
    labels = cset.label_array  # (M, k)
    llrs = []
    for k in range(cset.bits_per_symbol):
        zero = labels[:, k] == 0
        llrs.append(logsumexp(loglik[..., zero], axis=-1) - logsumexp(loglik[..., ~zero], axis=-1))
    out = np.stack(llrs, axis=-1)
    return out.reshape(*out.shape[:-2], -1)
