"""Rate-1/2, K=3 convolutional code with octal generators (5, 7).

The shift register holds ``(b_t, b_{t-1}, b_{t-2})`` with the newest bit as
MSB; the state is ``(b_{t-1}, b_{t-2})``.  Every message is terminated with
two zero flush bits so the trellis ends in state 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

CONSTRAINT_LENGTH = 3
GENERATORS = (0o5, 0o7)
N_STATES = 1 << (CONSTRAINT_LENGTH - 1)
FLUSH_BITS = CONSTRAINT_LENGTH - 1


class DecisionMode(enum.Enum):
    HARD = "hard"
    SOFT = "soft"


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


def _build_trellis():
    next_state = np.zeros((N_STATES, 2), dtype=np.int64)
    outputs = np.zeros((N_STATES, 2, 2), dtype=np.int64)
    for s in range(N_STATES):
        for b in (0, 1):
            reg = (b << (CONSTRAINT_LENGTH - 1)) | s
            next_state[s, b] = reg >> 1
            outputs[s, b] = [_parity(reg & g) for g in GENERATORS]
    # every state has exactly two predecessors; the input bit is ns >> 1
    pred_state = np.zeros((N_STATES, 2), dtype=np.int64)
    for ns in range(N_STATES):
        low = (ns & 1) << 1
        pred_state[ns] = [low, low | 1]
    return next_state, outputs, pred_state


NEXT_STATE, OUTPUTS, PRED_STATE = _build_trellis()
PRED_INPUT = np.arange(N_STATES) >> 1


@dataclass(frozen=True)
class ConvCode:
    constraint_length: int = CONSTRAINT_LENGTH
    generators: tuple[int, int] = GENERATORS
    traceback_depth: int | None = None  # None: full-block traceback

    def __post_init__(self) -> None:
        if self.constraint_length != CONSTRAINT_LENGTH or tuple(self.generators) != GENERATORS:
            raise ValueError("only the K=3 (5,7) code is supported")
        if self.traceback_depth is not None and self.traceback_depth < 1:
            raise ValueError("traceback depth must be positive")

    @property
    def rate(self) -> float:
        return 0.5

    def coded_length(self, n_message: int) -> int:
        return 2 * (n_message + FLUSH_BITS)

    def effective_rate(self, n_message: int) -> float:
        """Message bits per coded bit once the flush bits are paid for."""
        return n_message / self.coded_length(n_message)

    @property
    def decoding_delay(self) -> int:
        return 5 * self.constraint_length


def conv_encode(bits) -> np.ndarray:
    """Encode one message (1-D) or a (B, n) stack; flush bits are appended."""
    bits = np.asarray(bits, dtype=np.int64)
    single = bits.ndim == 1
    bits = np.atleast_2d(bits)
    if bits.shape[1] == 0:
        raise ValueError("message must be nonempty")
    batch, n = bits.shape
    padded = np.concatenate([bits, np.zeros((batch, FLUSH_BITS), dtype=np.int64)], axis=1)
    state = np.zeros(batch, dtype=np.int64)
    out = np.empty((batch, n + FLUSH_BITS, 2), dtype=np.uint8)
    for t in range(n + FLUSH_BITS):
        b = padded[:, t]
        out[:, t] = OUTPUTS[state, b]
        state = NEXT_STATE[state, b]
    out = out.reshape(batch, -1)
    return out[0] if single else out


def branch_metric_table(obs: np.ndarray) -> np.ndarray:
    """Correlation metric of each (state, input) branch, shape (B, T, S, 2)."""
    pairs = obs.reshape(obs.shape[0], -1, 2)
    signs = 1 - 2 * OUTPUTS  # (S, 2, 2), +1 for coded bit 0
    return 0.5 * np.einsum("btk,sik->btsi", pairs, signs)


def _observations(obs, mode: DecisionMode) -> np.ndarray:
    obs = np.asarray(obs, dtype=np.float64)
    if mode is DecisionMode.HARD:
        if np.any((obs != 0) & (obs != 1)):
            raise ValueError("hard decoding expects 0/1 bit decisions")
        obs = 1.0 - 2.0 * obs
    return obs


def viterbi_decode(obs, mode: DecisionMode | str = DecisionMode.SOFT,
                   traceback_depth: int | None = None) -> np.ndarray:
    """Maximum-likelihood message for a terminated (5,7) codeword.

    ``obs`` holds bit decisions (hard) or LLRs ``log P(0)/P(1)`` (soft), either
    1-D or a (B, 2T) stack.  Both modes maximise the correlation
    ``sum(llr_i * (1 - 2 c_i))``; for hard input this equals minimising the
    Hamming distance.  ``traceback_depth`` decides bit t from the best state at
    time ``t + depth`` instead of waiting for the end of the block.
    """
    mode = DecisionMode(mode)
    raw = np.asarray(obs)
    single = raw.ndim == 1
    obs = np.atleast_2d(_observations(raw, mode))
    if obs.shape[1] % 2 != 0:
        raise ValueError("observation length must be a multiple of 2")
    batch, steps = obs.shape[0], obs.shape[1] // 2
    if steps <= FLUSH_BITS:
        raise ValueError("codeword too short to contain a message")
    bm = branch_metric_table(obs)

    metric = np.full((batch, N_STATES), -np.inf)
    metric[:, 0] = 0.0
    choice = np.empty((batch, steps, N_STATES), dtype=np.int8)
    history = np.empty((batch, steps, N_STATES))
    for t in range(steps):
        cand = metric[:, PRED_STATE] + bm[:, t][:, PRED_STATE, PRED_INPUT[:, None]]
        pick = np.argmax(cand, axis=2)  # ties -> lower predecessor
        choice[:, t] = pick
        metric = np.take_along_axis(cand, pick[:, :, None], axis=2)[:, :, 0]
        history[:, t] = metric

    rows = np.arange(batch)

    def trace(end_t: int, end_state: np.ndarray, stop_t: int) -> np.ndarray:
        state = end_state.copy()
        for t in range(end_t, stop_t, -1):
            state = PRED_STATE[state, choice[rows, t, state]]
        return state

    n_msg = steps - FLUSH_BITS
    decoded = np.empty((batch, n_msg), dtype=np.uint8)
    if traceback_depth is None:
        state = np.zeros(batch, dtype=np.int64)
        for t in range(steps - 1, -1, -1):
            if t < n_msg:
                decoded[:, t] = state >> 1
            state = PRED_STATE[state, choice[rows, t, state]]
    else:
        for t in range(n_msg):
            end_t = min(t + traceback_depth, steps - 1)
            if end_t == steps - 1:
                end_state = np.zeros(batch, dtype=np.int64)
            else:
                end_state = np.argmax(history[:, end_t], axis=1)
            state_after_t = trace(end_t, end_state, t)
            decoded[:, t] = state_after_t >> 1
    return decoded[0] if single else decoded


def path_metric(obs, message, mode: DecisionMode | str = DecisionMode.SOFT) -> np.ndarray:
    """Correlation metric of the codeword for ``message`` against ``obs``."""
    mode = DecisionMode(mode)
    o = np.atleast_2d(_observations(obs, mode))
    c = np.atleast_2d(conv_encode(message)).astype(np.float64)
    return 0.5 * np.sum(o * (1.0 - 2.0 * c), axis=1)
