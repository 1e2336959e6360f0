"""Kronecker rank-one detector (Kronecker-RoD).

The matched-filtered block is reshaped into an N-way tensor.  Each mode n has
its own Gramian ``A_n = Y_(n) Y_(n)^H``, which for a Kronecker-coded block is
rank one plus noise with range spanned by ``s_n``.  A power iteration on each
Gramian extracts that direction.  The branches never exchange iterates (this
is not an alternating HOPM), so they can run in parallel.

The direction comes back with an unknown complex scale.  Dividing by the ratio
of its pilot entry to the known pilot symbol fixes both modulus and phase,
after which every entry is sliced to the nearest alphabet point.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import complex_gaussian
from .codec import KronConfig
from .constellation import ConstellationSet
from .errors import DegenerateInputError, PilotErasureError
from .tensor import DenseTensor, batch_mode_gramians, batch_tensorize, kron_vec, tensorize

log = logging.getLogger(__name__)

PILOT_EPS = 1e-9


class InitMode(enum.Enum):
    RANDOM_ALPHABET = "random"
    ALL_ONES = "ones"


@dataclass(frozen=True)
class TpmdSettings:
    """Power-iteration controls.

    ``tol`` bounds ``||u_j - u_{j-1}||^2 / ||u_j||^2`` on unit-norm iterates.
    With ``stall_reinit`` a branch whose error is still above ``sqrt(tol)`` at
    iteration ``ceil(max_iters / 2)`` restarts once from a random vector.
    """

    max_iters: int = 30
    tol: float = 1e-6
    init: InitMode = InitMode.RANDOM_ALPHABET
    stall_reinit: bool = True

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        object.__setattr__(self, "init", InitMode(self.init))


@dataclass(frozen=True, eq=False)
class BranchResult:
    u: np.ndarray
    beta: complex
    s_hat: np.ndarray
    s_sliced: np.ndarray
    indices: np.ndarray
    iters_used: int
    converged: bool
    erased: bool = False


@dataclass(frozen=True, eq=False)
class BatchDetection:
    """Detector output for a stack of B blocks."""

    indices: list[np.ndarray]  # per branch, (B, L_n) sliced point indices
    iters: np.ndarray  # (B, N)
    converged: np.ndarray  # (B, N)
    erased: np.ndarray  # (B,) any branch lost its pilot


def _normalize_rows(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(v, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return v / safe[:, None], norms


def power_iterate(
    gram: np.ndarray,
    init: np.ndarray,
    settings: TpmdSettings,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Normalised power iteration on a (B, L, L) stack of Hermitian PSD matrices.

    Returns unit-norm iterates ``(B, L)``, iterations used, a converged mask and
    a degenerate mask (all-zero matrices, left untouched).
    """
    gram = np.asarray(gram, dtype=np.complex128)
    batch, size, _ = gram.shape
    degenerate = ~np.any(gram != 0, axis=(1, 2))
    u, init_norms = _normalize_rows(np.asarray(init, dtype=np.complex128).copy())
    if np.any(init_norms == 0):
        raise ValueError("power iteration needs a nonzero initial vector")
    iters = np.zeros(batch, dtype=np.int64)
    converged = np.zeros(batch, dtype=bool)
    restarted = np.zeros(batch, dtype=bool)
    active = np.flatnonzero(~degenerate)
    halfway = math.ceil(settings.max_iters / 2)
    stall_level = math.sqrt(settings.tol)

    for j in range(1, settings.max_iters + 1):
        if active.size == 0:
            break
        v = np.einsum("bij,bj->bi", gram[active], u[active])
        v, norms = _normalize_rows(v)
        lost = norms == 0
        if np.any(lost):
            # iterate fell into the null space; restart those rows
            v[lost] = _normalize_rows(complex_gaussian(rng, (int(lost.sum()), size)))[0]
        err = np.sum(np.abs(v - u[active]) ** 2, axis=1)
        err[lost] = np.inf
        u[active] = v
        iters[active] = j
        done = err <= settings.tol
        converged[active[done]] = True
        if settings.stall_reinit and j == halfway and j < settings.max_iters:
            stalled = ~done & (err > stall_level) & ~restarted[active]
            rows = active[stalled]
            if rows.size:
                log.debug("restarting %d stalled power iterations", rows.size)
                u[rows] = _normalize_rows(complex_gaussian(rng, (rows.size, size)))[0]
                restarted[rows] = True
        active = active[~done]
    return u, iters, converged, degenerate


def tpmd_branch(
    gram: np.ndarray,
    settings: TpmdSettings,
    init: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int, bool]:
    """Dominant direction of one Hermitian PSD Gramian by power iteration."""
    gram = np.asarray(gram, dtype=np.complex128)
    if not np.any(gram):
        raise DegenerateInputError("Gramian is identically zero")
    u, iters, conv, _ = power_iterate(gram[None], np.asarray(init)[None], settings, rng)
    return u[0], int(iters[0]), bool(conv[0])


def resolve_scale(u: np.ndarray, cset: ConstellationSet) -> tuple[complex, np.ndarray]:
    """Scale ``u`` so that its pilot entry equals the alphabet's first point."""
    u = np.asarray(u, dtype=np.complex128)
    if abs(u[0]) < PILOT_EPS:
        raise PilotErasureError("pilot entry of the branch estimate is zero")
    beta = complex(u[0] / cset.first_point)
    s_hat = u / beta
    s_hat[0] = cset.first_point
    return beta, s_hat


def slice_indices(s_hat: np.ndarray, cset: ConstellationSet) -> np.ndarray:
    """Nearest-point indices; ties go to the lowest index."""
    s_hat = np.asarray(s_hat)
    return np.argmin(np.abs(s_hat[..., None] - cset.points), axis=-1)


def slice_symbols(s_hat: np.ndarray, cset: ConstellationSet) -> np.ndarray:
    return cset.points[slice_indices(s_hat, cset)]


def _initial_vectors(cset: ConstellationSet, shape, mode: InitMode, rng) -> np.ndarray:
    if mode is InitMode.ALL_ONES:
        return np.ones(shape, dtype=np.complex128)
    return cset.points[rng.integers(0, cset.cardinality, size=shape)]


def _branch_batch(gram, cset, settings, rng):
    batch, size, _ = gram.shape
    init = _initial_vectors(cset, (batch, size), settings.init, rng)
    u, iters, conv, degenerate = power_iterate(gram, init, settings, rng)
    pilot = u[:, 0]
    erased = degenerate | (np.abs(pilot) < PILOT_EPS)
    beta = np.where(erased, 1.0, pilot / cset.first_point)
    s_hat = u / beta[:, None]
    s_hat[:, 0] = cset.first_point
    idx = slice_indices(s_hat, cset)
    idx[erased] = 0
    return u, beta, s_hat, idx, iters, conv, erased


def detect_batch(
    yhat: np.ndarray,
    cfg: KronConfig,
    settings: TpmdSettings,
    rng: np.random.Generator,
) -> BatchDetection:
    """Run every TPMD branch on a (B, L) stack of matched-filtered blocks."""
    yhat = np.asarray(yhat, dtype=np.complex128)
    if yhat.ndim != 2 or yhat.shape[1] != cfg.block_length:
        raise ValueError(f"expected blocks of length {cfg.block_length}, got {yhat.shape}")
    tensors = batch_tensorize(yhat, cfg.lengths)
    branch_rngs = rng.spawn(cfg.n_branches)
    indices, iters, conv = [], [], []
    erased = np.zeros(yhat.shape[0], dtype=bool)
    for n, cset in enumerate(cfg.assignments):
        gram = batch_mode_gramians(tensors, n)
        _, _, _, idx, it, cv, er = _branch_batch(gram, cset, settings, branch_rngs[n])
        indices.append(idx)
        iters.append(it)
        conv.append(cv)
        erased |= er
    return BatchDetection(indices, np.stack(iters, 1), np.stack(conv, 1), erased)


def detect(
    yhat: np.ndarray,
    cfg: KronConfig,
    settings: TpmdSettings,
    rng: np.random.Generator,
) -> list[BranchResult]:
    """Detect the N branch vectors of one matched-filtered block.

    A branch whose pilot entry vanishes is returned with ``erased=True``
    instead of raising, so a single bad branch never aborts the block.
    """
    yhat = np.asarray(yhat, dtype=np.complex128).reshape(1, -1)
    if yhat.shape[1] != cfg.block_length:
        raise ValueError(f"expected a block of length {cfg.block_length}, got {yhat.shape[1]}")
    tensors = batch_tensorize(yhat, cfg.lengths)
    branch_rngs = rng.spawn(cfg.n_branches)
    results = []
    for n, cset in enumerate(cfg.assignments):
        gram = batch_mode_gramians(tensors, n)
        u, beta, s_hat, idx, it, cv, er = _branch_batch(gram, cset, settings, branch_rngs[n])
        results.append(
            BranchResult(
                u=u[0],
                beta=complex(beta[0]) if not er[0] else complex("nan"),
                s_hat=s_hat[0],
                s_sliced=cset.points[idx[0]],
                indices=idx[0],
                iters_used=int(it[0]),
                converged=bool(cv[0]),
                erased=bool(er[0]),
            )
        )
    return results


def rayleigh_quotient(t: DenseTensor, vectors: Sequence[np.ndarray]) -> float:
    """``|<s_N kron ... kron s_1, vec(t)>| / prod ||s_n||`` (Hermitian inner product)."""
    x = kron_vec(list(vectors)[::-1])
    denom = float(np.prod([np.linalg.norm(v) for v in vectors]))
    return float(abs(np.vdot(x, t.data)) / denom)


def flops_estimate(lengths: KronConfig | Sequence[int], settings: TpmdSettings | int) -> int:
    """Real-flop count of the Gramian-vector products over all branches.

    For equal lengths ``l`` this is ``8 N J l**N``; otherwise each branch
    contributes ``8 J L_n prod_{i != n} L_i``, which coincides with the
    uniform formula whenever it applies.
    """
    if isinstance(lengths, KronConfig):
        lengths = lengths.lengths
    lengths = [int(x) for x in lengths]
    j = settings.max_iters if isinstance(settings, TpmdSettings) else int(settings)
    total = int(np.prod(lengths))
    if len(set(lengths)) > 1:
        log.info("non-uniform branch lengths: using the per-branch generalised count")
    return 8 * j * sum(ln * (total // ln) for ln in lengths)


def tensorize_block(yhat: np.ndarray, cfg: KronConfig) -> DenseTensor:
    return tensorize(yhat, cfg.lengths)
