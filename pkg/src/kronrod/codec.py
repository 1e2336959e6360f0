"""Kronecker cross-coding of per-branch PSK symbol vectors.

A block carries N symbol vectors ``s_1..s_N`` (lengths ``L_n``) and transmits
``x = s_N kron ... kron s_1`` of length ``L = prod(L_n)``.  When pilots are
enabled, ``s_n[0]`` is fixed to the first point of the branch alphabet and
carries no data; the receiver uses it to resolve the per-branch scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .constellation import ConstellationSet, Scheme, kron_expand
from .errors import ConfigError, InvalidSymbolError
from .tensor import kron_vec


@dataclass(frozen=True)
class KronConfig:
    lengths: tuple[int, ...]
    assignments: tuple[ConstellationSet, ...]
    pilot_enabled: bool = True
    scheme: Scheme | None = None

    def __post_init__(self) -> None:
        lengths = tuple(int(x) for x in self.lengths)
        assignments = tuple(self.assignments)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "assignments", assignments)
        if len(lengths) < 2:
            raise ConfigError("a Kronecker code needs at least two branches")
        if len(assignments) != len(lengths):
            raise ConfigError(
                f"{len(lengths)} branch lengths but {len(assignments)} constellation assignments"
            )
        if any(x < 2 for x in lengths):
            raise ConfigError(f"every branch length must be >= 2, got {lengths}")

    @property
    def n_branches(self) -> int:
        return len(self.lengths)

    @property
    def block_length(self) -> int:
        return int(np.prod(self.lengths))

    @property
    def pilots_per_branch(self) -> int:
        return 1 if self.pilot_enabled else 0

    def branch_payload_bits(self, n: int) -> int:
        return (self.lengths[n] - self.pilots_per_branch) * self.assignments[n].bits_per_symbol

    def expanded_set(self) -> ConstellationSet:
        return kron_expand(self.assignments)


@dataclass(frozen=True, eq=False)
class SymbolBlock:
    branch_symbols: tuple[np.ndarray, ...]
    coded: np.ndarray | None = None


def payload_bits_per_block(cfg: KronConfig) -> int:
    return sum(cfg.branch_payload_bits(n) for n in range(cfg.n_branches))


def bit_rate_exact(cfg: KronConfig) -> Fraction:
    num = sum(l * s.bits_per_symbol for l, s in zip(cfg.lengths, cfg.assignments))
    return Fraction(num, cfg.block_length)


def bit_rate(cfg: KronConfig) -> float:
    """Bits per channel symbol, pilot positions counted as data."""
    return float(bit_rate_exact(cfg))


def effective_bit_rate(cfg: KronConfig) -> float:
    """Payload bits per channel symbol, pilot positions excluded."""
    return payload_bits_per_block(cfg) / cfg.block_length


def code_rate_exact(cfg: KronConfig) -> Fraction:
    return Fraction(sum(cfg.lengths), cfg.block_length)


def code_rate(cfg: KronConfig) -> float:
    return float(code_rate_exact(cfg))


def nominal_rate_exact(cfg: KronConfig) -> Fraction:
    """Code rate times bits per symbol of the expanded constellation.

    This is the "half-rate 4-PSK gives 1 bit/symbol" bookkeeping, which treats
    Scheme 1 and Scheme 2 codes over the same expanded M-PSK alike.
    """
    return code_rate_exact(cfg) * cfg.expanded_set().bits_per_symbol


def label_lookup(cset: ConstellationSet) -> np.ndarray:
    """Map integer label value -> point index."""
    k = cset.bits_per_symbol
    weights = 1 << np.arange(k - 1, -1, -1)
    values = cset.label_array.astype(np.int64) @ weights
    lut = np.empty(cset.cardinality, dtype=np.int64)
    lut[values] = np.arange(cset.cardinality)
    return lut


def bits_to_indices(bits: np.ndarray, cfg: KronConfig) -> list[np.ndarray]:
    """Split a (B, payload) bit array into per-branch (B, L_n) point indices."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 2 or bits.shape[1] != payload_bits_per_block(cfg):
        raise ValueError(
            f"expected {payload_bits_per_block(cfg)} bits per block, got shape {bits.shape}"
        )
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0 or 1")
    batch = bits.shape[0]
    out = []
    offset = 0
    for n, (length, cset) in enumerate(zip(cfg.lengths, cfg.assignments)):
        k = cset.bits_per_symbol
        nb = cfg.branch_payload_bits(n)
        grp = bits[:, offset : offset + nb].reshape(batch, -1, k)
        offset += nb
        values = grp @ (1 << np.arange(k - 1, -1, -1))
        idx = np.zeros((batch, length), dtype=np.int64)
        idx[:, cfg.pilots_per_branch :] = label_lookup(cset)[values]
        out.append(idx)
    return out


def indices_to_bits(indices: Sequence[np.ndarray], cfg: KronConfig) -> np.ndarray:
    """Inverse of :func:`bits_to_indices`; pilot positions are dropped."""
    parts = []
    for idx, cset in zip(indices, cfg.assignments):
        idx = np.asarray(idx)
        lab = cset.label_array[idx[:, cfg.pilots_per_branch :]]
        parts.append(lab.reshape(idx.shape[0], -1))
    return np.concatenate(parts, axis=1).astype(np.uint8)


def encode_batch(branch_symbols: Sequence[np.ndarray]) -> np.ndarray:
    """Row-wise ``s_N kron ... kron s_1`` for (B, L_n) branch stacks."""
    x = np.asarray(branch_symbols[0], dtype=np.complex128)
    batch = x.shape[0]
    for s in branch_symbols[1:]:
        # new factor varies slowest
        x = (np.asarray(s)[:, :, None] * x[:, None, :]).reshape(batch, -1)
    return x


def modulate_branches(bits: Sequence[int], cfg: KronConfig) -> SymbolBlock:
    bits = np.asarray(bits).reshape(1, -1)
    idx = bits_to_indices(bits, cfg)
    symbols = tuple(cset.points[i[0]] for cset, i in zip(cfg.assignments, idx))
    return SymbolBlock(symbols)


def encode(block: SymbolBlock) -> np.ndarray:
    return kron_vec(list(block.branch_symbols)[::-1])


def demap_branches(block: SymbolBlock, cfg: KronConfig) -> np.ndarray:
    indices = []
    for n, (s, cset) in enumerate(zip(block.branch_symbols, cfg.assignments)):
        s = np.asarray(s).reshape(-1)
        if s.size != cfg.lengths[n]:
            raise ValueError(f"branch {n} has {s.size} symbols, expected {cfg.lengths[n]}")
        d = np.abs(s[:, None] - cset.points[None, :])
        idx = np.argmin(d, axis=1)
        if np.any(d[np.arange(s.size), idx] > 1e-9):
            raise InvalidSymbolError(f"branch {n} holds symbols outside its alphabet; slice first")
        indices.append(idx[None, :])
    return indices_to_bits(indices, cfg)[0]
