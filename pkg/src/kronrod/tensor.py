"""Dense N-way complex tensors with first-index-fastest storage.

With this layout ``vec(s_1 o s_2 o ... o s_N) == kron(s_N, ..., s_1)``, so a
Kronecker-coded block reshapes into a rank-one tensor without permutation.
Mode indices are zero-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class DenseTensor:
    shape: tuple[int, ...]
    data: np.ndarray  # flat, first index fastest

    def __post_init__(self) -> None:
        shape = tuple(int(d) for d in self.shape)
        if len(shape) < 1 or any(d < 1 for d in shape):
            raise ValueError(f"invalid tensor shape {shape}")
        data = np.array(self.data, dtype=np.complex128).reshape(-1)
        if data.size != int(np.prod(shape)):
            raise ValueError(f"data length {data.size} does not match shape {shape}")
        data.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "data", data)

    @property
    def order(self) -> int:
        return len(self.shape)

    @property
    def array(self) -> np.ndarray:
        """N-dimensional read-only view indexed as ``t[l_1, ..., l_N]``."""
        return self.data.reshape(self.shape, order="F")

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "DenseTensor":
        arr = np.asarray(arr)
        return cls(arr.shape, arr.reshape(-1, order="F"))

    def __getitem__(self, idx):
        return self.array[idx]

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.data))


def kron_vec(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of vectors in the order given."""
    if len(vectors) == 0:
        raise ValueError("kron_vec needs at least one vector")
    return reduce(np.kron, [np.asarray(v, dtype=np.complex128).reshape(-1) for v in vectors])


def tensorize(v: np.ndarray, shape: Sequence[int]) -> DenseTensor:
    v = np.asarray(v).reshape(-1)
    if v.size != int(np.prod(shape)):
        raise ValueError(f"vector of length {v.size} cannot be tensorized to {tuple(shape)}")
    return DenseTensor(tuple(shape), v)


def vectorize(t: DenseTensor) -> np.ndarray:
    return np.array(t.data)


def outer_rank_one(vectors: Sequence[np.ndarray]) -> DenseTensor:
    if len(vectors) == 0:
        raise ValueError("outer_rank_one needs at least one vector")
    arr = reduce(np.multiply.outer, [np.asarray(v, dtype=np.complex128).reshape(-1) for v in vectors])
    return DenseTensor.from_array(np.asarray(arr))


def _check_mode(t: DenseTensor, n: int) -> None:
    if not 0 <= n < t.order:
        raise IndexError(f"mode {n} out of range for order-{t.order} tensor")


def unfold(t: DenseTensor, n: int) -> np.ndarray:
    """Mode-n matricization, ``L_n`` rows, remaining modes lowest-fastest in columns."""
    _check_mode(t, n)
    return np.moveaxis(t.array, n, 0).reshape(t.shape[n], -1, order="F")


def fold(mat: np.ndarray, n: int, shape: Sequence[int]) -> DenseTensor:
    """Inverse of :func:`unfold`."""
    shape = tuple(shape)
    moved = (shape[n],) + shape[:n] + shape[n + 1 :]
    arr = np.asarray(mat).reshape(moved, order="F")
    return DenseTensor.from_array(np.moveaxis(arr, 0, n))


def mode_gramian(t: DenseTensor, n: int) -> np.ndarray:
    """``Y_(n) @ Y_(n)^H`` for mode ``n``; independent of the column order."""
    y = unfold(t, n)
    return y @ y.conj().T


def batch_tensorize(blocks: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    """Reshape a (B, L) stack of vectors into (B, L_1, ..., L_N) tensors."""
    shape = tuple(int(d) for d in shape)
    blocks = np.asarray(blocks)
    b = blocks.shape[0]
    # C-order reshape over reversed dims gives first-index-fastest per block
    arr = blocks.reshape((b,) + shape[::-1])
    return arr.transpose((0,) + tuple(range(len(shape), 0, -1)))


def batch_mode_gramians(tensors: np.ndarray, n: int) -> np.ndarray:
    """Mode-n Gramians of a (B, L_1, ..., L_N) stack, shape (B, L_n, L_n)."""
    b = tensors.shape[0]
    y = np.moveaxis(tensors, n + 1, 1).reshape(b, tensors.shape[n + 1], -1)
    return y @ y.conj().transpose(0, 2, 1)
