"""Constant-modulus PSK factor sets and their Kronecker expansion.

A Kronecker-structured constellation writes an M-PSK alphabet as the set of
all products ``a_0 * a_1 * ... * a_{P-1}`` with ``a_p`` drawn from smaller
factor sets.  Two families of factor sets are supported:

* Scheme 1: a BPSK basis followed by binary sets ``{1, exp(j(pi + pi/2**p))}``.
* Scheme 2: ordinary unrotated ``M_p``-PSK sets with ``M_p <= M``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .errors import InvalidCardinalityError

MODULUS_TOL = 1e-12
MERGE_TOL = 1e-9


class Scheme(enum.Enum):
    SCHEME1 = 1
    SCHEME2 = 2


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def gray_code(m: int) -> int:
    return m ^ (m >> 1)


def _bits_of(value: int, width: int) -> tuple[int, ...]:
    return tuple((value >> (width - 1 - k)) & 1 for k in range(width))


@dataclass(frozen=True, eq=False)
class ConstellationSet:
    """An ordered unit-modulus alphabet with a bit label per point.

    ``labels[i]`` is the bit tuple (MSB first) carried by ``points[i]``.
    Instances are validated on construction and never mutated afterwards.
    """

    points: np.ndarray
    labels: tuple[tuple[int, ...], ...]
    name: str = ""
    _label_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=np.complex128).reshape(-1)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        m = pts.size
        if m < 2 or not _is_power_of_two(m):
            raise InvalidCardinalityError(f"cardinality must be a power of two >= 2, got {m}")
        if np.any(np.abs(np.abs(pts) - 1.0) >= MODULUS_TOL):
            raise ValueError("constellation points must have unit modulus")
        dist = np.abs(pts[:, None] - pts[None, :]) + np.eye(m) * 10.0
        if dist.min() < MERGE_TOL:
            raise ValueError("constellation points must be pairwise distinct")
        labels = tuple(tuple(int(b) for b in lab) for lab in self.labels)
        width = self.bits_per_symbol
        if len(labels) != m or any(len(lab) != width for lab in labels):
            raise ValueError(f"need {m} labels of {width} bits")
        if len(set(labels)) != m or any(b not in (0, 1) for lab in labels for b in lab):
            raise ValueError("bit labels must be a bijection onto {0,1}^k")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_label_index", {lab: i for i, lab in enumerate(labels)})

    @property
    def cardinality(self) -> int:
        return int(self.points.size)

    @property
    def bits_per_symbol(self) -> int:
        return int(self.points.size).bit_length() - 1

    @property
    def first_point(self) -> complex:
        return complex(self.points[0])

    @property
    def label_array(self) -> np.ndarray:
        """(M, k) uint8 array of labels, row i belonging to point i."""
        return np.array(self.labels, dtype=np.uint8).reshape(self.cardinality, -1)

    def index_of_label(self, bits: Sequence[int]) -> int:
        return self._label_index[tuple(int(b) for b in bits)]

    def index_of(self, symbol: complex, tol: float = MERGE_TOL) -> int:
        d = np.abs(self.points - symbol)
        i = int(np.argmin(d))
        if d[i] > tol:
            raise KeyError(symbol)
        return i

    def contains(self, symbol: complex, tol: float = MERGE_TOL) -> bool:
        return bool(np.min(np.abs(self.points - symbol)) <= tol)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "points": [[float(p.real), float(p.imag)] for p in self.points],
            "labels": ["".join(map(str, lab)) for lab in self.labels],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConstellationSet):
            return NotImplemented
        return (
            self.cardinality == other.cardinality
            and bool(np.allclose(self.points, other.points, atol=MERGE_TOL))
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((self.cardinality, self.labels))


def _check_cardinality(m: int) -> None:
    if not isinstance(m, (int, np.integer)) or m < 2 or not _is_power_of_two(int(m)):
        raise InvalidCardinalityError(f"M must be a power of two >= 2, got {m!r}")


def make_psk(m: int, rotation: float = 0.0) -> ConstellationSet:
    """Gray-labelled M-PSK, points in ascending phase starting at ``rotation``."""
    _check_cardinality(m)
    m = int(m)
    pts = np.exp(1j * (2 * np.pi * np.arange(m) / m + rotation))
    width = m.bit_length() - 1
    labels = tuple(_bits_of(gray_code(i), width) for i in range(m))
    return ConstellationSet(pts, labels, name=f"{m}-PSK")


def binary_set(second: complex, name: str = "") -> ConstellationSet:
    return ConstellationSet(np.array([1.0, second]), ((0,), (1,)), name=name)


def scheme1_sets(m: int) -> list[ConstellationSet]:
    """Binary factor sets whose Kronecker expansion is M-PSK.

    Set 0 is BPSK ``{1, -1}``; set ``p >= 1`` is ``{1, exp(j(pi + pi/2**p))}``.
    """
    _check_cardinality(m)
    n_sets = int(m).bit_length() - 1
    sets = [binary_set(np.exp(1j * np.pi), name="Phi0")]
    for p in range(1, n_sets):
        sets.append(binary_set(np.exp(1j * (np.pi + np.pi / 2**p)), name=f"Phi{p}"))
    return sets


def scheme2_sets(cardinalities: Sequence[int]) -> list[ConstellationSet]:
    if len(cardinalities) == 0:
        raise ValueError("need at least one factor cardinality")
    return [make_psk(m, 0.0) for m in cardinalities]


def kron_expand(sets: Sequence[ConstellationSet]) -> ConstellationSet:
    """All products of one point per factor set, duplicates merged.

    The result is ordered by phase in ``[0, 2*pi)`` and Gray-labelled by
    position, so for a full M-PSK expansion it coincides with ``make_psk(M)``
    up to a rotation of the starting point.
    """
    if len(sets) == 0:
        raise ValueError("kron_expand needs at least one set")
    prods = np.array([1.0 + 0j])
    for s in sets:
        prods = np.multiply.outer(prods, s.points).reshape(-1)
    # renormalise to absorb rounding drift across long products
    prods = prods / np.abs(prods)
    unique: list[complex] = []
    for p in prods:
        if all(abs(p - q) >= MERGE_TOL for q in unique):
            unique.append(complex(p))
    phases = np.mod(np.angle(unique), 2 * np.pi)
    # phases within merge tolerance of 2*pi belong at 0
    phases[phases > 2 * np.pi - MERGE_TOL] = 0.0
    pts = np.array(unique)[np.argsort(phases, kind="stable")]
    m = pts.size
    if m == 1:
        raise InvalidCardinalityError("Kronecker expansion collapsed to a single point")
    if not _is_power_of_two(m):
        raise InvalidCardinalityError(f"Kronecker expansion has {m} points, not a power of two")
    width = m.bit_length() - 1
    labels = tuple(_bits_of(gray_code(i), width) for i in range(m))
    return ConstellationSet(pts, labels, name="kron(" + ",".join(s.name for s in sets) + ")")


def min_distance(cset: ConstellationSet) -> float:
    pts = cset.points
    if pts.size < 2:
        raise ValueError("minimum distance undefined for fewer than two points")
    d = np.abs(pts[:, None] - pts[None, :])
    return float(d[~np.eye(pts.size, dtype=bool)].min())


def q_function(x):
    """Gaussian tail probability ``Q(x) = erfc(x / sqrt(2)) / 2``."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def set_error_prob(cset: ConstellationSet, n0: float) -> float:
    """Bit error probability ``Q(d_min / sqrt(2 N0))`` of a binary factor set."""
    if cset.cardinality != 2:
        raise InvalidCardinalityError(
            "closed-form error probability is only defined for binary factor sets"
        )
    if n0 <= 0:
        raise ValueError("N0 must be positive")
    return q_function(min_distance(cset) / math.sqrt(2.0 * n0))


@dataclass(frozen=True)
class SchemeSpec:
    """Which factorisation to use: Scheme 1 with base M, or Scheme 2 with explicit M_p."""

    scheme: Scheme
    m: int
    factor_cardinalities: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        _check_cardinality(self.m)
        if self.scheme is Scheme.SCHEME2:
            if not self.factor_cardinalities:
                raise ValueError("Scheme 2 needs at least one factor cardinality")
            for mp in self.factor_cardinalities:
                _check_cardinality(mp)
                if mp > self.m:
                    raise ValueError(f"factor cardinality {mp} exceeds M={self.m}")
        elif self.factor_cardinalities:
            raise ValueError("Scheme 1 factor cardinalities are implied by M")

    def sets(self) -> list[ConstellationSet]:
        if self.scheme is Scheme.SCHEME1:
            return scheme1_sets(self.m)
        return scheme2_sets(self.factor_cardinalities)

    def describe(self) -> dict:
        """JSON-ready description of the factor sets and their expansion."""
        sets = self.sets()
        return {
            "scheme": self.scheme.value,
            "M": self.m,
            "factor_cardinalities": [s.cardinality for s in sets],
            "factors": [s.to_dict() for s in sets],
            "expanded": kron_expand(sets).to_dict(),
        }
