"""Simulation configuration: a flat JSON key/value document, plus named presets.

Recognised keys (dotted names are literal keys, not nesting)::

    preset                  name of a preset to start from; other keys override it
    name                    label written to the sweep metadata
    pipeline                "kron_rod" | "viterbi_hard" | "viterbi_soft" | "normal_approx"
    scheme                  1 | 2                       (kron_rod)
    M                       base cardinality            (scheme 1; optional upper bound for scheme 2)
    factors                 list of M_p                 (scheme 2)
    lengths                 list of L_n                 (kron_rod)
    assignments             per-branch set: index into the scheme's sets, or "psk:<M>"
    pilot                   bool, default true
    channel                 "awgn" | "rayleigh"
    seed                    master seed (int)
    ebn0_grid_db            list of Eb/N0 values in dB
    min_bit_errors          stop once this many bit errors are seen (default 200)
    max_bits                hard cap on payload bits per point (default 10**7)
    workers                 process count (default 1)
    batch_size              blocks per random-stream batch (default 1024)
    rate_convention         "bit_rate" | "nominal" bits/symbol used to define Eb
    noise_override          fixed noise variance, ignores the Eb/N0 value
    timing                  bool; record wall time in the CSV (breaks byte-reproducibility)
    tpmd.max_iters, tpmd.tol, tpmd.init ("random" | "ones"), tpmd.stall_reinit
    viterbi.block_symbols   channel symbols per coded block (default 16)
    viterbi.modulation_order  PSK order carrying the coded bits (default 4)
    viterbi.traceback_depth   null for full-block traceback
    normal_approx.blocklength, normal_approx.rate, normal_approx.ber_proxy
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .baselines.convolutional import ConvCode
from .channel import ChannelModel
from .codec import KronConfig
from .constellation import ConstellationSet, Scheme, make_psk, scheme1_sets, scheme2_sets
from .detector import InitMode, TpmdSettings
from .errors import ConfigError


class Pipeline(enum.Enum):
    KRON_ROD = "kron_rod"
    VITERBI_HARD = "viterbi_hard"
    VITERBI_SOFT = "viterbi_soft"
    NORMAL_APPROX = "normal_approx"


class RateConvention(enum.Enum):
    BIT_RATE = "bit_rate"
    NOMINAL = "nominal"


@dataclass(frozen=True)
class ViterbiSetup:
    block_symbols: int = 16
    modulation_order: int = 4
    code: ConvCode = field(default_factory=ConvCode)

    def __post_init__(self) -> None:
        coded = self.block_symbols * self.constellation.bits_per_symbol
        if coded % 2 or coded // 2 <= ConvCode().constraint_length - 1:
            raise ConfigError("block too short for a terminated rate-1/2 codeword")

    @property
    def constellation(self) -> ConstellationSet:
        return make_psk(self.modulation_order)

    @property
    def coded_bits(self) -> int:
        return self.block_symbols * self.constellation.bits_per_symbol

    @property
    def message_bits(self) -> int:
        return self.coded_bits // 2 - (self.code.constraint_length - 1)


@dataclass(frozen=True)
class NormalApproxSetup:
    blocklength: int = 16
    rate: float = 1.0
    ber_proxy: bool = False


@dataclass(frozen=True)
class SimConfig:
    pipeline: Pipeline
    ebn0_grid_db: tuple[float, ...]
    kron: KronConfig | None = None
    channel: ChannelModel = ChannelModel.AWGN
    master_seed: int = 0
    min_bit_errors: int = 200
    max_bits: int = 10**7
    workers: int = 1
    batch_size: int = 1024
    rate_convention: RateConvention = RateConvention.BIT_RATE
    noise_override: float | None = None
    timing: bool = False
    tpmd: TpmdSettings = field(default_factory=TpmdSettings)
    viterbi: ViterbiSetup = field(default_factory=ViterbiSetup)
    normal_approx: NormalApproxSetup = field(default_factory=NormalApproxSetup)
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.ebn0_grid_db) == 0:
            raise ConfigError("Eb/N0 grid is empty")
        if self.min_bit_errors < 1:
            raise ConfigError("min_bit_errors must be >= 1")
        if self.max_bits < 1 or self.batch_size < 1 or self.workers < 1:
            raise ConfigError("max_bits, batch_size and workers must be positive")
        if self.pipeline is Pipeline.KRON_ROD and self.kron is None:
            raise ConfigError("pipeline kron_rod needs a Kronecker code description")
        if self.noise_override is not None and self.noise_override < 0:
            raise ConfigError("noise_override must be non-negative")


KNOWN_KEYS = frozenset(
    {
        "preset", "name", "pipeline", "scheme", "M", "factors", "lengths", "assignments",
        "pilot", "channel", "seed", "ebn0_grid_db", "min_bit_errors", "max_bits", "workers",
        "batch_size", "rate_convention", "noise_override", "timing",
        "tpmd.max_iters", "tpmd.tol", "tpmd.init", "tpmd.stall_reinit",
        "viterbi.block_symbols", "viterbi.modulation_order", "viterbi.traceback_depth",
        "normal_approx.blocklength", "normal_approx.rate", "normal_approx.ber_proxy",
    }
)


def _enum(kind, value, key):
    try:
        return kind(value)
    except ValueError:
        allowed = ", ".join(repr(k.value) for k in kind)
        raise ConfigError(f"{key}: {value!r} is not one of {allowed}") from None


def _factor_sets(raw: Mapping[str, Any]) -> tuple[Scheme, list[ConstellationSet]]:
    scheme = _enum(Scheme, int(raw.get("scheme", 2)), "scheme")
    try:
        if scheme is Scheme.SCHEME1:
            if "M" not in raw:
                raise ConfigError("scheme 1 needs M")
            return scheme, scheme1_sets(int(raw["M"]))
        factors = raw.get("factors")
        if not factors:
            raise ConfigError("scheme 2 needs factors")
        if "M" in raw and any(int(f) > int(raw["M"]) for f in factors):
            raise ConfigError("scheme 2 factor cardinalities must not exceed M")
        return scheme, scheme2_sets([int(f) for f in factors])
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def default_assignments(scheme: Scheme, n_sets: int, n_branches: int) -> list[int]:
    """Branch-to-set indices when none are given.

    Extra branches reuse set 0 ahead of the remaining sets (the (5,3) row of the
    8-PSK example: Phi0, Phi0, Phi0, Phi1, Phi2).  A single Scheme 2 factor is
    reused by every branch.
    """
    if n_sets == 1:
        return [0] * n_branches
    if n_branches < n_sets:
        raise ConfigError(f"{n_branches} branches cannot carry {n_sets} factor sets; give assignments")
    return [0] * (n_branches - n_sets + 1) + list(range(1, n_sets))


def _kron_from_raw(raw: Mapping[str, Any]) -> KronConfig:
    if "lengths" not in raw:
        raise ConfigError("kron_rod needs lengths")
    lengths = [int(x) for x in raw["lengths"]]
    scheme, sets = _factor_sets(raw)
    spec = raw.get("assignments")
    if spec is None:
        spec = default_assignments(scheme, len(sets), len(lengths))
    assigned = []
    for item in spec:
        if isinstance(item, str) and item.startswith("psk:"):
            try:
                assigned.append(make_psk(int(item[4:])))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        elif isinstance(item, int) and 0 <= item < len(sets):
            assigned.append(sets[item])
        else:
            raise ConfigError(f"bad assignment {item!r}: use a set index < {len(sets)} or 'psk:<M>'")
    return KronConfig(tuple(lengths), tuple(assigned), bool(raw.get("pilot", True)), scheme)


def resolve_raw(raw: Mapping[str, Any]) -> dict[str, Any]:
    """Apply a ``preset`` key (if any) and reject unknown keys."""
    from .presets import PRESETS

    unknown = sorted(set(raw) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    merged: dict[str, Any] = {}
    if "preset" in raw:
        if raw["preset"] not in PRESETS:
            raise ConfigError(f"unknown preset {raw['preset']!r}")
        merged.update(PRESETS[raw["preset"]])
        merged.setdefault("name", raw["preset"])
    merged.update({k: v for k, v in raw.items() if k != "preset"})
    return merged


def config_from_dict(raw: Mapping[str, Any]) -> SimConfig:
    raw = resolve_raw(raw)
    if "pipeline" not in raw:
        raise ConfigError("missing key: pipeline")
    pipeline = _enum(Pipeline, raw["pipeline"], "pipeline")
    if "ebn0_grid_db" not in raw:
        raise ConfigError("missing key: ebn0_grid_db")
    try:
        tpmd = TpmdSettings(
            max_iters=int(raw.get("tpmd.max_iters", 30)),
            tol=float(raw.get("tpmd.tol", 1e-6)),
            init=_enum(InitMode, raw.get("tpmd.init", "random"), "tpmd.init"),
            stall_reinit=bool(raw.get("tpmd.stall_reinit", True)),
        )
        viterbi = ViterbiSetup(
            block_symbols=int(raw.get("viterbi.block_symbols", 16)),
            modulation_order=int(raw.get("viterbi.modulation_order", 4)),
            code=ConvCode(traceback_depth=raw.get("viterbi.traceback_depth")),
        )
        na = NormalApproxSetup(
            blocklength=int(raw.get("normal_approx.blocklength", 16)),
            rate=float(raw.get("normal_approx.rate", 1.0)),
            ber_proxy=bool(raw.get("normal_approx.ber_proxy", False)),
        )
        kron = _kron_from_raw(raw) if pipeline is Pipeline.KRON_ROD else None
        noise = raw.get("noise_override")
        return SimConfig(
            pipeline=pipeline,
            ebn0_grid_db=tuple(float(x) for x in raw["ebn0_grid_db"]),
            kron=kron,
            channel=_enum(ChannelModel, raw.get("channel", "awgn"), "channel"),
            master_seed=int(raw.get("seed", 0)),
            min_bit_errors=int(raw.get("min_bit_errors", 200)),
            max_bits=int(raw.get("max_bits", 10**7)),
            workers=int(raw.get("workers", 1)),
            batch_size=int(raw.get("batch_size", 1024)),
            rate_convention=_enum(RateConvention, raw.get("rate_convention", "bit_rate"), "rate_convention"),
            noise_override=None if noise is None else float(noise),
            timing=bool(raw.get("timing", False)),
            tpmd=tpmd,
            viterbi=viterbi,
            normal_approx=na,
            name=str(raw.get("name", "")),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> SimConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(raw)


def preset_config(name: str, **overrides: Any) -> SimConfig:
    return config_from_dict({"preset": name, **overrides})
