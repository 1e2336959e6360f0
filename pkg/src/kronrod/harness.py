"""Monte Carlo BER engine.

Blocks are simulated in fixed-size batches.  Batch ``b`` of grid point ``i``
draws everything from ``SeedSequence([master_seed, i, b])``, and batches are
folded into the running totals strictly in index order, stopping at the first
batch after which the stop rule holds.  Surplus batches computed by other
workers are discarded, so results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import norm

from .baselines.convolutional import conv_encode, viterbi_decode
from .baselines.demod import psk_hard_demod, psk_soft_demod
from .baselines.normal_approx import normal_approximation
from .channel import calibrate_noise, complex_gaussian, draw_channel, matched_filter
from .codec import (
    bit_rate,
    bits_to_indices,
    code_rate,
    effective_bit_rate,
    encode_batch,
    indices_to_bits,
    nominal_rate_exact,
    label_lookup,
    payload_bits_per_block,
)
from .config import Pipeline, RateConvention, SimConfig
from .detector import detect_batch, flops_estimate
from .errors import ConfigError, ExtrapolationError

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "ebn0_db", "ber", "bit_errors", "bits_sent", "block_errors", "blocks_sent",
    "ci_low", "ci_high", "mean_iters", "wall_s",
)
WILSON_Z = float(norm.ppf(0.975))


def wilson_interval(errors: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = errors / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return lo, hi


@dataclass
class BatchOutcome:
    bit_errors: int
    bits_sent: int
    block_errors: int
    blocks_sent: int
    erasures: int = 0
    iter_hist: np.ndarray | None = None


@dataclass
class BerStat:
    ebn0_db: float
    bits_sent: int = 0
    bit_errors: int = 0
    blocks_sent: int = 0
    block_errors: int = 0
    erasures: int = 0
    iter_hist: np.ndarray | None = None
    capped: bool = False
    analytic: bool = False
    ber_override: float | None = None
    wall_s: float | None = None

    @property
    def ber(self) -> float:
        if self.ber_override is not None:
            return self.ber_override
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    @property
    def ci(self) -> tuple[float, float]:
        if self.analytic:
            return self.ber, self.ber
        return wilson_interval(self.bit_errors, self.bits_sent)

    def _iter_values(self) -> np.ndarray:
        return np.arange(self.iter_hist.size)

    @property
    def mean_iters(self) -> float | None:
        if self.iter_hist is None or self.iter_hist.sum() == 0:
            return None
        return float(np.dot(self._iter_values(), self.iter_hist) / self.iter_hist.sum())

    @property
    def median_iters(self) -> float | None:
        if self.iter_hist is None or self.iter_hist.sum() == 0:
            return None
        cdf = np.cumsum(self.iter_hist)
        total = cdf[-1]
        lo = int(np.searchsorted(cdf, (total + 1) // 2))
        hi = int(np.searchsorted(cdf, total // 2 + 1))
        return (lo + hi) / 2

    @property
    def max_iters(self) -> int | None:
        if self.iter_hist is None or self.iter_hist.sum() == 0:
            return None
        return int(np.flatnonzero(self.iter_hist)[-1])

    def add(self, out: BatchOutcome) -> None:
        self.bits_sent += out.bits_sent
        self.bit_errors += out.bit_errors
        self.blocks_sent += out.blocks_sent
        self.block_errors += out.block_errors
        self.erasures += out.erasures
        if out.iter_hist is not None:
            self.iter_hist = out.iter_hist.copy() if self.iter_hist is None else self.iter_hist + out.iter_hist


def _batch_rng(cfg: SimConfig, point: int, batch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.master_seed, point, batch]))


def eb_rate(cfg: SimConfig) -> float:
    """Bits per channel symbol that define Eb for this pipeline."""
    if cfg.pipeline is Pipeline.KRON_ROD:
        if cfg.rate_convention is RateConvention.NOMINAL:
            return float(nominal_rate_exact(cfg.kron))
        return bit_rate(cfg.kron)
    if cfg.pipeline is Pipeline.NORMAL_APPROX:
        return cfg.normal_approx.rate
    # flush bits counted like data, mirroring how pilots count in bit_rate
    return cfg.viterbi.code.rate * cfg.viterbi.constellation.bits_per_symbol


def noise_variance(cfg: SimConfig, ebn0_db: float) -> float:
    if cfg.noise_override is not None:
        return cfg.noise_override
    return calibrate_noise(ebn0_db, eb_rate(cfg))


def _channel_pass(x: np.ndarray, cfg: SimConfig, sigma2: float, rng):
    batch = x.shape[0]
    h = draw_channel(cfg.channel, rng, size=batch)
    y = h[:, None] * x + complex_gaussian(rng, x.shape, sigma2)
    return y, h


def _kron_batch(cfg: SimConfig, sigma2: float, rng: np.random.Generator) -> BatchOutcome:
    kron = cfg.kron
    batch = cfg.batch_size
    bits = rng.integers(0, 2, size=(batch, payload_bits_per_block(kron)), dtype=np.int64)
    idx = bits_to_indices(bits, kron)
    x = encode_batch([cset.points[i] for cset, i in zip(kron.assignments, idx)])
    y, h = _channel_pass(x, cfg, sigma2, rng)
    det = detect_batch(matched_filter(y, h), kron, cfg.tpmd, rng)
    errs = indices_to_bits(det.indices, kron) != bits
    errs[det.erased] = True
    per_block = errs.sum(axis=1)
    hist = np.bincount(det.iters.reshape(-1), minlength=cfg.tpmd.max_iters + 1)
    return BatchOutcome(
        bit_errors=int(per_block.sum()),
        bits_sent=int(bits.size),
        block_errors=int(np.count_nonzero(per_block)),
        blocks_sent=batch,
        erasures=int(det.erased.sum()),
        iter_hist=hist,
    )


def _viterbi_batch(cfg: SimConfig, sigma2: float, rng: np.random.Generator) -> BatchOutcome:
    setup = cfg.viterbi
    cset = setup.constellation
    k = cset.bits_per_symbol
    batch = cfg.batch_size
    msg = rng.integers(0, 2, size=(batch, setup.message_bits), dtype=np.int64)
    coded = conv_encode(msg).astype(np.int64).reshape(batch, setup.block_symbols, k)
    values = coded @ (1 << np.arange(k - 1, -1, -1))
    x = cset.points[label_lookup(cset)[values]]
    y, h = _channel_pass(x, cfg, sigma2, rng)
    if cfg.pipeline is Pipeline.VITERBI_HARD:
        obs = psk_hard_demod(y, h, cset)
        decoded = viterbi_decode(obs, "hard", setup.code.traceback_depth)
    else:
        llr = psk_soft_demod(y, h, max(sigma2, 1e-300), cset)
        decoded = viterbi_decode(np.nan_to_num(llr, posinf=1e300, neginf=-1e300), "soft",
                                 setup.code.traceback_depth)
    per_block = (decoded != msg).sum(axis=1)
    return BatchOutcome(
        bit_errors=int(per_block.sum()),
        bits_sent=int(msg.size),
        block_errors=int(np.count_nonzero(per_block)),
        blocks_sent=batch,
    )


def simulate_batch(cfg: SimConfig, point: int, batch: int, ebn0_db: float) -> BatchOutcome:
    rng = _batch_rng(cfg, point, batch)
    sigma2 = noise_variance(cfg, ebn0_db)
    if cfg.pipeline is Pipeline.KRON_ROD:
        return _kron_batch(cfg, sigma2, rng)
    if cfg.pipeline in (Pipeline.VITERBI_HARD, Pipeline.VITERBI_SOFT):
        return _viterbi_batch(cfg, sigma2, rng)
    raise ConfigError(f"pipeline {cfg.pipeline.value} has no Monte Carlo batches")


def _analytic_point(cfg: SimConfig, ebn0_db: float) -> BerStat:
    na = cfg.normal_approx
    snr = na.rate * 10.0 ** (ebn0_db / 10.0)
    eps = normal_approximation(na.blocklength, na.rate, snr)
    if na.ber_proxy:
        eps *= 0.5  # heuristic: half the bits of a failed block are wrong
    return BerStat(ebn0_db=ebn0_db, analytic=True, ber_override=eps)


def _stop(stat: BerStat, cfg: SimConfig) -> bool:
    return stat.bit_errors >= cfg.min_bit_errors or stat.bits_sent >= cfg.max_bits


def run_point(
    cfg: SimConfig,
    ebn0_db: float,
    point: int = 0,
    executor: ProcessPoolExecutor | None = None,
) -> BerStat:
    """Simulate one Eb/N0 value until the stop rule fires."""
    if cfg.pipeline is Pipeline.KRON_ROD and cfg.kron is None:
        raise ConfigError("pipeline kron_rod needs a Kronecker code description")
    start = time.perf_counter()
    if cfg.pipeline is Pipeline.NORMAL_APPROX:
        stat = _analytic_point(cfg, ebn0_db)
    else:
        stat = BerStat(ebn0_db=ebn0_db)
        next_batch = 0
        wave = cfg.workers if executor is not None else 1
        while not _stop(stat, cfg):
            ids = range(next_batch, next_batch + wave)
            next_batch += wave
            if executor is None:
                outcomes = [simulate_batch(cfg, point, b, ebn0_db) for b in ids]
            else:
                outcomes = list(executor.map(simulate_batch, [cfg] * wave, [point] * wave,
                                             ids, [ebn0_db] * wave))
            for out in outcomes:
                stat.add(out)
                if _stop(stat, cfg):
                    break
        stat.capped = stat.bit_errors < cfg.min_bit_errors
        if stat.capped:
            log.warning("Eb/N0 %.2f dB: only %d bit errors within %d bits",
                        ebn0_db, stat.bit_errors, stat.bits_sent)
    if cfg.timing:
        stat.wall_s = time.perf_counter() - start
    log.info("Eb/N0 %.2f dB: ber=%.4g (%d/%d)", ebn0_db, stat.ber, stat.bit_errors, stat.bits_sent)
    return stat


def decoding_delay(cfg: SimConfig) -> int | None:
    """Symbols (Kronecker block) or bits (5K Viterbi rule) before a decision."""
    if cfg.pipeline is Pipeline.KRON_ROD:
        return cfg.kron.block_length
    if cfg.pipeline in (Pipeline.VITERBI_HARD, Pipeline.VITERBI_SOFT):
        return cfg.viterbi.code.decoding_delay
    return None


def sweep_metadata(cfg: SimConfig) -> dict:
    meta = {
        "name": cfg.name,
        "pipeline": cfg.pipeline.value,
        "channel": cfg.channel.value,
        "master_seed": cfg.master_seed,
        "eb_rate_bits_per_symbol": eb_rate(cfg),
        "decoding_delay": decoding_delay(cfg),
        "min_bit_errors": cfg.min_bit_errors,
        "max_bits": cfg.max_bits,
    }
    if cfg.pipeline is Pipeline.KRON_ROD:
        kron = cfg.kron
        meta.update(
            lengths=list(kron.lengths),
            assignments=[s.name for s in kron.assignments],
            pilot=kron.pilot_enabled,
            bit_rate=bit_rate(kron),
            effective_bit_rate=effective_bit_rate(kron),
            code_rate=code_rate(kron),
            rate_convention=cfg.rate_convention.value,
            predicted_flops_per_block=flops_estimate(kron, cfg.tpmd),
        )
    elif cfg.pipeline is not Pipeline.NORMAL_APPROX:
        v = cfg.viterbi
        meta.update(
            block_symbols=v.block_symbols,
            message_bits=v.message_bits,
            effective_code_rate=v.code.effective_rate(v.message_bits),
            traceback_depth=v.code.traceback_depth,
        )
    else:
        meta.update(blocklength=cfg.normal_approx.blocklength, rate=cfg.normal_approx.rate,
                    ber_proxy=cfg.normal_approx.ber_proxy)
    return meta


@dataclass
class SweepResult:
    stats: list[BerStat]
    metadata: dict = field(default_factory=dict)

    def curve(self) -> list[tuple[float, float]]:
        return [(s.ebn0_db, s.ber) for s in self.stats]

    def to_csv(self) -> str:
        return stats_to_csv(self.stats)


def run_sweep(cfg: SimConfig) -> SweepResult:
    if len(cfg.ebn0_grid_db) == 0:
        raise ConfigError("Eb/N0 grid is empty")
    meta = sweep_metadata(cfg)
    if cfg.workers > 1 and cfg.pipeline is not Pipeline.NORMAL_APPROX:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            stats = [run_point(cfg, e, i, pool) for i, e in enumerate(cfg.ebn0_grid_db)]
    else:
        stats = [run_point(cfg, e, i) for i, e in enumerate(cfg.ebn0_grid_db)]
    return SweepResult(stats, meta)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def stats_to_csv(stats: Sequence[BerStat]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in stats:
        lo, hi = s.ci
        writer.writerow([
            _fmt(s.ebn0_db), _fmt(s.ber), _fmt(s.bit_errors), _fmt(s.bits_sent),
            _fmt(s.block_errors), _fmt(s.blocks_sent), _fmt(lo), _fmt(hi),
            _fmt(s.mean_iters), _fmt(s.wall_s),
        ])
    return buf.getvalue()


def write_sweep(result: SweepResult, path: str | Path) -> None:
    """CSV to ``path`` plus a ``<path>.meta.json`` sidecar."""
    path = Path(path)
    path.write_text(result.to_csv())
    path.with_name(path.name + ".meta.json").write_text(json.dumps(result.metadata, indent=2, sort_keys=True) + "\n")


def read_curve(path: str | Path) -> list[tuple[float, float]]:
    with open(path, newline="") as fh:
        return [(float(r["ebn0_db"]), float(r["ber"])) for r in csv.DictReader(fh)]


def ebn0_at_ber(curve: Sequence[tuple[float, float]], target: float) -> float:
    """Eb/N0 where the curve first crosses ``target``, interpolating log10(BER) linearly."""
    pts = sorted((float(e), float(b)) for e, b in curve)
    for (e0, b0), (e1, b1) in zip(pts, pts[1:]):
        if b0 >= target >= b1 and b0 > 0 and b1 > 0:
            if b0 == b1:
                return e0
            frac = (math.log10(b0) - math.log10(target)) / (math.log10(b0) - math.log10(b1))
            return e0 + frac * (e1 - e0)
    raise ExtrapolationError(f"curve does not bracket BER {target:g}")


def gain_at_ber(curve_a, curve_b, target_ber: float) -> float:
    """Eb/N0 saving of curve A over curve B at ``target_ber`` (positive if A is better)."""
    return ebn0_at_ber(curve_b, target_ber) - ebn0_at_ber(curve_a, target_ber)


__all__ = [
    "BerStat",
    "CSV_COLUMNS",
    "SweepResult",
    "decoding_delay",
    "ebn0_at_ber",
    "eb_rate",
    "gain_at_ber",
    "read_curve",
    "run_point",
    "run_sweep",
    "simulate_batch",
    "stats_to_csv",
    "wilson_interval",
    "write_sweep",
]
