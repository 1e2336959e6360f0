"""Command-line entry point: ``kronrod <subcommand> ...``.

Set ``KRONROD_LOG_LEVEL`` (e.g. ``INFO``) to see progress logs.  Config errors
exit with status 2 and a single JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .baselines.normal_approx import normal_approximation
from .config import SimConfig, config_from_dict, load_config
from .constellation import Scheme, SchemeSpec
from .detector import flops_estimate
from .errors import ConfigError, KronRodError
from .harness import gain_at_ber, read_curve, run_sweep, write_sweep
from .presets import PRESETS


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _cmd_simulate(args) -> int:
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = config_from_dict({"preset": args.preset})
    else:
        raise ConfigError("simulate needs --config or --preset")
    if args.workers is not None:
        cfg = _replace(cfg, workers=args.workers)
    result = run_sweep(cfg)
    if args.out:
        write_sweep(result, args.out)
    else:
        sys.stdout.write(result.to_csv())
    return 0


def _replace(cfg: SimConfig, **kw) -> SimConfig:
    from dataclasses import replace

    return replace(cfg, **kw)


def _cmd_bound(args) -> int:
    try:
        rows = [(snr, normal_approximation(args.n, args.rate, snr)) for snr in _floats(args.snr_grid)]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print("snr,epsilon")
    for snr, eps in rows:
        print(f"{snr!r},{eps!r}")
    return 0


def _cmd_constellation(args) -> int:
    scheme = Scheme(args.scheme)
    try:
        spec = SchemeSpec(scheme, args.m, tuple(args.factors or ()))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    text = json.dumps(spec.describe(), indent=2)
    if args.dump:
        Path(args.dump).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_gain(args) -> int:
    gain = gain_at_ber(read_curve(args.a), read_curve(args.b), args.ber)
    print(f"{gain:.4f}")
    return 0


def _cmd_presets(args) -> int:
    for name in sorted(PRESETS):
        print(name)
    return 0


def _cmd_flops(args) -> int:
    print(flops_estimate(args.lengths, args.iters))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kronrod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a BER sweep and write CSV")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--preset", help="named preset (see `kronrod presets`)")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bound", help="normal-approximation block error probability")
    p.add_argument("--n", type=int, required=True, help="blocklength in channel uses")
    p.add_argument("--rate", type=float, required=True, help="bits per channel use")
    p.add_argument("--snr-grid", required=True, help="comma-separated linear SNR values")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("constellation", help="dump factor sets and their Kronecker expansion")
    p.add_argument("--scheme", type=int, choices=(1, 2), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--factors", type=int, nargs="+")
    p.add_argument("--dump", help="JSON output path (default: stdout)")
    p.set_defaults(func=_cmd_constellation)

    p = sub.add_parser("gain", help="Eb/N0 gain of curve A over curve B at a target BER")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--ber", type=float, required=True)
    p.set_defaults(func=_cmd_gain)

    p = sub.add_parser("presets", help="list preset names")
    p.set_defaults(func=_cmd_presets)

    p = sub.add_parser("flops", help="predicted detector flop count")
    p.add_argument("--lengths", type=int, nargs="+", required=True)
    p.add_argument("--iters", type=int, default=30)
    p.set_defaults(func=_cmd_flops)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("KRONROD_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except KronRodError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
