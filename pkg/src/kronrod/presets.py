"""Named simulation presets.

Assumptions baked into these presets:

* Every Monte Carlo comparison curve uses a block of L = 16 channel symbols
  and 4-PSK, which gives 1 bit/symbol at half rate.  The (N, L_n) split per
  curve is our choice; only L, the modulation and the rate are pinned:
  TPMD-2 = (4, 4), TPMD-3 = (2, 2, 4), TPMD-4 = (2, 2, 2, 2).
* The Scheme 1 TPMD-4 curve uses the binary 4-PSK factor sets with branch
  assignment (Phi0, Phi0, Phi0, Phi1).  Its Eb/N0 axis uses the "nominal"
  rate (code rate times log2 of the expanded 4-PSK), i.e. the same 1
  bit/symbol as every other curve, so all curves at a given Eb/N0 see the
  same noise variance.  Under the information-rate convention Scheme 1
  carries 0.5 bit/symbol and would be evaluated at twice the noise variance.
* Viterbi baselines send 16 Gray 4-PSK symbols per block: 14 message bits
  plus 2 flush bits, one fading coefficient per block.
* The normal-approximation curve uses blocklength 16 channel uses at
  1 bit/channel use and reports block error probability.
* Constellation-table presets use L_n = 2 on every branch.
"""

from __future__ import annotations

from typing import Any

_AWGN_GRID = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
_RAYLEIGH_GRID = [0.0, 4.0, 8.0, 12.0, 16.0, 20.0]


def _tpmd(lengths, **extra) -> dict[str, Any]:
    base = {"pipeline": "kron_rod", "scheme": 2, "factors": [4], "lengths": lengths, "seed": 1}
    base.update(extra)
    return base


def _fig3(channel: str, grid: list[float]) -> dict[str, dict[str, Any]]:
    common = {"channel": channel, "ebn0_grid_db": grid}
    return {
        "tpmd2-s2": {**_tpmd([4, 4]), **common},
        "tpmd3-s2": {**_tpmd([2, 2, 4]), **common},
        "tpmd4-s2": {**_tpmd([2, 2, 2, 2]), **common},
        "tpmd4-s1": {
            **_tpmd([2, 2, 2, 2], scheme=1, M=4, assignments=[0, 0, 0, 1],
                    rate_convention="nominal"),
            **common,
        },
        "viterbi-hard": {"pipeline": "viterbi_hard", "seed": 1, **common},
        "viterbi-soft": {"pipeline": "viterbi_soft", "seed": 1, **common},
        "normal-approx": {"pipeline": "normal_approx", **common},
    }


def _table(scheme: int, lengths_n: int, assignments, **kw) -> dict[str, Any]:
    return {
        "pipeline": "kron_rod",
        "scheme": scheme,
        "lengths": [2] * lengths_n,
        "assignments": assignments,
        "channel": "awgn",
        "ebn0_grid_db": [10.0],
        "seed": 7,
        **kw,
    }


PRESETS: dict[str, dict[str, Any]] = {}
PRESETS.update({f"fig3a-{k}": v for k, v in _fig3("awgn", _AWGN_GRID).items()})
PRESETS.update({f"fig3b-{k}": v for k, v in _fig3("rayleigh", _RAYLEIGH_GRID).items()})

# constellation examples: one branch per factor set
TABLE_PRESETS: dict[str, dict[str, Any]] = {
    "table1-s1-qpsk": _table(1, 2, [0, 1], M=4),
    "table1-s1-8psk": _table(1, 3, [0, 1, 2], M=8),
    "table1-s2-2-4-8": _table(2, 3, [0, 1, 2], factors=[2, 4, 8]),
    "table1-s2-2-2-8": _table(2, 3, [0, 1, 2], factors=[2, 2, 8]),
    "table1-s2-4-4-8": _table(2, 3, [0, 1, 2], factors=[4, 4, 8]),
    "table1-s2-8-8-8": _table(2, 3, [0, 1, 2], factors=[8, 8, 8]),
    "table2-s1-n3-p3": _table(1, 3, [0, 1, 2], M=8),
    "table2-s1-n5-p3": _table(1, 5, [0, 0, 0, 1, 2], M=8),
    "table2-s2-n2-p2": _table(2, 2, [0, 1], factors=[2, 8]),
    "table2-s2-n3-p2-248": _table(2, 3, [0, 1, 2], factors=[2, 4, 8]),
    "table2-s2-n3-p2-888": _table(2, 3, [0, 0, 0], factors=[8]),
}
PRESETS.update(TABLE_PRESETS)
