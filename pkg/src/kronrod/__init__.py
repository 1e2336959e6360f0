"""Kronecker-structured PSK coding with a rank-one tensor detector."""

from .codec import KronConfig, SymbolBlock, bit_rate, code_rate, encode, modulate_branches, demap_branches
from .constellation import ConstellationSet, Scheme, SchemeSpec, kron_expand, make_psk, scheme1_sets, scheme2_sets
from .detector import TpmdSettings, detect

__version__ = "0.1.0"

__all__ = [
    "ConstellationSet",
    "KronConfig",
    "Scheme",
    "SchemeSpec",
    "SymbolBlock",
    "TpmdSettings",
    "bit_rate",
    "code_rate",
    "demap_branches",
    "detect",
    "encode",
    "kron_expand",
    "make_psk",
    "modulate_branches",
    "scheme1_sets",
    "scheme2_sets",
]
