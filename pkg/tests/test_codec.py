import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kronrod.codec import (
    KronConfig,
    SymbolBlock,
    bit_rate,
    bit_rate_exact,
    bits_to_indices,
    code_rate,
    code_rate_exact,
    demap_branches,
    effective_bit_rate,
    encode,
    encode_batch,
    indices_to_bits,
    modulate_branches,
    nominal_rate_exact,
    payload_bits_per_block,
)
from kronrod.constellation import Scheme, kron_expand, make_psk, scheme1_sets, scheme2_sets
from kronrod.errors import ConfigError, InvalidSymbolError

QPSK = make_psk(4)


def qpsk_cfg(n=4, length=2, pilot=True):
    return KronConfig((length,) * n, (QPSK,) * n, pilot, Scheme.SCHEME2)


class TestConfig:
    def test_rejects_unit_length(self):
        with pytest.raises(ConfigError):
            KronConfig((1, 2), (QPSK, QPSK))

    def test_rejects_single_branch(self):
        with pytest.raises(ConfigError):
            KronConfig((4,), (QPSK,))

    def test_rejects_assignment_mismatch(self):
        with pytest.raises(ConfigError):
            KronConfig((2, 2, 2), (QPSK, QPSK))


class TestRates:
    def test_payload_no_pilots(self):
        assert payload_bits_per_block(qpsk_cfg(pilot=False)) == 16

    def test_payload_with_pilots(self):
        assert payload_bits_per_block(qpsk_cfg(pilot=True)) == 8

    def test_half_rate_qpsk(self):
        cfg = qpsk_cfg()
        assert bit_rate_exact(cfg) == 1
        assert code_rate_exact(cfg) == Fraction(1, 2)
        assert effective_bit_rate(cfg) == 0.5

    def test_mixed_cardinalities(self):
        cfg = KronConfig((2, 2, 2), tuple(scheme2_sets([2, 4, 8])))
        assert bit_rate(cfg) == 1.5

    def test_bpsk_rates_equal_across_schemes(self):
        s1 = KronConfig((2, 3), (scheme1_sets(2)[0],) * 2, scheme=Scheme.SCHEME1)
        s2 = KronConfig((2, 3), (make_psk(2),) * 2, scheme=Scheme.SCHEME2)
        assert bit_rate_exact(s1) == bit_rate_exact(s2)

    def test_code_rate_two_branches(self):
        assert code_rate(qpsk_cfg(n=2)) == 1.0

    def test_code_rate_bounded(self):
        for n in range(2, 5):
            for lengths in itertools.product(range(2, 5), repeat=n):
                cfg = KronConfig(lengths, (QPSK,) * n)
                assert 0 < code_rate_exact(cfg) <= 1

    def test_nominal_rate_matches_for_scheme1(self):
        cfg = KronConfig((2,) * 4, tuple(scheme1_sets(4)[i] for i in (0, 0, 0, 1)), scheme=Scheme.SCHEME1)
        assert bit_rate_exact(cfg) == Fraction(1, 2)
        assert nominal_rate_exact(cfg) == 1

    def test_scheme_rate_ordering_grid(self):
        for m in (2, 4, 8):
            k = m.bit_length() - 1
            binary = make_psk(2)
            options = [make_psk(c) for c in (2, 4, 8) if c <= m]
            for n in range(2, 5):
                for lengths in itertools.product(range(2, 5), repeat=n):
                    r1 = bit_rate_exact(KronConfig(lengths, (binary,) * n))
                    for sets in itertools.product(options, repeat=n):
                        r2 = bit_rate_exact(KronConfig(lengths, sets))
                        assert r1 <= r2 <= k * r1
                    r_full = bit_rate_exact(KronConfig(lengths, (make_psk(m),) * n))
                    assert r_full == k * r1

    @pytest.mark.parametrize("n,l", [(2, 2), (3, 2), (2, 3), (4, 2), (3, 3)])
    def test_uniform_length_reduction(self, n, l):
        sets = tuple(scheme2_sets([2, 4, 8, 4][:n]))
        cfg = KronConfig((l,) * n, sets)
        assert bit_rate_exact(cfg) == Fraction(l * sum(s.bits_per_symbol for s in sets), l**n)


class TestModulation:
    def test_all_zero_bits_scheme1(self):
        cfg = KronConfig((2, 3, 2), tuple(scheme1_sets(8)), scheme=Scheme.SCHEME1)
        block = modulate_branches(np.zeros(payload_bits_per_block(cfg), int), cfg)
        for s in block.branch_symbols:
            np.testing.assert_allclose(s, 1)

    def test_single_bit_flip_is_local(self, rng):
        cfg = KronConfig((3, 2, 4), tuple(scheme2_sets([2, 4, 8])))
        bits = rng.integers(0, 2, payload_bits_per_block(cfg))
        base = modulate_branches(bits, cfg).branch_symbols
        for i in range(bits.size):
            flipped = bits.copy()
            flipped[i] ^= 1
            other = modulate_branches(flipped, cfg).branch_symbols
            changed = [int(np.sum(~np.isclose(a, b))) for a, b in zip(base, other)]
            assert sorted(changed) == [0, 0, 1]

    def test_round_trip_random(self, rng):
        cfg = KronConfig((2, 3, 4), tuple(scheme2_sets([2, 4, 8])))
        bits = rng.integers(0, 2, (10_000, payload_bits_per_block(cfg)))
        np.testing.assert_array_equal(indices_to_bits(bits_to_indices(bits, cfg), cfg), bits)

    @pytest.mark.parametrize("pilot", [True, False])
    def test_round_trip_exhaustive_tiny(self, pilot):
        cfg = KronConfig((2, 2, 2), tuple(scheme1_sets(8)), pilot, Scheme.SCHEME1)
        p = payload_bits_per_block(cfg)
        for bits in itertools.product((0, 1), repeat=p):
            block = modulate_branches(bits, cfg)
            np.testing.assert_array_equal(demap_branches(block, cfg), bits)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sampled_from([2, 4, 8]), min_size=2, max_size=4), st.integers(0, 2**32 - 1))
    def test_round_trip_property(self, cards, seed):
        rng = np.random.default_rng(seed)
        lengths = tuple(int(x) for x in rng.integers(2, 4, len(cards)))
        cfg = KronConfig(lengths, tuple(scheme2_sets(cards)))
        bits = rng.integers(0, 2, payload_bits_per_block(cfg))
        np.testing.assert_array_equal(demap_branches(modulate_branches(bits, cfg), cfg), bits)

    def test_pilots_pinned_to_first_point(self, rng):
        cfg = KronConfig((3, 3), tuple(scheme1_sets(4)[::-1]))
        block = modulate_branches(rng.integers(0, 2, payload_bits_per_block(cfg)), cfg)
        for s, cset in zip(block.branch_symbols, cfg.assignments):
            assert s[0] == cset.first_point

    def test_wrong_bit_count(self):
        with pytest.raises(ValueError):
            modulate_branches(np.zeros(3, int), qpsk_cfg())

    def test_demap_requires_alphabet_symbols(self):
        cfg = qpsk_cfg(n=2)
        block = SymbolBlock((np.array([1, 0.9]), np.array([1, 1j])))
        with pytest.raises(InvalidSymbolError):
            demap_branches(block, cfg)

    def test_demap_skips_pilots(self):
        cfg = qpsk_cfg(n=2, length=3)
        block = SymbolBlock((np.ones(3, complex), np.ones(3, complex)))
        np.testing.assert_array_equal(demap_branches(block, cfg), np.zeros(8))


class TestEncode:
    def test_hand_example(self):
        x = encode(SymbolBlock((np.array([1, -1]), np.array([1, 1j]))))
        np.testing.assert_allclose(x, [1, -1, 1j, -1j])

    def test_all_ones(self):
        assert np.all(encode(SymbolBlock((np.ones(2), np.ones(3), np.ones(2)))) == 1)

    def test_energy_and_membership(self, rng):
        sets = tuple(scheme1_sets(8))
        cfg = KronConfig((2, 3, 2), sets, scheme=Scheme.SCHEME1)
        expanded = kron_expand(sets)
        bits = rng.integers(0, 2, (10_000, payload_bits_per_block(cfg)))
        idx = bits_to_indices(bits, cfg)
        x = encode_batch([s.points[i] for s, i in zip(sets, idx)])
        np.testing.assert_allclose(np.sum(np.abs(x) ** 2, axis=1), cfg.block_length)
        dist = np.abs(x[..., None] - expanded.points).min(axis=-1)
        assert dist.max() < 1e-9

    def test_batch_matches_single(self, rng):
        cfg = KronConfig((2, 3, 2), tuple(scheme2_sets([2, 4, 8])))
        bits = rng.integers(0, 2, (20, payload_bits_per_block(cfg)))
        idx = bits_to_indices(bits, cfg)
        xb = encode_batch([s.points[i] for s, i in zip(cfg.assignments, idx)])
        for b in range(20):
            np.testing.assert_allclose(xb[b], encode(modulate_branches(bits[b], cfg)), atol=1e-14)
