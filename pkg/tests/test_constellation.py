import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronrod.constellation import (
    ConstellationSet,
    Scheme,
    SchemeSpec,
    kron_expand,
    make_psk,
    min_distance,
    q_function,
    scheme1_sets,
    scheme2_sets,
    set_error_prob,
)
from kronrod.errors import InvalidCardinalityError

# Q(1), Q(2) by adaptive quadrature of the standard normal density
Q1 = 0.15865525393145707
Q2 = 0.02275013194817598


def _phases(points):
    return np.sort(np.mod(np.angle(points), 2 * np.pi))


class TestMakePsk:
    def test_bpsk(self):
        s = make_psk(2, 0)
        np.testing.assert_allclose(s.points, [1, -1], atol=1e-15)
        assert s.labels == ((0,), (1,))

    def test_qpsk_is_fourth_roots(self):
        s = make_psk(4, 0)
        np.testing.assert_allclose(s.points, [1, 1j, -1, -1j], atol=1e-15)

    def test_8psk_phases(self):
        s = make_psk(8, 0)
        np.testing.assert_allclose(np.angle(s.points) % (2 * np.pi), np.arange(8) * np.pi / 4, atol=1e-12)

    def test_rotation_moves_point_zero(self):
        s = make_psk(4, 0.3)
        assert s.first_point == pytest.approx(np.exp(0.3j))

    @pytest.mark.parametrize("m", [4, 8, 16, 32])
    def test_gray_labels_adjacent_points_differ_in_one_bit(self, m):
        labels = make_psk(m).labels
        for i in range(m):
            a, b = labels[i], labels[(i + 1) % m]
            assert sum(x != y for x, y in zip(a, b)) == 1

    @pytest.mark.parametrize("m", [0, 1, 3, 6, 12])
    def test_invalid_cardinality(self, m):
        with pytest.raises(InvalidCardinalityError):
            make_psk(m)


class TestSchemeSets:
    def test_scheme1_8psk_table_row(self):
        sets = scheme1_sets(8)
        expected = [[1, np.exp(1j * np.pi)], [1, np.exp(1.5j * np.pi)], [1, np.exp(1.25j * np.pi)]]
        assert len(sets) == 3
        for s, e in zip(sets, expected):
            np.testing.assert_allclose(s.points, e, atol=1e-15)
            assert s.labels == ((0,), (1,))

    def test_scheme1_qpsk_table_row(self):
        sets = scheme1_sets(4)
        assert len(sets) == 2
        np.testing.assert_allclose(sets[1].points, [1, -1j], atol=1e-15)

    def test_scheme1_bpsk(self):
        sets = scheme1_sets(2)
        assert len(sets) == 1
        np.testing.assert_allclose(sets[0].points, [1, -1], atol=1e-15)

    def test_scheme1_invalid(self):
        with pytest.raises(InvalidCardinalityError):
            scheme1_sets(6)

    def test_scheme2_mixed(self):
        sets = scheme2_sets([2, 4, 8])
        assert [s.cardinality for s in sets] == [2, 4, 8]
        assert sets[2] == make_psk(8)

    def test_scheme2_repeated(self):
        sets = scheme2_sets([8, 8, 8])
        assert sets[0] == sets[1] == sets[2] == make_psk(8)

    def test_scheme2_single(self):
        assert scheme2_sets([2]) == [make_psk(2)]

    def test_scheme_spec_rejects_oversized_factor(self):
        with pytest.raises(ValueError):
            SchemeSpec(Scheme.SCHEME2, 4, (8,))

    def test_scheme_spec_describe_is_json(self):
        desc = SchemeSpec(Scheme.SCHEME1, 8).describe()
        back = json.loads(json.dumps(desc))
        assert back["scheme"] == 1 and back["M"] == 8
        assert len(back["expanded"]["points"]) == 8
        assert back["factor_cardinalities"] == [2, 2, 2]


class TestKronExpand:
    @pytest.mark.parametrize("m", [2, 4, 8, 16])
    def test_scheme1_closure(self, m):
        # oracle: enumerate every product by brute force and compare phases
        sets = scheme1_sets(m)
        brute = [np.prod(c) for c in itertools.product(*[s.points for s in sets])]
        brute_phases = np.unique(np.round(_phases(brute), 9))
        out = kron_expand(sets)
        assert out.cardinality == m
        assert brute_phases.size == m
        np.testing.assert_allclose(_phases(out.points), brute_phases, atol=1e-9)
        gaps = np.diff(np.append(_phases(out.points), _phases(out.points)[0] + 2 * np.pi))
        np.testing.assert_allclose(gaps, 2 * np.pi / m, atol=1e-10)

    def test_8psk_example(self):
        out = kron_expand(scheme1_sets(8))
        np.testing.assert_allclose(_phases(out.points), np.arange(8) * np.pi / 4, atol=1e-12)

    def test_single_set_identity(self):
        out = kron_expand([make_psk(2)])
        np.testing.assert_allclose(out.points, [1, -1], atol=1e-15)

    def test_scheme2_duplicates_collapse(self):
        out = kron_expand(scheme2_sets([2, 4, 8]))
        assert out.cardinality == 8

    def test_empty(self):
        with pytest.raises(ValueError):
            kron_expand([])

    @given(st.lists(st.sampled_from([2, 4, 8]), min_size=1, max_size=4))
    def test_expansion_stays_unit_modulus(self, cards):
        out = kron_expand(scheme2_sets(cards))
        assert np.all(np.abs(np.abs(out.points) - 1) < 1e-12)
        assert out.cardinality <= np.prod(cards)


class TestConstellationSet:
    def test_rejects_non_unit_modulus(self):
        with pytest.raises(ValueError):
            ConstellationSet(np.array([1, 0.5]), ((0,), (1,)))

    def test_rejects_duplicate_points(self):
        with pytest.raises(ValueError):
            ConstellationSet(np.array([1, 1, -1, 1j]), ((0, 0), (0, 1), (1, 1), (1, 0)))

    def test_rejects_non_bijective_labels(self):
        with pytest.raises(ValueError):
            ConstellationSet(np.array([1, -1]), ((0,), (0,)))

    def test_points_are_read_only(self):
        s = make_psk(4)
        with pytest.raises(ValueError):
            s.points[0] = 2


class TestDistanceAndErrorProbability:
    def test_min_distance_bpsk(self):
        assert min_distance(make_psk(2)) == pytest.approx(2.0)

    def test_min_distance_rotated_binary(self):
        assert min_distance(scheme1_sets(4)[1]) == pytest.approx(math.sqrt(2))

    def test_min_distance_qpsk(self):
        assert min_distance(make_psk(4)) == pytest.approx(math.sqrt(2))

    @pytest.mark.parametrize("m", [4, 8, 16, 32])
    def test_scheme1_distances_grow_and_phi1_dominates(self, m):
        # |1 - exp(j(pi + pi/2**p))| = 2 cos(pi / 2**(p+1)), increasing in p
        d = [min_distance(s) for s in scheme1_sets(m)]
        assert d[0] == pytest.approx(2.0)
        np.testing.assert_allclose(d[1:], [2 * math.cos(math.pi / 2 ** (p + 1)) for p in range(1, len(d))])
        assert all(a <= b for a, b in zip(d[1:], d[2:]))
        assert d[1] == min(d[1:]) == pytest.approx(math.sqrt(2))
        assert all(math.sqrt(2) - 1e-12 <= x <= 2 + 1e-12 for x in d)

    def test_q_function_values(self):
        assert q_function(0) == 0.5
        assert q_function(1) == pytest.approx(Q1, rel=1e-12)
        assert q_function(2) == pytest.approx(Q2, rel=1e-12)

    def test_q_function_reflection(self):
        x = np.linspace(-5, 5, 41)
        np.testing.assert_allclose(q_function(x) + q_function(-x), 1.0, atol=1e-15)

    def test_q_function_monotone(self):
        assert np.all(np.diff(q_function(np.linspace(-6, 6, 200))) < 0)

    def test_set_error_prob_bpsk(self):
        assert set_error_prob(make_psk(2), 2.0) == pytest.approx(Q1, rel=1e-12)

    @pytest.mark.parametrize("n0", [0.01, 0.1, 0.5, 1.0, 4.0])
    def test_rotated_set_is_worse(self, n0):
        assert set_error_prob(scheme1_sets(4)[1], n0) > set_error_prob(make_psk(2), n0)

    def test_high_noise_limit(self):
        assert set_error_prob(make_psk(2), 1e12) == pytest.approx(0.5, abs=1e-6)

    def test_non_binary_rejected(self):
        with pytest.raises(InvalidCardinalityError):
            set_error_prob(make_psk(4), 1.0)
