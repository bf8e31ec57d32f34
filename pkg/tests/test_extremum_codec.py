import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extremum_tde.extremum_codec import Message, encode_max_index, pack, unpack
from extremum_tde.signal_model import ccn_samples
from extremum_tde.theory import extremum_cdf_exact, harmonic_moments

# H(256) and sum 1/n^2 at 256, by direct rational/high-precision summation
H_256 = 6.12434496281728
VAR_256 = 1.64103543630868


class TestPackUnpack:
    def test_zero(self):
        assert pack(0, 3) == (0, 0, 0)

    def test_five(self):
        assert pack(5, 3) == (1, 0, 1)

    def test_msb_first(self):
        assert pack(4, 3) == (1, 0, 0)

    def test_round_trip_exhaustive_small(self):
        for k in range(0, 9):
            for j in range(1 << k):
                assert unpack(pack(j, k)) == j

    @given(st.integers(min_value=1, max_value=20).flatmap(
        lambda k: st.tuples(st.just(k), st.integers(min_value=0, max_value=(1 << k) - 1))
    ))
    def test_round_trip_random(self, k_and_j):
        k, j = k_and_j
        bits = pack(j, k)
        assert len(bits) == k
        assert unpack(bits) == j

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            pack(8, 3)
        with pytest.raises(ValueError):
            pack(-1, 3)

    def test_bad_bit(self):
        with pytest.raises(ValueError):
            unpack((0, 2, 1))


class TestMessage:
    def test_from_index(self):
        msg = Message.from_index(5, 4)
        assert msg.bits == (0, 1, 0, 1)
        assert msg.j == 5
        assert msg.k == 4

    def test_inconsistent_fields_rejected(self):
        with pytest.raises(ValueError):
            Message(bits=(1, 0), j=1)

    def test_byte_serialization_pads_right(self):
        msg = Message.from_index(0xABC, 12)
        assert msg.to_bytes() == bytes([0xAB, 0xC0])
        assert Message.from_bytes(bytes([0xAB, 0xC0]), 12) == msg

    def test_byte_round_trip(self):
        for k, j in [(1, 1), (8, 255), (10, 513), (16, 40000)]:
            msg = Message.from_index(j, k)
            assert Message.from_bytes(msg.to_bytes(), k) == msg

    def test_nonzero_padding_rejected(self):
        with pytest.raises(ValueError):
            Message.from_bytes(bytes([0xAB, 0xC1]), 12)

    def test_wrong_byte_count_rejected(self):
        with pytest.raises(ValueError):
            Message.from_bytes(bytes([0xAB]), 12)


class TestEncodeMaxIndex:
    def test_simple_argmax(self):
        x = np.sqrt(np.array([0.5, 2.0, 1.0, 0.3])).astype(complex)
        msg = encode_max_index(x)
        assert msg.j == 1
        assert msg.bits == (0, 1)

    def test_tie_breaks_to_smallest_index(self):
        msg = encode_max_index(np.ones(8, dtype=complex))
        assert msg.j == 0

    def test_empty_window_rejected(self):
        with pytest.raises(ValueError):
            encode_max_index(np.array([], dtype=complex))

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ValueError):
            encode_max_index(np.ones(3, dtype=complex))

    def test_scale_and_phase_invariance(self):
        stream = np.random.default_rng(11)
        for _ in range(50):
            x = ccn_samples(stream, 64)
            j = encode_max_index(x).j
            for c in (2.0, 0.5j, np.exp(0.3j), -3.0 + 4.0j):
                assert encode_max_index(c * x).j == j

    def test_extremum_mean_matches_harmonic_sum(self):
        # mean of |x[j]|^2 over 10^4 windows of 256 samples is H(256)
        stream = np.random.default_rng(12)
        m, n = 10_000, 256
        x = ccn_samples(stream, m * n).reshape(m, n)
        maxima = np.max(x.real**2 + x.imag**2, axis=1)
        mean_exact, var_exact = harmonic_moments(n)
        assert mean_exact == pytest.approx(H_256, rel=1e-12)
        assert var_exact == pytest.approx(VAR_256, rel=1e-12)
        assert abs(np.mean(maxima) - mean_exact) <= 4.0 * math.sqrt(var_exact / m)

    def test_extremum_law_within_dkw_band(self):
        # empirical CDF of |x[j]|^2 - log(n) vs the exact finite-n law
        stream = np.random.default_rng(13)
        m, n = 10_000, 64
        x = ccn_samples(stream, m * n).reshape(m, n)
        values = np.sort(np.max(x.real**2 + x.imag**2, axis=1)) - math.log(n)
        exact = np.array([extremum_cdf_exact(t, n) for t in values])
        steps = np.arange(1, m + 1) / m
        sup_dev = np.max(np.maximum(np.abs(steps - exact), np.abs(steps - 1 / m - exact)))
        assert sup_dev <= 1.36 / math.sqrt(m)
