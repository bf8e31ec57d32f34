import math

import numpy as np
import pytest

from extremum_tde.estimators import (
    EstimatorId,
    cce,
    forward_test_channel,
    mmie_decode,
    one_bit_quantize,
    rd_compress,
    rho_sq_mmie,
    rho_sq_profile,
)
from extremum_tde.extremum_codec import Message, encode_max_index
from extremum_tde.signal_model import ModelParams, ccn_samples, generate_pair
from extremum_tde.theory import harmonic_number


def rng(seed=0):
    return np.random.default_rng(seed)


def brute_force_mmie(y_window, j, d_max):
    """Independent reference decoder: plain loop over the delay spread."""
    best_lag, best_val = None, -1.0
    for lag in range(-d_max, d_max + 1):
        val = abs(y_window[j + lag + d_max]) ** 2
        if val > best_val:
            best_lag, best_val = lag, val
    return best_lag


class TestMmieDecode:
    def test_handcrafted_window(self):
        # n=4 (k=2), d_max=1; y holds samples -1..4; peak at j+1
        y = np.array([0.1, 0.2, 1.0, 0.5, 3.0, 0.3], dtype=complex)
        msg = Message.from_index(2, 2)
        est = mmie_decode(y, msg, d_max=1)
        assert est.d_hat == 1
        assert est.estimator_id is EstimatorId.MMIE
        np.testing.assert_allclose(est.score_profile, [1.0, 0.25, 9.0])

    def test_all_zero_window_ties_to_smallest_lag(self):
        msg = Message.from_index(1, 2)
        est = mmie_decode(np.zeros(10, dtype=complex), msg, d_max=3)
        assert est.d_hat == -3
        assert np.all(est.score_profile == 0)

    def test_dmax_zero(self):
        y = np.arange(1, 5, dtype=complex)
        assert mmie_decode(y, Message.from_index(3, 2), d_max=0).d_hat == 0

    def test_window_too_short(self):
        with pytest.raises(ValueError):
            mmie_decode(np.zeros(5, dtype=complex), Message.from_index(0, 2), d_max=1)

    def test_noiseless_locally_dominant_peak(self):
        # infinite SNR and a strictly dominant extremum: decode recovers d
        p = ModelParams(snr_db=300.0, d_max=2, k=8, theta=0.0)
        found = 0
        for seed in range(20):
            pair = generate_pair(p, rng(100 + seed))
            msg = encode_max_index(pair.encoder_window)
            j = msg.j
            # samples x[j-2d .. j+2d] live at array indices j .. j+4d
            neighborhood = np.abs(pair.x[j : j + 4 * p.d_max + 1])
            peak = abs(pair.x_at(j))
            others = np.delete(neighborhood, 2 * p.d_max)
            if peak > others.max():  # locally dominant in x[j-2d .. j+2d]
                found += 1
                assert mmie_decode(pair.y, msg, p.d_max).d_hat == pair.d_true
        assert found > 0

    def test_matches_brute_force_oracle(self):
        # shared realizations at k=12, 20 dB, d_max=150
        p = ModelParams(snr_db=20.0, d_max=150, k=12)
        errors = 0
        for seed in range(1000):
            pair = generate_pair(p, rng(2000 + seed))
            msg = encode_max_index(pair.encoder_window)
            est = mmie_decode(pair.y, msg, p.d_max)
            assert est.d_hat == brute_force_mmie(pair.y, msg.j, p.d_max)
            errors += est.d_hat != pair.d_true
        # decay rate ~ 2^(-k*100/102): error rate small but nonzero here
        p_hat = errors / 1000
        assert 0.0 < p_hat < 0.1
        c_fit = p_hat * 2 ** (12 * 100 / 102)
        assert 0.1 < c_fit < 1000.0

    def test_global_phase_invariance(self):
        p = ModelParams(snr_db=10.0, d_max=5, k=7)
        for seed in range(10):
            pair = generate_pair(p, rng(300 + seed))
            msg = encode_max_index(pair.encoder_window)
            base = mmie_decode(pair.y, msg, p.d_max).d_hat
            for phi in (0.4, 1.9, 5.0):
                rotated = np.exp(1j * phi) * pair.y
                assert mmie_decode(rotated, msg, p.d_max).d_hat == base


class TestRhoSqEstimator:
    def test_zero_sample(self):
        assert rho_sq_mmie(0.0, 1024) == 0.0

    def test_normalization(self):
        assert rho_sq_mmie(2.0 + 0.0j, 16) == pytest.approx(4.0 / harmonic_number(16))

    def test_asymptotically_unbiased(self):
        # d = 0 setting: estimate should center on |rho|^2
        n, trials = 1024, 3000
        rho_sq_true = 100 / 101
        rho, rho_bar = math.sqrt(rho_sq_true), math.sqrt(1 / 101)
        stream = rng(14)
        estimates = np.empty(trials)
        for t in range(trials):
            x = ccn_samples(stream, n)
            j = int(np.argmax(x.real**2 + x.imag**2))
            y_at_j = rho * x[j] + rho_bar * ccn_samples(stream, 1)[0]
            estimates[t] = rho_sq_mmie(y_at_j, n)
        assert abs(np.mean(estimates) - rho_sq_true) < 0.05

    def test_strictly_positive_even_for_zero_rho(self):
        # uncorrelated sensors still produce a positive estimate
        n, trials = 256, 200
        stream = rng(15)
        vals = []
        for _ in range(trials):
            y_at_j = ccn_samples(stream, 1)[0]
            vals.append(rho_sq_mmie(y_at_j, n))
        vals = np.array(vals)
        assert np.all(vals > 0)
        assert np.mean(vals) < 0.5  # small: ~1/H(256)


class TestRhoSqProfile:
    def test_values_are_normalized_scores(self):
        y = np.array([0.1, 1.0, 2.0, 0.5, 0.2, 0.3], dtype=complex)
        msg = Message.from_index(1, 2)
        profile = rho_sq_profile(y, msg, d_max=1, n=4)
        expected = np.abs(y[1:4]) ** 2 / harmonic_number(4)
        np.testing.assert_allclose(profile, expected)

    def test_argmax_equals_mmie_decision(self):
        # profile scaling never changes the argmax
        p = ModelParams(snr_db=3.0, d_max=2, k=4)
        stream = rng(16)
        for _ in range(10_000):
            pair = generate_pair(p, stream)
            msg = encode_max_index(pair.encoder_window)
            est = mmie_decode(pair.y, msg, p.d_max)
            profile = rho_sq_profile(pair.y, msg, p.d_max, p.n)
            assert int(np.argmax(profile)) - p.d_max == est.d_hat

    def test_all_zero_window(self):
        msg = Message.from_index(0, 3)
        profile = rho_sq_profile(np.zeros(12, dtype=complex), msg, d_max=2, n=8)
        assert np.all(profile == 0)

    def test_high_snr_peak_at_true_delay(self):
        p = ModelParams(snr_db=20.0, d_max=4, k=10)
        hits = 0
        trials = 300
        stream = rng(17)
        for _ in range(trials):
            pair = generate_pair(p, stream)
            msg = encode_max_index(pair.encoder_window)
            profile = rho_sq_profile(pair.y, msg, p.d_max, p.n)
            hits += int(np.argmax(profile)) - p.d_max == pair.d_true
        assert hits / trials >= 0.95


class TestCce:
    def test_noiseless_exact_recovery(self):
        p = ModelParams(snr_db=300.0, d_max=20, k=10, theta=0.0)
        stream = rng(18)
        for _ in range(1000):
            pair = generate_pair(p, stream)
            est = cce(pair.encoder_window, pair.y, p.d_max)
            assert est.d_hat == pair.d_true

    def test_scale_invariance(self):
        p = ModelParams(snr_db=5.0, d_max=6, k=8)
        for seed in range(10):
            pair = generate_pair(p, rng(400 + seed))
            base = cce(pair.encoder_window, pair.y, p.d_max).d_hat
            for c in (2.0, -1.0 + 2.0j, 1e-3):
                assert cce(c * pair.encoder_window, pair.y, p.d_max).d_hat == base

    def test_global_phase_invariance(self):
        p = ModelParams(snr_db=5.0, d_max=6, k=8)
        pair = generate_pair(p, rng(19))
        base = cce(pair.encoder_window, pair.y, p.d_max).d_hat
        for phi in (0.8, 2.5):
            assert cce(pair.encoder_window, np.exp(1j * phi) * pair.y, p.d_max).d_hat == base

    def test_dmax_zero(self):
        x = ccn_samples(rng(20), 16)
        assert cce(x, x, 0).d_hat == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cce(np.ones(8, complex), np.ones(9, complex), d_max=1)
        with pytest.raises(ValueError):
            cce(np.array([], dtype=complex), np.ones(4, complex), d_max=1)

    def test_profile_normalization(self):
        # objective is |mean of x[n] conj(y[n+l])|^2
        x = np.array([1.0 + 0j, 1.0 + 0j])
        y = np.array([0.0, 1.0 + 0j, 1.0 + 0j, 0.0])
        est = cce(x, y, d_max=1)
        np.testing.assert_allclose(est.score_profile, [0.25, 1.0, 0.25])
        assert est.d_hat == 0

    def test_error_rate_decreases_with_window_length(self):
        # classical consistency: larger n helps at fixed snr and spread
        p_hats = []
        for k in (6, 8, 10, 12):
            p = ModelParams(snr_db=-10.0, d_max=30, k=k)
            stream = rng(21)
            errors = 0
            trials = 400
            for _ in range(trials):
                pair = generate_pair(p, stream)
                errors += cce(pair.encoder_window, pair.y, p.d_max).d_hat != pair.d_true
            p_hats.append(errors / trials)
        assert p_hats[0] > p_hats[-1]
        for a, b in zip(p_hats, p_hats[1:]):
            assert b <= a + 0.05


class TestForwardTestChannel:
    def test_rate_zero_outputs_zero(self):
        x = np.linspace(-2, 2, 64)
        out = forward_test_channel(x, 0.0, rng(22))
        assert np.all(out == 0.0)

    def test_high_rate_is_near_lossless(self):
        x = rng(23).standard_normal(4096) * math.sqrt(0.5)
        out = forward_test_channel(x, 20.0, rng(24))
        np.testing.assert_allclose(out, x, atol=1e-4)

    def test_distortion_matches_rate_distortion_target(self):
        # D = var * 2^(-2R); empirical MSE within 1%
        rate, var = 0.25, 0.5
        target = var * 2 ** (-2 * rate)
        x = rng(25).standard_normal(1_000_000) * math.sqrt(var)
        out = forward_test_channel(x, rate, rng(26))
        mse = float(np.mean((out - x) ** 2))
        assert mse == pytest.approx(target, rel=0.01)

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            forward_test_channel(np.zeros(4), -0.1, rng(27))


class TestRdCompress:
    def test_budget_is_split_across_dimensions(self):
        # per-dimension MSE matches D at rate k/(2n) within 1%
        k = 20
        n = 1 << k
        x = ccn_samples(rng(28), n)
        x_hat = rd_compress(x, k, rng(29))
        rate = (k / 2) / n
        target = 0.5 * 2 ** (-2 * rate)
        assert np.mean((x_hat.real - x.real) ** 2) == pytest.approx(target, rel=0.01)
        assert np.mean((x_hat.imag - x.imag) ** 2) == pytest.approx(target, rel=0.01)

    def test_length_must_match_budget(self):
        with pytest.raises(ValueError):
            rd_compress(np.ones(8, complex), 4, rng(30))

    def test_deterministic_given_stream(self):
        x = ccn_samples(rng(31), 64)
        a = rd_compress(x, 6, rng(32))
        b = rd_compress(x, 6, rng(32))
        np.testing.assert_array_equal(a, b)


class TestOneBitQuantize:
    def test_sign_map(self):
        x = np.array([1 + 1j, -2 - 0.5j])
        np.testing.assert_array_equal(one_bit_quantize(x, 4), np.array([1 + 1j, -1 - 1j]))

    def test_budget_truncates(self):
        x = np.array([1 + 1j, -2 - 0.5j, 3 + 3j])
        assert len(one_bit_quantize(x, 4)) == 2
        assert len(one_bit_quantize(x, 5)) == 2
        assert len(one_bit_quantize(x, 100)) == 3  # clamped to window

    def test_no_truncation_flag(self):
        x = ccn_samples(rng(33), 16)
        assert len(one_bit_quantize(x, 4, truncate=False)) == 16

    def test_sign_of_zero_is_positive(self):
        out = one_bit_quantize(np.array([0.0 + 0.0j, -0.0 - 1.0j]), 4)
        np.testing.assert_array_equal(out, np.array([1 + 1j, 1 - 1j]))

    def test_budget_below_one_sample_rejected(self):
        with pytest.raises(ValueError):
            one_bit_quantize(np.ones(4, complex), 1)

    def test_error_rate_above_mmie(self):
        # sign quantization discards too much for the same bit budget
        p = ModelParams(snr_db=20.0, d_max=150, k=12)
        stream = rng(34)
        mmie_err = onebit_err = 0
        trials = 300
        for _ in range(trials):
            pair = generate_pair(p, stream)
            msg = encode_max_index(pair.encoder_window)
            mmie_err += mmie_decode(pair.y, msg, p.d_max).d_hat != pair.d_true
            x_hat = one_bit_quantize(pair.encoder_window, p.k)
            onebit_err += (
                cce(x_hat, pair.y, p.d_max, EstimatorId.ONEBIT_CCE).d_hat != pair.d_true
            )
        assert onebit_err > mmie_err


class TestSampleAccessCounts:
    def test_mmie_reads_exactly_the_spread(self, counting_window):
        p = ModelParams(snr_db=10.0, d_max=9, k=6)
        pair = generate_pair(p, rng(35))
        msg = encode_max_index(pair.encoder_window)
        window = counting_window(pair.y)
        mmie_decode(window, msg, p.d_max)
        assert window.elements_read == 2 * p.d_max + 1

    def test_encoder_reads_exactly_n(self, counting_window):
        x = ccn_samples(rng(36), 128)
        window = counting_window(x)
        encode_max_index(window)
        assert window.elements_read == 128

    def test_cce_reads_n_per_lag(self, counting_window):
        p = ModelParams(snr_db=10.0, d_max=4, k=6)
        pair = generate_pair(p, rng(37))
        window = counting_window(pair.y)
        cce(pair.encoder_window, window, p.d_max)
        assert window.elements_read == p.n * (2 * p.d_max + 1)
