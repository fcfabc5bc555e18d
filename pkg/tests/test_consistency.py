"""Tests for tiara.consistency: inconsistency error, dynamic components,
homogeneity and separation measurements."""

import numpy as np
import pytest

from tiara import (ValidationError, dynamic_component, estimate_kappa,
                   homogeneity_deviation, inconsistency_error,
                   inconsistency_profile, make_window, softmax_rows)

from oracles import naive_dstft


class TestInconsistencyError:
    def test_constant_signal_full_rectangular_window(self):
        # all power at DC; under the full-length rectangular window the
        # high-frequency coefficients vanish to rounding noise
        x = np.full(16, 3.7)
        w = make_window("rectangular", 16)
        for k_t in (1, 4, 8):
            assert inconsistency_error(x, w, 0, k_t) < 1e-10

    def test_pure_nyquist_tone(self):
        x = np.array([1.0, -1.0] * 4)
        w = make_window("rectangular", 8)
        assert inconsistency_error(x, w, 0, 4) == pytest.approx(8.0, rel=1e-12)

    def test_matches_brute_force_sum(self):
        rng = np.random.default_rng(41)
        x = rng.standard_normal(18)
        w = make_window("blackman", 7)
        for tau in range(18):
            expected = sum(abs(naive_dstft(list(x), list(w.coefficients), tau, k))
                           for k in range(5, 10))
            assert inconsistency_error(x, w, tau, 5) == pytest.approx(expected, abs=1e-10)

    def test_threshold_validation(self):
        w = make_window("hann", 5)
        with pytest.raises(ValidationError, match="k_threshold"):
            inconsistency_error(np.ones(8), w, 0, 0)
        with pytest.raises(ValidationError, match="k_threshold"):
            inconsistency_error(np.ones(8), w, 0, 5)

    def test_absolute_homogeneity(self):
        rng = np.random.default_rng(42)
        x = rng.standard_normal(14)
        w = make_window("gaussian", 7)
        base = inconsistency_error(x, w, 3, 2)
        assert inconsistency_error(-2.5 * x, w, 3, 2) == pytest.approx(2.5 * base, abs=1e-12 * base)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(43)
        w = make_window("hann", 7)
        for trial in range(10):
            x = rng.standard_normal(12)
            y = rng.standard_normal(12)
            for tau in (0, 5, 11):
                lhs = inconsistency_error(x + y, w, tau, 2)
                rhs = inconsistency_error(x, w, tau, 2) + inconsistency_error(y, w, tau, 2)
                assert lhs <= rhs + 1e-12

    def test_profile_covers_all_shifts(self):
        rng = np.random.default_rng(44)
        x = rng.standard_normal(10)
        w = make_window("blackman", 5)
        report = inconsistency_profile(x, w, 2)
        assert report.per_tau.shape == (10,)
        for tau in range(10):
            assert report.per_tau[tau] == inconsistency_error(x, w, tau, 2)


class TestDynamicComponent:
    def test_identity_becomes_zero(self):
        assert np.array_equal(dynamic_component(np.eye(5)), np.zeros((5, 5)))

    def test_uniform_matrix(self):
        got = dynamic_component(np.full((4, 4), 0.25))
        expected = np.full((4, 4), 0.25)
        np.fill_diagonal(expected, 0.0)
        assert np.array_equal(got, expected)

    def test_row_sums_complement_diagonal(self):
        rng = np.random.default_rng(45)
        a = softmax_rows(rng.standard_normal((7, 7)))
        got = dynamic_component(a)
        assert np.allclose(got.sum(axis=1), 1.0 - np.diag(a), atol=1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError, match="square"):
            dynamic_component(np.zeros((2, 3)))


class TestEstimateKappa:
    def test_zero_dynamic_signal(self):
        rng = np.random.default_rng(46)
        x = rng.standard_normal(12)
        w = make_window("hann", 5)
        assert estimate_kappa(x, np.zeros(12), w, 2) == 0.0

    def test_proportional_signals(self):
        rng = np.random.default_rng(47)
        x = rng.standard_normal(12)
        w = make_window("blackman", 7)
        assert estimate_kappa(x, 0.5 * x, w, 2) == pytest.approx(0.5, abs=1e-12)

    def test_self_ratio_is_one(self):
        rng = np.random.default_rng(48)
        x = rng.standard_normal(10)
        w = make_window("gaussian", 5)
        assert estimate_kappa(x, x, w, 1) == pytest.approx(1.0, abs=1e-12)

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(49)
        a = softmax_rows(rng.standard_normal((12, 12)))
        v = rng.standard_normal(12)
        x = a @ v
        x_dyn = dynamic_component(a) @ v
        w = make_window("blackman", 7)
        coeffs = list(w.coefficients)
        best = 0.0
        for tau in range(12):
            for k in range(3, 7):
                mag_x = abs(naive_dstft(list(x), coeffs, tau, k))
                if mag_x >= 1e-12:
                    best = max(best, abs(naive_dstft(list(x_dyn), coeffs, tau, k)) / mag_x)
        assert estimate_kappa(x, x_dyn, w, 3) == pytest.approx(best, rel=1e-10)

    def test_length_mismatch(self):
        w = make_window("hann", 3)
        with pytest.raises(ValidationError, match="same length"):
            estimate_kappa(np.ones(4), np.ones(5), w, 1)


class TestHomogeneityDeviation:
    def test_circulant_is_zero(self):
        base = np.array([0.4, 0.3, 0.2, 0.1])
        a = np.array([np.roll(base, i) for i in range(4)])
        assert homogeneity_deviation(a) == 0.0

    def test_identity_is_zero(self):
        assert homogeneity_deviation(np.eye(6)) == 0.0

    def test_single_perturbation(self):
        base = np.array([0.4, 0.3, 0.2, 0.1])
        a = np.array([np.roll(base, i) for i in range(4)])
        a[2, 1] += 0.05
        assert homogeneity_deviation(a) == pytest.approx(0.05, abs=1e-15)

    def test_nonzero_iff_not_circulant(self):
        rng = np.random.default_rng(50)
        a = softmax_rows(rng.standard_normal((6, 6)))
        assert homogeneity_deviation(a) > 0.0
