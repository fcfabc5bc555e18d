"""Tests for tiara.verifier: the closed-form coefficient, synthetic
instance generators, and the inconsistency-reduction check."""

from math import exp, log

import numpy as np
import pytest

from tiara import (ValidationError, alpha_from_closed_form, format_report,
                   gen_homogeneous_attention, gen_inconsistent_values,
                   homogeneity_deviation, inconsistency_profile, iota,
                   lambda_coef, make_instance, make_window, softmax_rows,
                   verify_theorem)
from tiara.verifier import require_feasible, slack


class TestAlphaClosedForm:
    def test_reference_point(self):
        # log(0.26 / 0.06); the blend identity pins iota and lambda exactly
        alpha = alpha_from_closed_form(0.5, 0.8, 0.3)
        assert alpha == pytest.approx(1.466337068793428, abs=1e-14)
        assert iota(alpha, 0.3) == pytest.approx(0.3, abs=1e-12)
        assert lambda_coef(alpha, 0.3) == pytest.approx(1.0, abs=1e-12)
        assert iota(alpha, 0.3) + 0.5 * lambda_coef(alpha, 0.3) == pytest.approx(0.8, abs=1e-12)

    def test_zero_kappa_zero_diagonal(self):
        for eta in (0.25, 0.5, 0.9):
            alpha = alpha_from_closed_form(0.0, eta, 0.0)
            assert alpha == pytest.approx(log(1.0 / eta), abs=1e-14)
            assert iota(alpha, 0.0) == pytest.approx(eta, abs=1e-14)

    def test_denominator_floor(self):
        # eta at the feasibility boundary kappa / (1 - a_min) sends the
        # denominator to zero and must be rejected
        with pytest.raises(ValidationError, match="eta \\* \\(1 - a_min\\) - kappa"):
            alpha_from_closed_form(0.45, 0.45 / 0.9 + 1e-14, 0.1)

    def test_separation_bound_named(self):
        with pytest.raises(ValidationError, match="kappa < 1 - a_min"):
            alpha_from_closed_form(0.8, 0.9, 0.3)

    def test_eta_upper_bound(self):
        with pytest.raises(ValidationError, match="eta < 1"):
            alpha_from_closed_form(0.2, 1.0, 0.1)

    def test_identity_on_grid(self):
        worst = 0.0
        for a_min in np.linspace(0.0, 0.85, 8):
            for eta in np.linspace(0.1, 0.95, 8):
                for kappa in np.linspace(0.0, 0.9, 8):
                    if kappa < 1 - a_min and kappa / (1 - a_min) <= eta < 1 \
                            and eta * (1 - a_min) - kappa > 1e-9:
                        alpha = alpha_from_closed_form(kappa, eta, a_min)
                        assert alpha >= 0.0
                        worst = max(worst, abs(iota(alpha, a_min)
                                               + kappa * lambda_coef(alpha, a_min) - eta))
        assert worst < 1e-12

    def test_coefficient_identities(self):
        for alpha in (0.0, 0.3, 2.0, 8.0):
            for a_min in (0.0, 0.4, 0.9):
                q = exp(-alpha)
                scale = 1.0 - (1.0 - q) * a_min
                assert iota(alpha, a_min) * scale == pytest.approx(q, abs=1e-12)
                assert lambda_coef(alpha, a_min) * scale == pytest.approx(1.0 - q, abs=1e-12)

    def test_alpha_grows_with_kappa(self):
        # the blend identity forces this direction: at fixed eta and a_min a
        # larger kappa leaves less room for the dynamic term, so the
        # diagonal suppression must strengthen
        previous = None
        for kappa in np.linspace(0.0, 0.4, 9):
            alpha = alpha_from_closed_form(float(kappa), 0.9, 0.3)
            if previous is not None:
                assert alpha > previous
            previous = alpha


class TestGenerators:
    def test_sharp_decay_is_one_hot(self):
        a = softmax_rows(gen_homogeneous_attention(4, 50.0))
        off_diagonal = a[~np.eye(4, dtype=bool)]
        assert off_diagonal.max() < 1e-20
        assert np.allclose(np.diag(a), 1.0, atol=1e-20)

    def test_zero_decay_is_uniform(self):
        logits = gen_homogeneous_attention(5, 0.0)
        assert np.array_equal(logits, np.zeros((5, 5)))
        assert np.allclose(softmax_rows(logits), 0.2, atol=1e-15)

    def test_softmax_is_circulant(self):
        for n, decay in [(8, 0.5), (16, 1.0), (33, 2.0)]:
            a = softmax_rows(gen_homogeneous_attention(n, decay))
            assert homogeneity_deviation(a) <= 1e-12

    def test_small_n_rejected(self):
        with pytest.raises(ValidationError, match=">= 2"):
            gen_homogeneous_attention(1, 1.0)

    def test_pure_nyquist_tone(self):
        v = gen_inconsistent_values(8, 2.0, 2.0, seed=3)
        assert np.allclose(v, 2.0 * np.array([1, -1] * 4), atol=1e-12)

    def test_deterministic_from_seed(self):
        a = gen_inconsistent_values(32, 1.0, 1e-3, seed=17)
        b = gen_inconsistent_values(32, 1.0, 1e-3, seed=17)
        assert np.array_equal(a, b)
        c = gen_inconsistent_values(32, 1.0, 1e-3, seed=18)
        assert not np.array_equal(a, c)

    def test_amplitude_bound(self):
        for seed in range(5):
            v = gen_inconsistent_values(64, 1.5, 0.25, seed=seed)
            assert np.abs(v).max() <= 1.5 + 1e-12

    def test_output_has_inconsistency(self):
        a = softmax_rows(gen_homogeneous_attention(64, 1.0))
        v = gen_inconsistent_values(64, 1.0, 1e-3, seed=0)
        profile = inconsistency_profile(a @ v, make_window("blackman", 9), 5)
        assert profile.per_tau.min() > 0.0

    def test_bad_amplitude_rejected(self):
        with pytest.raises(ValidationError, match="hf_amplitude"):
            gen_inconsistent_values(8, 1.0, 0.0, seed=0)
        with pytest.raises(ValidationError, match="hf_amplitude"):
            gen_inconsistent_values(8, 1.0, 1.5, seed=0)


class TestVerifyTheorem:
    @staticmethod
    def _instance(n, eta=0.9, seed=0, hf=1e-4, window=None):
        window = window or make_window("blackman", 9)
        a = softmax_rows(gen_homogeneous_attention(n, 1.0))
        v = gen_inconsistent_values(n, 1.0, hf, seed)
        return make_instance(a, v, window, 5, eta)

    def test_measured_instance_fields(self):
        inst = self._instance(32)
        assert inst.feasible
        assert 0.0 < inst.kappa_hat < 1.0 - inst.a_min
        assert inst.homogeneity_dev <= 1e-12
        assert 0.0 < inst.a_min < 1.0

    def test_loose_eta_still_contracts(self):
        report = verify_theorem(self._instance(32, eta=0.999))
        assert report.alpha > 0.0
        assert report.max_ratio < 1.0

    def test_pipeline_bounds_and_report(self):
        for n in (32, 64):
            report = verify_theorem(self._instance(n))
            assert report.passed
            assert report.max_ratio <= 0.9 + slack(n)
            assert report.min_e_x > 1e-12
            assert np.count_nonzero(np.isnan(report.ratio_per_tau)) == 0
            assert report.iota + report.kappa_hat * report.lambda_coef == pytest.approx(
                report.eta, abs=1e-9)
            assert report.kappa_on_y >= 0.0

    def test_infeasible_instance_names_inequality(self):
        # seed 7 puts the carrier phase where a near-cancellation exposes the
        # Nyquist line, pushing the measured kappa past the separation bound
        inst = self._instance(32, seed=7)
        assert not inst.feasible
        with pytest.raises(ValidationError, match="kappa_hat < 1 - a_min"):
            require_feasible(inst)
        with pytest.raises(ValidationError, match="infeasible"):
            verify_theorem(inst)

    def test_eta_below_range_names_inequality(self):
        inst = self._instance(32, eta=0.05)
        assert not inst.feasible
        with pytest.raises(ValidationError, match="eta >= kappa_hat / \\(1 - a_min\\)"):
            require_feasible(inst)

    def test_slack_schedule(self):
        assert slack(32) == 0.15
        assert slack(127) == 0.15
        assert slack(128) == 0.05
        assert slack(256) == 0.05

    def test_report_formatting(self):
        report = verify_theorem(self._instance(32))
        text = format_report(report)
        assert "kappa_hat:" in text
        assert "max_ratio:" in text
        assert "pass: true" in text
        assert "tau ratio" in text
        # header lines + one line per shift
        assert len(text.strip().splitlines()) == 15 + 32
