#!/usr/bin/env python3
"""
Tests for the noise model families and their derived quantities.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dephasing_tomography.core.model_factory import create_model, kinds, model_class, model_from_dict
from dephasing_tomography.noise_models import (
    DisplacedLorentzian,
    OrnsteinUhlenbeck,
    White,
    attenuation_quadrature,
    gamma_quadrature,
    markovian_boundary,
    n_cp,
    n_td,
    negative_rate_intervals,
)
from dephasing_tomography.utils.exceptions import DomainError, UnsupportedOperationError, ValidationError
from dephasing_tomography.utils.math_utils import phi1, phi2, phi2_prime


def finite_difference_gradient(model, t, step=1e-6):
    """
    Helper computing the central finite-difference gradient of Gamma(t).
    """
    values = np.array(model.values)
    grad = []
    for index in range(values.size):
        h = step * max(abs(values[index]), 1.0)
        up, down = values.copy(), values.copy()
        up[index] += h
        down[index] -= h
        grad.append((model.with_values(up).attenuation(t) - model.with_values(down).attenuation(t)) / (2 * h))
    return np.array(grad)


class TestPhiFunctions:
    """
    Test cases for the phi helper functions.
    """

    def test_small_argument_limits(self):
        """
        Test that phi1(0) = 1 and phi2(0) = 1/2.
        """
        assert phi1(0.0) == pytest.approx(1.0)
        assert phi2(0.0) == pytest.approx(0.5)

    def test_series_matches_direct_formula(self):
        """
        Test continuity between the series branch and the direct formula.
        """
        for z in (1e-6, 1e-3, 0.05, 0.2, 1.0, 5.0):
            assert phi1(z) == pytest.approx(-math.expm1(-z) / z, rel=1e-12)
        # the direct phi2 formula cancels catastrophically below about 1e-3
        assert phi2(1e-6) == pytest.approx(0.5 - 1e-6 / 6.0, rel=1e-12)
        for z in (1e-3, 0.05, 0.2, 1.0, 5.0):
            assert phi2(z) == pytest.approx((z - 1.0 + math.exp(-z)) / (z * z), rel=1e-8)

    def test_complex_arguments(self):
        """
        Test the complex branch against the direct formula.
        """
        z = 0.7 + 2.0j
        assert complex(phi2(z)) == pytest.approx((z - 1.0 + np.exp(-z)) / z ** 2, rel=1e-12)

    def test_derivative(self):
        """
        Test phi2' against a central difference.
        """
        for z in (0.01, 0.5, 3.0):
            h = 1e-6
            numeric = (phi2(z + h) - phi2(z - h)) / (2 * h)
            assert phi2_prime(z) == pytest.approx(numeric, rel=1e-6)


class TestWhite:
    """
    Test cases for the White family.
    """

    def test_closed_forms(self, white_model):
        """
        Test gamma, Gamma and S(0) of white noise.
        """
        t = np.array([0.0, 0.5, 2.0])
        assert np.allclose(white_model.gamma(t), 0.5)
        assert np.allclose(white_model.attenuation(t), t)
        assert white_model.s0 == pytest.approx(2.0)
        assert white_model.t2 == pytest.approx(1.0)

    def test_autocorr_unsupported(self, white_model):
        """
        Test that the Dirac-delta autocorrelation is rejected.
        """
        with pytest.raises(UnsupportedOperationError):
            white_model.autocorr(0.1)

    def test_invalid_parameters(self):
        """
        Test that T2 <= 0 is rejected.
        """
        with pytest.raises(ValidationError):
            White(T2=0.0)
        with pytest.raises(ValidationError):
            White(T2=-1.0)

    def test_negative_time(self, white_model):
        """
        Test that negative times raise a DomainError.
        """
        with pytest.raises(DomainError):
            white_model.attenuation(-0.1)


class TestOrnsteinUhlenbeck:
    """
    Test cases for the Ornstein-Uhlenbeck family.
    """

    def test_closed_forms(self, ou_model):
        """
        Test gamma and Gamma against their exponential forms.
        """
        t = np.linspace(0.01, 5.0, 50)
        u = t / ou_model.tau_c
        assert np.allclose(ou_model.gamma(t), 0.5 * (1.0 - np.exp(-u)), rtol=1e-12)
        assert np.allclose(ou_model.attenuation(t), t - 0.5 * (1.0 - np.exp(-u)), rtol=1e-10)

    def test_attenuation_vanishes_at_zero(self, ou_model):
        """
        Test Gamma(0) = 0 and gamma(0) = 0.
        """
        assert ou_model.attenuation(0.0) == 0.0
        assert ou_model.gamma(0.0) == 0.0

    def test_short_time_accuracy(self):
        """
        Test that Gamma keeps full relative accuracy where t << tau_c.
        """
        model = OrnsteinUhlenbeck(T2=1.0, tau_c=1.0)
        t = 1e-6
        # Gamma ~ t^2/(2 T2 tau_c) - t^3/(6 T2 tau_c^2)
        assert model.attenuation(t) == pytest.approx(0.5 * t * t - t ** 3 / 6.0, rel=1e-9)

    def test_diffusion_round_trip(self, ou_model):
        """
        Test the (c, tau_c) parametrization.
        """
        rebuilt = OrnsteinUhlenbeck.from_diffusion(ou_model.diffusion, ou_model.tau_c)
        assert rebuilt.T2 == pytest.approx(ou_model.T2)

    def test_psd_and_autocorr(self, ou_model):
        """
        Test S(0) = 2/T2 and C(0) = c tau_c/2.
        """
        assert ou_model.psd(0.0) == pytest.approx(2.0)
        assert ou_model.autocorr(0.0) == pytest.approx(0.5 * ou_model.diffusion * ou_model.tau_c)

    def test_long_time_slope(self, ou_model):
        """
        Test Gamma(t) -> (t - tau_c)/T2 at long times.
        """
        t = 50.0
        assert ou_model.attenuation(t) == pytest.approx(t - ou_model.tau_c, rel=1e-12)


class TestDisplacedLorentzian:
    """
    Test cases for the Displaced-Lorentzian family.
    """

    def test_timescales(self, dl_model):
        """
        Test that from_timescales reproduces T2 and tau_c.
        """
        assert dl_model.t2 == pytest.approx(1.0)
        assert dl_model.correlation_time == pytest.approx(1.0)
        assert dl_model.delta_c == 1.0

    def test_zero_detuning_matches_ou(self):
        """
        Test that delta_c = 0 reduces to Ornstein-Uhlenbeck with tau_c = 2/kappa.
        """
        dl = DisplacedLorentzian.from_timescales(1.3, 0.4, 0.0)
        ou = OrnsteinUhlenbeck(T2=1.3, tau_c=0.4)
        t = np.linspace(0.0, 6.0, 40)
        assert np.allclose(dl.attenuation(t), ou.attenuation(t), rtol=1e-10, atol=1e-14)
        assert np.allclose(dl.gamma(t), ou.gamma(t), rtol=1e-10, atol=1e-14)

    def test_rate_closed_form(self, non_markovian_model):
        """
        Test gamma against the trigonometric form.
        """
        m = non_markovian_model
        t = np.linspace(0.05, 10.0, 30)
        x = 2.0 * m.delta_c / m.kappa
        expected = 0.25 * m.s0 * (1.0 - np.exp(-0.5 * m.kappa * t) * (np.cos(m.delta_c * t) - x * np.sin(m.delta_c * t)))
        assert np.allclose(m.gamma(t), expected, rtol=1e-9, atol=1e-12)

    def test_attenuation_nonnegative(self, non_markovian_model):
        """
        Test that Gamma stays nonnegative even where gamma is negative.
        """
        t = np.linspace(0.0, 20.0, 2001)
        assert np.all(non_markovian_model.attenuation(t) >= 0.0)
        assert np.any(non_markovian_model.gamma(t) < 0.0)

    def test_attenuation_is_twice_integrated_rate(self, dl_model):
        """
        Test dGamma/dt = 2 gamma.
        """
        h = 1e-6
        for t in (0.3, 1.0, 4.0):
            slope = (dl_model.attenuation(t + h) - dl_model.attenuation(t - h)) / (2 * h)
            assert slope == pytest.approx(2.0 * dl_model.gamma(t), rel=1e-6)

    def test_complex_autocorr(self, dl_model):
        """
        Test that C(-dt) is the complex conjugate of C(dt).
        """
        assert dl_model.autocorr(-0.7) == pytest.approx(np.conj(dl_model.autocorr(0.7)))

    def test_first_trough(self, non_markovian_model):
        """
        Test that the rate is minimal near delta_c t = 3 pi/2.
        """
        trough = non_markovian_model.first_trough_time()
        assert trough == pytest.approx(1.5 * math.pi / 5.0)
        assert DisplacedLorentzian(g2n=1.0, kappa=1.0, delta_c=0.0).first_trough_time() == math.inf


class TestGradients:
    """
    Test cases for the analytic attenuation gradients.
    """

    @pytest.mark.parametrize("model", [
        White(T2=0.8),
        OrnsteinUhlenbeck(T2=1.0, tau_c=0.5),
        OrnsteinUhlenbeck(T2=2.0, tau_c=20.0),
        DisplacedLorentzian.from_timescales(1.0, 1.0, 1.0),
        DisplacedLorentzian(g2n=1.0, kappa=0.5, delta_c=5.0),
    ])
    def test_gradient_matches_finite_differences(self, model):
        """
        Test grad Gamma against central differences at several times.
        """
        for t in (0.05, 0.7, 3.0):
            analytic = model.grad_attenuation(t)
            numeric = finite_difference_gradient(model, t)
            assert np.allclose(analytic, numeric, rtol=1e-5, atol=1e-9)

    def test_batched_shape(self, dl_model):
        """
        Test that gradients over a time grid have shape (n, len(t)).
        """
        grad = dl_model.grad_attenuation(np.linspace(0.1, 1.0, 7))
        assert grad.shape == (3, 7)

    def test_particle_batch(self):
        """
        Test batched evaluation over a particle array at one time.
        """
        params = np.array([[1.0, 0.5], [2.0, 0.1], [0.5, 3.0]])
        batch = OrnsteinUhlenbeck.batch_attenuation(params, 0.4)
        single = [OrnsteinUhlenbeck(*row).attenuation(0.4) for row in params]
        assert np.allclose(batch, single)
        rates = OrnsteinUhlenbeck.batch_gamma(params, 0.4)
        assert np.allclose(rates, [OrnsteinUhlenbeck(*row).gamma(0.4) for row in params])


class TestModelFactory:
    """
    Test cases for the model registry.
    """

    def test_discovered_kinds(self):
        """
        Test that every family is registered.
        """
        assert set(kinds()) >= {"White", "OrnsteinUhlenbeck", "DisplacedLorentzian"}

    def test_aliases(self):
        """
        Test case-insensitive aliases.
        """
        assert model_class("ou") is OrnsteinUhlenbeck
        assert model_class("Lindblad") is White
        assert model_class("dl") is DisplacedLorentzian

    def test_unknown_kind(self):
        """
        Test that an unknown family is rejected.
        """
        with pytest.raises(ValidationError):
            model_class("Pink")

    def test_dict_round_trip(self, dl_model):
        """
        Test to_dict/from_dict.
        """
        assert model_from_dict(dl_model.to_dict()) == dl_model

    def test_create_rejects_unknown_parameter(self):
        """
        Test that stray parameters are reported.
        """
        with pytest.raises(ValidationError):
            create_model("White", {"T2": 1.0, "tau_c": 2.0})


class TestFilterFunction:
    """
    Test cases for the quadrature cross-validation of the closed forms.
    """

    @pytest.mark.parametrize("model", [
        White(T2=1.0),
        OrnsteinUhlenbeck(T2=1.0, tau_c=0.5),
        DisplacedLorentzian.from_timescales(1.0, 1.0, 1.0),
        DisplacedLorentzian(g2n=0.1, kappa=0.5, delta_c=5.0),
    ])
    def test_attenuation_quadrature(self, model):
        """
        Test that the integrated PSD reproduces Gamma(t).
        """
        for t in (0.2, 1.0, 3.0):
            assert attenuation_quadrature(model, t) == pytest.approx(float(model.attenuation(t)), rel=1e-6, abs=1e-8)

    @pytest.mark.parametrize("model", [
        OrnsteinUhlenbeck(T2=1.0, tau_c=0.5),
        DisplacedLorentzian(g2n=0.1, kappa=0.5, delta_c=5.0),
    ])
    def test_gamma_quadrature(self, model):
        """
        Test that the integrated PSD reproduces gamma(t), including negative values.
        """
        for t in (0.3, 1.0, 2.5):
            assert gamma_quadrature(model, t) == pytest.approx(float(model.gamma(t)), rel=1e-5, abs=1e-7)

    def test_rejects_nonpositive_time(self, ou_model):
        """
        Test that t <= 0 is outside the quadrature domain.
        """
        with pytest.raises(DomainError):
            attenuation_quadrature(ou_model, 0.0)


class TestNonMarkovianity:
    """
    Test cases for the non-Markovianity measures.
    """

    def test_markovian_families_are_zero(self, white_model, ou_model):
        """
        Test that White and Ornstein-Uhlenbeck noise have no recoherence.
        """
        for model in (white_model, ou_model):
            assert negative_rate_intervals(model, 10.0) == []
            assert n_cp(model, 10.0) == 0.0
            assert n_td(model, 10.0) == 0.0

    def test_weak_detuning_is_markovian(self):
        """
        Test that delta_c below the boundary gives zero measures.
        """
        model = DisplacedLorentzian(g2n=1.0, kappa=1.0, delta_c=1.0)
        assert n_cp(model) == 0.0
        assert n_td(model) == 0.0

    def test_strong_detuning_is_non_markovian(self, non_markovian_model):
        """
        Test positive measures deep in the non-Markovian regime.
        """
        windows = negative_rate_intervals(non_markovian_model)
        assert windows
        for start, end in windows:
            assert start < end
            assert non_markovian_model.gamma(0.5 * (start + end)) < 0.0
        assert n_cp(non_markovian_model) > 0.0
        assert n_td(non_markovian_model) > 0.0

    def test_first_window_contains_trough(self, non_markovian_model):
        """
        Test that the first window brackets delta_c t = 3 pi/2.
        """
        start, end = negative_rate_intervals(non_markovian_model)[0]
        assert start < non_markovian_model.first_trough_time() < end

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 4.0])
    def test_markovian_boundary(self, kappa):
        """
        Test that the boundary scales with kappa at about 1.82 kappa.
        """
        boundary = markovian_boundary(kappa)
        assert boundary / kappa == pytest.approx(1.82, rel=0.02)

    def test_boundary_rejects_bad_kappa(self):
        """
        Test that kappa <= 0 is rejected.
        """
        with pytest.raises(ValidationError):
            markovian_boundary(0.0)

    @settings(max_examples=30, deadline=None)
    @given(kappa=st.floats(0.2, 5.0), ratio=st.floats(0.1, 1.8) | st.floats(1.83, 6.0))
    def test_measures_vanish_together(self, kappa, ratio):
        """
        Test that n_cp and n_td are zero for exactly the same models.
        """
        model = DisplacedLorentzian(g2n=1.0, kappa=kappa, delta_c=ratio * kappa)
        assert (n_cp(model) == 0.0) == (n_td(model) == 0.0)

    @pytest.mark.slow
    @settings(max_examples=1000, deadline=None)
    @given(g2n=st.floats(0.1, 5.0), kappa=st.floats(0.2, 5.0), ratio=st.floats(0.1, 1.8) | st.floats(1.83, 6.0))
    def test_measures_vanish_together_full(self, g2n, kappa, ratio):
        """
        Test the zero-equivalence of n_cp and n_td over random couplings.
        """
        model = DisplacedLorentzian(g2n=g2n, kappa=kappa, delta_c=ratio * kappa)
        assert (n_cp(model) == 0.0) == (n_td(model) == 0.0)

    def test_trace_distance_survives_large_attenuation(self):
        """
        Test that n_td stays positive when the attenuation at the window is large.
        """
        model = DisplacedLorentzian(g2n=1.0, kappa=0.21875, delta_c=0.4375)
        window = negative_rate_intervals(model)[0]
        assert model.attenuation(window[0]) > 40.0
        assert n_cp(model) > 0.0
        assert n_td(model) > 0.0
