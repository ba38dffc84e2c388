#!/usr/bin/env python3
"""
Tests for particle ensembles, Bayes updates, time selection and the adaptive protocol.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dephasing_tomography.bayesian import (
    ParticleEnsemble,
    ProtocolConfig,
    bayes_update,
    candidate_grid,
    cumulative_lindblad_variance,
    expected_kl_gain,
    init_prior,
    lindblad_optimal_update_time,
    lindblad_variance_update,
    liu_west_resample,
    posterior_cov,
    posterior_mean,
    run_protocol,
    select_time,
)
from dephasing_tomography.estimation import optimal_times
from dephasing_tomography.noise_models import DisplacedLorentzian, OrnsteinUhlenbeck, White
from dephasing_tomography.utils.exceptions import (
    DegenerateUpdateError,
    DomainError,
    UnreliableStatisticsWarning,
    ValidationError,
)
from dephasing_tomography.utils.random_utils import RandomGenerator


def white_ensemble(values, weights=None, low=0.01, high=10.0):
    """
    Helper building a White ensemble from a list of T2 values.
    """
    values = np.asarray(values, dtype=float)[:, None]
    if weights is None:
        weights = np.full(len(values), 1.0 / len(values))
    return ParticleEnsemble("white", values, np.asarray(weights, dtype=float), np.array([low]), np.array([high]))


class TestParticleEnsemble:
    """
    Test cases for ensemble construction and statistics.
    """

    def test_kind_alias_resolved(self):
        """
        Test that aliases resolve to the canonical family name.
        """
        assert white_ensemble([1.0, 2.0]).kind == "White"

    def test_weights_must_sum_to_one(self):
        """
        Test that unnormalized weights are rejected.
        """
        with pytest.raises(ValidationError):
            white_ensemble([1.0, 2.0], [0.5, 0.6])

    def test_wrong_dimension(self):
        """
        Test that particles with the wrong number of columns are rejected.
        """
        with pytest.raises(ValidationError):
            ParticleEnsemble("ou", np.ones((3, 1)), np.full(3, 1.0 / 3.0), np.zeros(2), np.ones(2))

    def test_particles_outside_box(self):
        """
        Test that particles outside the support box are rejected.
        """
        with pytest.raises(ValidationError):
            white_ensemble([0.5, 2.0], low=1.0, high=3.0)
        with pytest.raises(ValidationError):
            white_ensemble([1.5, 2.0], low=3.0, high=1.0)

    def test_immutable(self):
        """
        Test that particle arrays are read-only.
        """
        ensemble = white_ensemble([1.0, 2.0])
        with pytest.raises(ValueError):
            ensemble.particles[0, 0] = 5.0

    def test_statistics(self):
        """
        Test the weighted mean, covariance and ESS.
        """
        ensemble = white_ensemble([1.0, 3.0], [0.25, 0.75])
        assert posterior_mean(ensemble).values[0] == pytest.approx(2.5)
        assert posterior_cov(ensemble)[0, 0] == pytest.approx(0.75)
        assert ensemble.ess() == pytest.approx(1.0 / (0.25 ** 2 + 0.75 ** 2))

    def test_unreliable_statistics_warning(self):
        """
        Test that an ESS below 2 warns.
        """
        ensemble = white_ensemble([1.0, 3.0], [1.0, 0.0])
        with pytest.warns(UnreliableStatisticsWarning):
            posterior_mean(ensemble)


class TestBayesUpdate:
    """
    Test cases for conditioning an ensemble on a measurement batch.
    """

    def test_matches_hand_computation(self):
        """
        Test posterior weights of two particles against Bayes' rule.
        """
        ensemble = white_ensemble([1.0, 2.0])
        posterior = bayes_update(ensemble, 1.0, 3, 2)
        p = 0.5 * (1.0 + np.exp(-np.array([1.0, 0.5])))
        expected = p ** 2 * (1.0 - p)
        expected /= expected.sum()
        assert np.allclose(posterior.weights, expected, rtol=1e-12)
        assert posterior.step == 1

    def test_zero_shots_leaves_weights(self):
        """
        Test that an empty batch only advances the step counter.
        """
        ensemble = white_ensemble([1.0, 2.0, 4.0], [0.2, 0.3, 0.5])
        posterior = bayes_update(ensemble, 1.0, 0, 0)
        assert np.array_equal(posterior.weights, ensemble.weights)
        assert posterior.step == 1

    @pytest.mark.parametrize("n, k0", [(10, 11), (10, -1), (-1, 0)])
    def test_invalid_counts(self, n, k0):
        """
        Test that counts outside [0, n] are rejected.
        """
        with pytest.raises(ValidationError):
            bayes_update(white_ensemble([1.0, 2.0]), 1.0, n, k0)

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 500), fraction=st.floats(0.0, 1.0), t=st.floats(0.01, 5.0))
    def test_weights_stay_normalized(self, n, fraction, t):
        """
        Test that posterior weights are nonnegative and sum to one.
        """
        k0 = int(round(fraction * n))
        posterior = bayes_update(white_ensemble([0.5, 1.0, 2.0]), t, n, k0)
        assert np.all(posterior.weights >= 0.0)
        assert float(posterior.weights.sum()) == pytest.approx(1.0, abs=1e-12)

    def test_log_domain_fallback(self):
        """
        Test that a large batch underflowing in the linear domain still updates.
        """
        ensemble = white_ensemble([0.9, 1.0, 1.1])
        posterior = bayes_update(ensemble, 1.0, 5000, 3400, rng=RandomGenerator(1))
        assert np.all(np.isfinite(posterior.weights))
        assert float(posterior.weights.sum()) == pytest.approx(1.0)

    def test_improbable_data_still_renormalizes(self, seed):
        """
        Test that data far in the tail of every particle still gives a finite posterior.
        """
        ensemble = white_ensemble([0.5, 1.0, 2.0])
        posterior = bayes_update(ensemble, 0.125, 318, 0, rng=RandomGenerator(seed))
        assert np.all(np.isfinite(posterior.weights))
        assert float(posterior.weights.sum()) == pytest.approx(1.0)
        # only the shortest T2 survives the all-flipped record
        assert posterior_mean(posterior).values[0] == pytest.approx(0.5, abs=1e-6)

    def test_unexplained_data_equal_likelihoods(self):
        """
        Test that equally poor particles keep equal weights.
        """
        # every particle predicts p0 = 1/2, the data say p0 = 1
        ensemble = white_ensemble([0.001, 0.002], low=0.001, high=0.002)
        posterior = bayes_update(ensemble, 10.0, 2000, 2000)
        assert np.allclose(posterior.weights, 0.5)

    def test_degenerate_update(self):
        """
        Test that data with zero likelihood under every particle raises DegenerateUpdateError.
        """
        # at t = 0 every particle predicts p0 = 1, so any outcome 1 is impossible
        ensemble = white_ensemble([1.0, 2.0])
        with pytest.raises(DegenerateUpdateError) as info:
            bayes_update(ensemble, 0.0, 10, 5)
        assert info.value.diagnostics["n"] == 10

    def test_resampling_triggered(self, seed):
        """
        Test that a collapsed ESS triggers resampling to uniform weights.
        """
        values = np.linspace(0.2, 5.0, 500)
        posterior = bayes_update(white_ensemble(values), 1.0, 1000, 800, rng=RandomGenerator(seed))
        assert np.allclose(posterior.weights, 1.0 / 500)
        assert posterior.ess() == pytest.approx(500)


class TestLiuWest:
    """
    Test cases for kernel resampling.
    """

    def test_preserves_mean(self, seed):
        """
        Test that the weighted mean is approximately preserved.
        """
        values = np.linspace(1.0, 2.0, 4000)
        weights = values / values.sum()
        ensemble = white_ensemble(values, weights, low=1.0, high=2.0)
        resampled = liu_west_resample(ensemble, RandomGenerator(seed))
        assert float(resampled.particles.mean()) == pytest.approx(7.0 / 4.5, abs=0.02)
        assert np.allclose(resampled.weights, 1.0 / 4000)

    def test_stays_in_box(self, seed):
        """
        Test that moved particles are clipped to the support box.
        """
        ensemble = white_ensemble(np.linspace(1.0, 2.0, 200), low=1.0, high=2.0)
        resampled = liu_west_resample(ensemble, RandomGenerator(seed), a=0.5)
        assert np.all(resampled.particles >= 1.0) and np.all(resampled.particles <= 2.0)


class TestTimeSelection:
    """
    Test cases for expected information gain and candidate times.
    """

    def test_gain_nonnegative(self):
        """
        Test that gains are nonnegative.
        """
        ensemble = white_ensemble(np.linspace(0.5, 2.0, 50))
        for t in (0.01, 0.5, 1.0, 10.0):
            assert expected_kl_gain(ensemble, t, 20) >= 0.0

    def test_point_mass_has_no_gain(self):
        """
        Test that identical particles gain nothing.
        """
        assert expected_kl_gain(white_ensemble([1.0, 1.0, 1.0]), 0.8, 50) == pytest.approx(0.0, abs=1e-12)

    def test_tie_goes_to_earliest(self):
        """
        Test that equal gains select the earliest candidate.
        """
        assert select_time(white_ensemble([1.0, 1.0]), [0.3, 0.6, 0.9], 10) == 0.3

    def test_informative_time_selected(self):
        """
        Test that the chosen time lies on the decay scale of the ensemble.
        """
        ensemble = white_ensemble(np.linspace(0.8, 1.25, 100))
        t = select_time(ensemble, candidate_grid(1.0, 40), 1)
        assert 0.1 < t < 3.0

    def test_empty_candidates(self):
        """
        Test that an empty grid is rejected.
        """
        with pytest.raises(ValidationError):
            select_time(white_ensemble([1.0, 2.0]), [], 10)

    def test_candidate_grid(self):
        """
        Test the log grid endpoints in units of T2.
        """
        grid = candidate_grid(2.0, 5, 0.01, 5.0)
        assert grid[0] == pytest.approx(0.02)
        assert grid[-1] == pytest.approx(10.0)
        assert np.all(np.diff(grid) > 0)


class TestLindbladBenchmark:
    """
    Test cases for the analytic single-shot variance recursion.
    """

    def test_optimal_time_narrow_prior(self):
        """
        Test 2 gamma t* = 0.797 when sigma/gamma = 1e-3.
        """
        t = lindblad_optimal_update_time(1.0, 1e-6)
        assert 2.0 * t == pytest.approx(0.797, abs=1e-3)

    def test_update_reduces_variance(self):
        """
        Test that an update never increases the variance.
        """
        update = lindblad_variance_update(1.0, 1e-2, 0.4)
        assert update.change < 0.0
        assert update.variance == pytest.approx(1e-2 + update.change)
        assert not update.overflow

    def test_overflow(self):
        """
        Test that very long times report a zero change with the overflow flag.
        """
        update = lindblad_variance_update(1.0, 1e-6, 200.0)
        assert update.overflow
        assert update.change == 0.0
        assert update.variance == 1e-6

    def test_wide_prior_domain_error(self):
        """
        Test that a prior too wide for the time raises DomainError.
        """
        with pytest.raises(DomainError):
            lindblad_variance_update(1.0, 1.0, 2.0)

    def test_cumulative_decreasing(self):
        """
        Test that the expected variance decreases every step.
        """
        history = cumulative_lindblad_variance(1.0, 1e-2, 20, shots_per_step=5)
        assert len(history) == 20
        assert history[0] < 1e-2
        assert np.all(np.diff(history) < 0.0)


class TestProtocolConfig:
    """
    Test cases for protocol settings.
    """

    def test_defaults_by_dimension(self):
        """
        Test default ensemble sizes.
        """
        assert ProtocolConfig("white", (0.1,), (10.0,)).particles == 4000
        assert ProtocolConfig("dl", (0.1, 0.1, 0.0), (10.0, 10.0, 5.0)).particles == 8000

    @pytest.mark.parametrize("overrides", [
        {"particles": 10},
        {"steps": 0},
        {"shots_per_step": 0},
        {"resample_a": 0.0},
        {"resample_threshold": 1.5},
        {"seed": -1},
        {"low": (0.0,)},
        {"low": (5.0,), "high": (1.0,)},
    ])
    def test_invalid(self, overrides):
        """
        Test that invalid settings are rejected.
        """
        settings_ = {"kind": "white", "low": (0.1,), "high": (10.0,)}
        settings_.update(overrides)
        with pytest.raises(ValidationError):
            ProtocolConfig(**settings_)

    def test_zero_detuning_allowed(self):
        """
        Test that the detuning prior may start at zero.
        """
        ProtocolConfig("dl", (0.1, 0.1, 0.0), (10.0, 10.0, 5.0))

    def test_from_dict_unknown_key(self):
        """
        Test that unknown keys are rejected.
        """
        with pytest.raises(ValidationError):
            ProtocolConfig.from_dict({"kind": "white", "low": [0.1], "high": [10.0], "partciles": 500})

    def test_around(self, white_model):
        """
        Test the prior box around a truth.
        """
        protocol = ProtocolConfig.around(white_model, 3.0)
        assert protocol.low[0] == pytest.approx(1.0 / 3.0)
        assert protocol.high[0] == pytest.approx(3.0)

    def test_total_shots(self):
        """
        Test the shot budget with and without a cap.
        """
        protocol = ProtocolConfig("white", (0.1,), (10.0,), shots_per_step=20, steps=5)
        assert protocol.total_shots == 100
        capped = ProtocolConfig("white", (0.1,), (10.0,), shots_per_step=20, steps=5, max_shots=50)
        assert capped.total_shots == 50


class TestProtocol:
    """
    Test cases for the adaptive protocol.
    """

    @staticmethod
    def small_config(truth, seed, **overrides):
        settings_ = dict(particles=300, shots_per_step=20, steps=8, grid_points=12, seed=seed)
        settings_.update(overrides)
        return ProtocolConfig.around(truth, **settings_)

    def test_init_prior(self, ou_model, seed):
        """
        Test that the prior is uniform with ESS = K.
        """
        ensemble = init_prior(self.small_config(ou_model, seed))
        assert ensemble.size == 300
        assert ensemble.dimension == 2
        assert ensemble.ess() == pytest.approx(300)
        assert np.all(ensemble.particles >= ensemble.low) and np.all(ensemble.particles <= ensemble.high)

    def test_trace_shape(self, white_model, seed):
        """
        Test one trace row per step.
        """
        trace = run_protocol(white_model, self.small_config(white_model, seed))
        assert len(trace) == 8
        assert len(trace.rows()) == 8
        assert all(len(row) == len(trace.header()) for row in trace.rows())
        assert trace.header() == ["step", "t", "shots", "count0", "mean_T2", "cov_0_0", "ess"]
        assert trace.total_shots == 160

    def test_deterministic(self, ou_model, seed):
        """
        Test that the same seed reproduces the trace exactly.
        """
        protocol = self.small_config(ou_model, seed, steps=4)
        assert run_protocol(ou_model, protocol).rows() == run_protocol(ou_model, protocol).rows()

    def test_max_shots_truncates(self, white_model, seed):
        """
        Test that the shot cap truncates the last batch.
        """
        trace = run_protocol(white_model, self.small_config(white_model, seed, max_shots=50))
        assert [record.shots for record in trace.steps] == [20, 20, 10]

    def test_family_mismatch(self, white_model, ou_model, seed):
        """
        Test that truth and prior must share a family.
        """
        with pytest.raises(ValidationError):
            run_protocol(white_model, self.small_config(ou_model, seed))

    def test_converges_to_truth(self, white_model, seed):
        """
        Test that posterior means averaged over seeds approach the true T2.
        """
        means = []
        for run in range(8):
            trace = run_protocol(white_model, self.small_config(white_model, seed + run, particles=1000,
                                                                steps=30, shots_per_step=50))
            assert trace.final_cov[0, 0] < (1.0 / 3.0) ** 2
            means.append(trace.final_mean[0])
        assert np.mean(means) == pytest.approx(1.0, abs=0.12)

    def test_to_dict(self, white_model, seed):
        """
        Test the serialized trace.
        """
        trace = run_protocol(white_model, self.small_config(white_model, seed, steps=2))
        document = trace.to_dict()
        assert document["kind"] == "White"
        assert len(document["steps"]) == 2
        assert document["total_shots"] == 40


@pytest.mark.slow
class TestProtocolAcceptance:
    """
    Long runs of the adaptive protocol.
    """

    def test_posterior_std_scaling(self, white_model, seed):
        """
        Test that the posterior std falls as steps^(-1/2).
        """
        protocol = ProtocolConfig.around(white_model, particles=2000, steps=500, grid_points=50, seed=seed)
        trace = run_protocol(white_model, protocol)
        steps = np.arange(50, 501)
        std = np.sqrt([trace.steps[i - 1].cov[0][0] for i in steps])
        slope = np.polyfit(np.log(steps), np.log(std), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.1)

    @pytest.mark.parametrize("truth", [
        OrnsteinUhlenbeck(T2=1.0, tau_c=0.5),
        DisplacedLorentzian.from_timescales(1.0, 0.5, 5.0),
    ], ids=["ou", "dl"])
    def test_times_cluster_at_frequentist_optima(self, truth, seed):
        """
        Test that late selected times sit near the frequentist optimal times in most runs.
        """
        optima = np.array(optimal_times(truth))
        votes = 0
        for run in range(10):
            protocol = ProtocolConfig.around(truth, particles=3000, steps=300, grid_points=100, seed=seed + run)
            late = run_protocol(truth, protocol).times[-100:]
            near = np.min(np.abs(late[:, None] - optima[None, :]), axis=1) <= 0.1 * truth.t2
            votes += int(np.mean(near) >= 0.6)
        assert votes >= 6


@pytest.mark.slow
class TestPropertyAcceptance:
    """
    Randomized Bayesian properties at full trial counts.
    """

    @settings(max_examples=1000, deadline=None)
    @given(n=st.integers(1, 2000), fraction=st.floats(0.0, 1.0), t=st.floats(0.01, 10.0),
           values=st.lists(st.floats(0.05, 10.0), min_size=3, max_size=3))
    def test_weights_stay_normalized(self, n, fraction, t, values):
        """
        Test that posterior weights are nonnegative and sum to one.
        """
        posterior = bayes_update(white_ensemble(values), t, n, int(round(fraction * n)))
        assert np.all(posterior.weights >= 0.0)
        assert float(posterior.weights.sum()) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=1000, deadline=None)
    @given(t=st.floats(0.01, 10.0), n=st.integers(1, 200),
           values=st.lists(st.floats(0.05, 10.0), min_size=3, max_size=3),
           raw=st.lists(st.floats(0.01, 1.0), min_size=3, max_size=3))
    def test_gain_nonnegative(self, t, n, values, raw):
        """
        Test that the expected gain is never negative.
        """
        weights = np.array(raw) / np.sum(raw)
        assert expected_kl_gain(white_ensemble(values, weights), t, n) >= 0.0

    @settings(max_examples=1000, deadline=None)
    @given(n=st.integers(1, 2000), fraction=st.floats(0.0, 1.0), t=st.floats(0.01, 10.0),
           values=st.lists(st.floats(0.05, 10.0), min_size=3, max_size=3),
           raw=st.lists(st.floats(0.01, 1.0), min_size=3, max_size=3))
    def test_matches_three_particle_bayes_rule(self, n, fraction, t, values, raw):
        """
        Test the posterior weights of three particles against Bayes' rule in the log domain.
        """
        k0 = int(round(fraction * n))
        weights = np.array(raw) / np.sum(raw)
        posterior = bayes_update(white_ensemble(values, weights), t, n, k0, resampler={"threshold": 0.0})
        decay = np.exp(-t / np.array(values))
        log_weights = (np.log(weights) + k0 * np.log(0.5 * (1.0 + decay))
                       + (n - k0) * np.log(-0.5 * np.expm1(-t / np.array(values))))
        expected = np.exp(log_weights - log_weights.max())
        expected /= expected.sum()
        assert np.allclose(posterior.weights, expected, rtol=1e-9, atol=1e-12)
