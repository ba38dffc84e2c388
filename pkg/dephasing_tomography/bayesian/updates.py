"""
Bayes-rule weight updates and Liu-West resampling.
"""
from typing import Any, Dict, Optional

import numpy as np
from scipy import special

import config
from dephasing_tomography.bayesian.ensemble import ParticleEnsemble
from dephasing_tomography.utils.exceptions import DegenerateUpdateError, ValidationError
from dephasing_tomography.utils.random_utils import RandomGenerator, STREAM_RESAMPLE
from dephasing_tomography.utils.validation import validate_integer_param

# Below this total the update is redone in the log domain, clear of subnormal weights
LINEAR_DOMAIN_FLOOR = 1e-200

def particle_probabilities(ensemble: ParticleEnsemble, t: float) -> np.ndarray:
    """Outcome-0 probability of every particle at time t."""
    return _outcome_probabilities(ensemble, t)[0]


def _outcome_probabilities(ensemble: ParticleEnsemble, t: float):
    # p1 from expm1 keeps small flip probabilities exact
    attenuation = ensemble.model_class.batch_attenuation(ensemble.particles, t)
    return 0.5 * (1.0 + np.exp(-attenuation)), -0.5 * np.expm1(-attenuation)


def liu_west_resample(ensemble: ParticleEnsemble, rng: RandomGenerator,
                      a: float = config.RESAMPLER_DEFAULTS["a"]) -> ParticleEnsemble:
    """
    Liu-West kernel resampling.

    Parents are drawn by weight and moved to a theta + (1 - a) mean plus
    Gaussian noise with covariance (1 - a^2) Cov, which preserves the first
    two moments; new particles are clipped to the support box.

    Args:
        ensemble: Ensemble to resample
        rng: Random generator
        a: Shrinkage in (0, 1]

    Returns:
        Ensemble with uniform weights and the same step
    """
    mean, cov = ensemble.mean_and_cov()
    size = ensemble.size
    parents = ensemble.particles[rng.choice(size, size, p=ensemble.weights)]
    jitter = rng.multivariate_normal((1.0 - a * a) * cov, size)
    particles = np.clip(a * parents + (1.0 - a) * mean + jitter, ensemble.low, ensemble.high)
    return ensemble.with_particles(particles, np.full(size, 1.0 / size))


def bayes_update(ensemble: ParticleEnsemble, t: float, n: int, k0: int,
                 rng: Optional[RandomGenerator] = None,
                 resampler: Optional[Dict[str, Any]] = None) -> ParticleEnsemble:
    """
    Condition the ensemble on k0 outcome-0 results out of n shots at time t.

    w_k <- w_k p_k^k0 (1 - p_k)^(n - k0), renormalized; the binomial
    coefficient cancels. Resamples when ESS < threshold K.

    Args:
        ensemble: Prior ensemble
        t: Measurement time
        n: Shots
        k0: Outcome-0 count, 0 <= k0 <= n
        rng: Generator for resampling (default derived from the step)
        resampler: Overrides of config.RESAMPLER_DEFAULTS

    Returns:
        Posterior ensemble with step incremented

    Raises:
        ValidationError: If k0 is outside [0, n]
        DegenerateUpdateError: If every particle gives the data zero likelihood
    """
    is_valid, error = validate_integer_param(n, min_val=0)
    if is_valid:
        is_valid, error = validate_integer_param(k0, min_val=0, max_val=n)
    if not is_valid:
        raise ValidationError("Invalid update counts", [{"k0": error}])

    step = ensemble.step + 1
    if n == 0:
        return ensemble.with_weights(ensemble.weights, step)

    p0, p1 = _outcome_probabilities(ensemble, t)
    k1 = n - k0
    with np.errstate(under="ignore"):
        weights = ensemble.weights * p0 ** k0 * p1 ** k1
    total = float(weights.sum())

    if not np.isfinite(total) or total < LINEAR_DOMAIN_FLOOR:
        with np.errstate(divide="ignore"):
            log_weights = np.log(ensemble.weights) + k0 * np.log(p0) + special.xlogy(k1, p1)
        best = float(np.max(log_weights))
        if not np.isfinite(best):
            raise DegenerateUpdateError(
                "Every particle gives the data zero likelihood; resample from the prior",
                {"t": t, "n": n, "k0": k0, "step": step}
            )
        weights = np.exp(log_weights - best)
        total = float(weights.sum())

    posterior = ensemble.with_weights(weights / total, step)
    settings = dict(config.RESAMPLER_DEFAULTS)
    settings.update(resampler or {})
    if posterior.ess() < settings["threshold"] * posterior.size:
        rng = rng if rng is not None else RandomGenerator(step, STREAM_RESAMPLE)
        posterior = liu_west_resample(posterior, rng, settings["a"])
    return posterior

