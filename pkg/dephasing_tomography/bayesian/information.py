"""
Expected information gain of a candidate measurement time.

For an n-shot batch the outcome-averaged KL divergence between posterior and
prior equals the mutual information between parameters and outcome,

    E[KL] = H(P) - sum_k w_k H(Binom(n, p_k)),   P(j) = sum_k w_k Binom(j; n, p_k)

summed exactly over the n + 1 outcomes.
"""
from typing import Optional, Sequence

import numpy as np
from scipy import special

import config
from dephasing_tomography.bayesian.ensemble import ParticleEnsemble
from dephasing_tomography.bayesian.updates import particle_probabilities
from dephasing_tomography.utils.exceptions import ValidationError
from dephasing_tomography.utils.math_utils import clamp_probability, log_grid
from dephasing_tomography.utils.validation import validate_integer_param, validate_time_list

# Gains within this distance of the maximum count as ties
TIE_TOL = 1e-12


def _binomial_log_matrix(p0: np.ndarray, n: int) -> np.ndarray:
    """log Binom(j; n, p_k) as a (K, n + 1) matrix."""
    p0 = clamp_probability(p0, config.PROBABILITY_EPS)
    j = np.arange(n + 1)
    log_comb = special.gammaln(n + 1) - special.gammaln(j + 1) - special.gammaln(n - j + 1)
    return log_comb[None, :] + j[None, :] * np.log(p0)[:, None] + (n - j)[None, :] * np.log1p(-p0)[:, None]


def _entropy_rows(log_pmf: np.ndarray) -> np.ndarray:
    return -np.sum(np.exp(log_pmf) * log_pmf, axis=-1)


def kl_gain_from_probabilities(weights: np.ndarray, p0: np.ndarray, n: int) -> float:
    """
    Mutual information of an n-shot batch for particles with outcome-0 probabilities p0.

    Args:
        weights: Particle weights
        p0: Particle probabilities
        n: Shots

    Returns:
        Expected KL gain >= 0
    """
    log_pmf = _binomial_log_matrix(p0, n)
    marginal = weights @ np.exp(log_pmf)
    positive = marginal > 0.0
    marginal_entropy = -float(np.sum(marginal[positive] * np.log(marginal[positive])))
    conditional_entropy = float(weights @ _entropy_rows(log_pmf))
    return max(marginal_entropy - conditional_entropy, 0.0)


def expected_kl_gain(ensemble: ParticleEnsemble, t: float, n: int) -> float:
    """
    Expected KL divergence between posterior and prior for n shots at time t.

    Args:
        ensemble: Current prior
        t: Candidate time > 0
        n: Shots per step >= 1

    Returns:
        Gain >= 0; 0 when the likelihood does not depend on the particle
    """
    is_valid, error = validate_integer_param(n, min_val=1)
    if not is_valid:
        raise ValidationError("Invalid shots per step", [{"n": error}])
    return kl_gain_from_probabilities(ensemble.weights, particle_probabilities(ensemble, t), int(n))


def expected_kl_gains(ensemble: ParticleEnsemble, candidates: Sequence[float], n: int) -> np.ndarray:
    """Expected gains for every candidate time."""
    return np.array([expected_kl_gain(ensemble, t, n) for t in candidates])


def select_time(ensemble: ParticleEnsemble, candidates: Sequence[float], n: int) -> float:
    """
    Candidate time with the largest expected gain; ties go to the earliest candidate.

    Args:
        ensemble: Current prior
        candidates: Nonempty candidate times
        n: Shots per step

    Returns:
        Selected time
    """
    candidates = list(candidates)
    if not candidates:
        raise ValidationError("Empty candidate grid", [{"candidates": "needs at least one time"}])
    gains = expected_kl_gains(ensemble, candidates, n)
    best = float(np.max(gains))
    ties = [t for t, gain in zip(candidates, gains) if gain >= best - TIE_TOL]
    return float(min(ties))


def candidate_grid(t2_center: float, points: Optional[int] = None, low: Optional[float] = None,
                   high: Optional[float] = None) -> np.ndarray:
    """
    Log-spaced candidate times in [low, high] T2_center.

    Args:
        t2_center: Scale of the grid
        points: Grid size (default from config.PROTOCOL_DEFAULTS)
        low, high: Grid ends in units of t2_center

    Returns:
        Increasing array of candidate times
    """
    defaults = config.PROTOCOL_DEFAULTS
    points = defaults["grid_points"] if points is None else points
    low = defaults["grid_low"] if low is None else low
    high = defaults["grid_high"] if high is None else high
    grid = log_grid(low * t2_center, high * t2_center, points)
    is_valid, error = validate_time_list(grid.tolist())
    if not is_valid:
        raise ValidationError("Invalid candidate grid", [{"grid": error}])
    return grid
