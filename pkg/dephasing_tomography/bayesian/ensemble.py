"""
Weighted particle ensembles representing a prior or posterior.
"""
from dataclasses import dataclass
from typing import Tuple, Type
import warnings

import numpy as np

from dephasing_tomography.core.model_factory import model_class
from dephasing_tomography.core.param_vector import ParamVector
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.exceptions import UnreliableStatisticsWarning, ValidationError
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.math_utils import weighted_mean_cov

# Weights must sum to one within this tolerance
WEIGHT_TOL = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ParticleEnsemble:
    """
    Particles theta_k with normalized weights w_k inside a prior support box.

    Instances are immutable: every update returns a new ensemble.

    Attributes:
        kind: Model family
        particles: Array of shape (K, n)
        weights: Array of shape (K,), summing to one
        low, high: Prior support box
        step: Number of Bayes updates applied
    """

    kind: str
    particles: np.ndarray
    weights: np.ndarray
    low: np.ndarray
    high: np.ndarray
    step: int = 0

    def __post_init__(self):
        cls = model_class(self.kind)
        particles = _frozen(np.atleast_2d(self.particles))
        weights = _frozen(self.weights)
        low, high = _frozen(self.low), _frozen(self.high)
        errors = []
        if particles.shape[1] != cls.dimension():
            errors.append({"particles": f"Expected {cls.dimension()} columns, got {particles.shape[1]}"})
        elif low.shape != (cls.dimension(),) or high.shape != low.shape or np.any(low > high):
            errors.append({"low": "Support box needs one ordered bound pair per parameter"})
        elif np.any(particles < low) or np.any(particles > high):
            errors.append({"particles": "All particles must lie inside the support box"})
        if particles.shape[0] < 2 or weights.shape != (particles.shape[0],):
            errors.append({"weights": "Need at least 2 particles and one weight per particle"})
        elif np.any(weights < 0.0) or abs(float(weights.sum()) - 1.0) > WEIGHT_TOL:
            errors.append({"weights": f"Weights must be nonnegative and sum to 1, got {float(weights.sum())}"})
        if errors:
            raise ValidationError("Invalid particle ensemble", errors)
        object.__setattr__(self, "kind", cls.KIND)
        object.__setattr__(self, "particles", particles)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def model_class(self) -> Type[AbstractNoiseModel]:
        return model_class(self.kind)

    @property
    def size(self) -> int:
        return self.particles.shape[0]

    @property
    def dimension(self) -> int:
        return self.particles.shape[1]

    def ess(self) -> float:
        """Effective sample size 1/sum w_k^2."""
        return float(1.0 / np.sum(self.weights * self.weights))

    def with_weights(self, weights: np.ndarray, step: int) -> "ParticleEnsemble":
        return ParticleEnsemble(self.kind, self.particles, weights, self.low, self.high, step)

    def with_particles(self, particles: np.ndarray, weights: np.ndarray) -> "ParticleEnsemble":
        return ParticleEnsemble(self.kind, particles, weights, self.low, self.high, self.step)

    def mean_and_cov(self) -> Tuple[np.ndarray, np.ndarray]:
        return weighted_mean_cov(self.particles, self.weights)


def _warn_if_unreliable(ensemble: ParticleEnsemble) -> None:
    ess = ensemble.ess()
    if ess < 2.0:
        message = f"Posterior statistics from ESS = {ess:.3g} particles are unreliable"
        warnings.warn(message, UnreliableStatisticsWarning, stacklevel=3)
        logger.warning(message, "bayes")


def posterior_mean(ensemble: ParticleEnsemble) -> ParamVector:
    """
    Weighted mean of the particles.

    Args:
        ensemble: Particle ensemble

    Returns:
        ParamVector of the mean; warns with UnreliableStatisticsWarning when ESS < 2
    """
    _warn_if_unreliable(ensemble)
    mean, _ = ensemble.mean_and_cov()
    return ParamVector.from_array(ensemble.kind, mean)


def posterior_cov(ensemble: ParticleEnsemble) -> np.ndarray:
    """
    Weighted covariance sum_k w_k (theta_k - mean)(theta_k - mean)^T.

    Args:
        ensemble: Particle ensemble

    Returns:
        Symmetric positive semidefinite (n, n) matrix
    """
    _warn_if_unreliable(ensemble)
    _, cov = ensemble.mean_and_cov()
    return cov
