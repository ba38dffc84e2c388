"""
Cost functions of the frequentist estimators.

All costs work on raw parameter arrays of one family so that optimizers can
call them without building model objects; nll_cost and wls_cost accept a
ParamVector or a model for direct use.
"""
from typing import Tuple, Type, Union

import numpy as np

import config
from dephasing_tomography.core.model_factory import model_class
from dephasing_tomography.core.param_vector import ParamVector
from dephasing_tomography.measurement.dataset import DataSet
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.math_utils import clamp_probability

Theta = Union[ParamVector, AbstractNoiseModel]


def resolve_theta(theta: Theta) -> Tuple[Type[AbstractNoiseModel], np.ndarray]:
    """Split a ParamVector or model into (family class, parameter array)."""
    if isinstance(theta, AbstractNoiseModel):
        return type(theta), theta.as_array()
    return model_class(theta.kind), theta.as_array()


def probabilities(cls: Type[AbstractNoiseModel], params: np.ndarray, times: np.ndarray,
                  eps: float = config.PROBABILITY_EPS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Clamped outcome-0 probabilities and their parameter gradients.

    Args:
        cls: Model family
        params: Parameter array of shape (n,)
        times: Measurement times
        eps: Probability clamp

    Returns:
        Tuple of (p0 of shape (m,), grad of shape (m, n))
    """
    attenuation = cls.batch_attenuation(params, times)
    decay = np.exp(-attenuation)
    p0 = clamp_probability(0.5 * (1.0 + decay), eps)
    grad = -0.5 * decay[:, None] * cls.batch_grad_attenuation(params, times)
    return p0, grad


def nll_value_and_grad(cls: Type[AbstractNoiseModel], params: np.ndarray, times: np.ndarray,
                       counts0: np.ndarray, counts1: np.ndarray,
                       eps: float = config.PROBABILITY_EPS) -> Tuple[float, np.ndarray]:
    """
    Negative log-likelihood -sum_i (N_i0 log p_i + N_i1 log(1 - p_i)) and its gradient.
    """
    p0, grad_p = probabilities(cls, params, times, eps)
    p1 = 1.0 - p0
    value = -float(np.sum(counts0 * np.log(p0) + counts1 * np.log(p1)))
    score = counts0 / p0 - counts1 / p1
    return value, -(score @ grad_p)


def nll_cost(theta: Theta, data: DataSet) -> float:
    """
    Ramsey negative log-likelihood -sum_i N_i sum_m f_i(m) log p_i(m | theta).

    Args:
        theta: Parameters (ParamVector or model)
        data: Measurement records

    Returns:
        Cost value; finite thanks to the probability clamp
    """
    cls, params = resolve_theta(theta)
    value, _ = nll_value_and_grad(cls, params, data.times, data.counts0, data.counts1)
    return value


def wls_residuals_and_jacobian(cls: Type[AbstractNoiseModel], params: np.ndarray, times: np.ndarray,
                               shots: np.ndarray, frequencies: np.ndarray,
                               eps: float = config.PROBABILITY_EPS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Standardized residuals (f_i - p_i)/sigma_i and their Jacobian.

    sigma_i^2 = max(p_i (1 - p_i), eps)/N_i is taken at the current iterate.
    """
    p0, grad_p = probabilities(cls, params, times, eps)
    variance = p0 * (1.0 - p0)
    floored = variance <= eps
    spread = np.sqrt(np.where(floored, eps, variance))
    root_n = np.sqrt(shots)
    diff = frequencies - p0
    residuals = root_n * diff / spread
    # d spread / dp vanishes where the floor is active
    d_spread = np.where(floored, 0.0, (1.0 - 2.0 * p0) / (2.0 * spread))
    factor = -root_n * (1.0 / spread + diff * d_spread / (spread * spread))
    return residuals, factor[:, None] * grad_p


def wls_cost(theta: Theta, data: DataSet) -> float:
    """
    Weighted least squares sum_i (f_i(0) - p_i(0 | theta))^2 / sigma_i^2.

    Args:
        theta: Parameters (ParamVector or model)
        data: Measurement records

    Returns:
        Cost value; 0 exactly when every frequency matches its probability
    """
    cls, params = resolve_theta(theta)
    residuals, _ = wls_residuals_and_jacobian(cls, params, data.times, data.shots, data.frequencies)
    return float(residuals @ residuals)


def entropy_baseline(data: DataSet) -> float:
    """sum_i N_i H(f_i): the NLL value of a model reproducing every frequency."""
    f0 = clamp_probability(data.frequencies, config.PROBABILITY_EPS)
    return -float(np.sum(data.shots * (f0 * np.log(f0) + (1.0 - f0) * np.log(1.0 - f0))))
