"""
Analytic benchmark for adaptive Bayesian estimation of a Lindblad rate.

For white noise with rate gamma (Gamma(t) = 2 gamma t) and a Gaussian prior
N(gamma_hat, sigma^2), one shot at time t changes the posterior variance in
expectation by

    -4 t^2 sigma^4 / (e^{4 gamma_hat t - 4 sigma^2 t^2} - 1)

which is most negative at 2 gamma_hat t = 0.797 when sigma << gamma_hat.
"""
from typing import NamedTuple
import math

import numpy as np
from scipy import optimize

from dephasing_tomography.utils.exceptions import DomainError, ValidationError
from dephasing_tomography.utils.validation import validate_integer_param, validate_numeric_param

# exp() overflows beyond this exponent
MAX_EXPONENT = 700.0


class VarianceUpdate(NamedTuple):
    """Expected posterior variance after one shot."""
    variance: float
    change: float
    overflow: bool


def _positive(name: str, value: float) -> float:
    is_valid, error = validate_numeric_param(value, min_val=0.0, exclusive_min=True)
    if not is_valid:
        raise ValidationError(f"Invalid {name}", [{name: error}])
    return float(value)


def lindblad_variance_update(gamma_hat: float, sigma2: float, t: float) -> VarianceUpdate:
    """
    Expected variance after a single-shot update of a Gaussian prior.

    Args:
        gamma_hat: Prior mean of the rate
        sigma2: Prior variance
        t: Measurement time

    Returns:
        VarianceUpdate; change is -0.0 with overflow=True when the exponent overflows

    Raises:
        DomainError: If 4 gamma_hat t <= 4 sigma2 t^2, where the Gaussian form breaks down
    """
    gamma_hat, sigma2, t = _positive("gamma_hat", gamma_hat), _positive("sigma2", sigma2), _positive("t", t)
    exponent = 4.0 * gamma_hat * t - 4.0 * sigma2 * t * t
    if exponent > MAX_EXPONENT:
        return VarianceUpdate(sigma2, -0.0, True)
    if exponent <= 0.0:
        raise DomainError("Gaussian prior too wide for this time",
                          [{"t": f"need t < gamma_hat/sigma2 = {gamma_hat / sigma2}"}])
    change = -4.0 * t * t * sigma2 * sigma2 / math.expm1(exponent)
    return VarianceUpdate(sigma2 + change, change, False)


def lindblad_optimal_update_time(gamma_hat: float, sigma2: float) -> float:
    """
    Time minimizing the expected variance after one shot.

    Args:
        gamma_hat: Prior mean of the rate
        sigma2: Prior variance

    Returns:
        Optimal time, about 0.797/(2 gamma_hat) for a narrow prior
    """
    gamma_hat, sigma2 = _positive("gamma_hat", gamma_hat), _positive("sigma2", sigma2)
    upper = min(5.0 / gamma_hat, 0.5 * gamma_hat / sigma2)
    result = optimize.minimize_scalar(
        lambda t: lindblad_variance_update(gamma_hat, sigma2, t).change,
        bounds=(1e-9 * upper, upper), method="bounded", options={"xatol": 1e-12 * upper}
    )
    return float(result.x)


def cumulative_lindblad_variance(gamma_hat: float, sigma2: float, steps: int,
                                 shots_per_step: int = 1) -> np.ndarray:
    """
    Expected variance trajectory of an adaptive protocol at the optimal times.

    Every shot of a step is applied at the time optimal for the variance at
    the start of that step.

    Args:
        gamma_hat: Rate (kept fixed)
        sigma2: Initial variance
        steps: Number of steps
        shots_per_step: Shots per step

    Returns:
        Array of variances after each step
    """
    gamma_hat, variance = _positive("gamma_hat", gamma_hat), _positive("sigma2", sigma2)
    for name, value in (("steps", steps), ("shots_per_step", shots_per_step)):
        is_valid, error = validate_integer_param(value, min_val=1)
        if not is_valid:
            raise ValidationError(f"Invalid {name}", [{name: error}])

    history = np.empty(steps)
    for step in range(steps):
        t = lindblad_optimal_update_time(gamma_hat, variance)
        for _ in range(shots_per_step):
            variance = lindblad_variance_update(gamma_hat, variance, t).variance
        history[step] = variance
    return history
