"""
Fisher information, asymptotic covariance and error propagation.

For a binary Ramsey outcome the per-shot Fisher information at time t is the
rank-one matrix

    I_jk(t) = (d_j p)(d_k p) / (p (1 - p)),   d_j p = -(1/2) e^{-Gamma(t)} d_j Gamma(t)

and the maximum-likelihood covariance is asymptotically the inverse of the
shot-weighted sum sum_i N_i I(t_i).
"""
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

import config
from dephasing_tomography.measurement.schedule import Schedule
from dephasing_tomography.noise_models.base import AbstractNoiseModel, as_times
from dephasing_tomography.utils.exceptions import (
    SingularInformationError,
    SingularMatrixError,
    ValidationError,
)
from dephasing_tomography.utils.math_utils import symmetrize

# Relative eigenvalue floor below which a matrix counts as singular
SINGULAR_RTOL = 1e-12

ScheduleLike = Union[Schedule, Iterable[Sequence[float]]]


def _schedule_arrays(schedule: ScheduleLike) -> Tuple[np.ndarray, np.ndarray]:
    # raw pairs may repeat times, which Schedule itself forbids
    if isinstance(schedule, Schedule):
        return schedule.times_array(), schedule.shots_array().astype(float)
    pairs = [tuple(pair) for pair in schedule]
    if not pairs:
        raise ValidationError("Empty schedule", [{"schedule": "needs at least one entry"}])
    times = as_times([p[0] for p in pairs], allow_zero=False)
    return times, np.array([p[1] for p in pairs], dtype=float)


def probability_gradients(model: AbstractNoiseModel, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Outcome-0 probabilities and their gradients at several times.

    Args:
        model: Noise model
        times: Array of m times

    Returns:
        Tuple of (p of shape (m,), grad of shape (m, n))
    """
    times = np.atleast_1d(as_times(times))
    cls, params = type(model), model.as_array()
    decay = np.exp(-cls.batch_attenuation(params, times))
    grad = -0.5 * decay[:, None] * cls.batch_grad_attenuation(params, times)
    return 0.5 * (1.0 + decay), grad


def fisher_matrices(model: AbstractNoiseModel, times: np.ndarray,
                    eps: float = config.PROBABILITY_EPS) -> np.ndarray:
    """
    Per-shot Fisher matrices at many times, with p(1 - p) floored at eps.

    Args:
        model: Noise model
        times: Array of m times

    Returns:
        Array of shape (m, n, n)
    """
    p, grad = probability_gradients(model, times)
    variance = np.maximum(p * (1.0 - p), eps)
    return grad[:, :, None] * grad[:, None, :] / variance[:, None, None]


def fisher_matrix(model: AbstractNoiseModel, t: float) -> np.ndarray:
    """
    Per-shot Fisher information matrix at one time.

    Args:
        model: Noise model
        t: Time > 0

    Returns:
        Symmetric (n, n) matrix of rank <= 1

    Raises:
        SingularInformationError: If p(0) is within eps of 0 or 1
    """
    p, grad = probability_gradients(model, np.array([float(t)]))
    variance = float(p[0] * (1.0 - p[0]))
    if variance <= config.PROBABILITY_EPS:
        raise SingularInformationError(
            "zero Fisher information: outcome probability is deterministic",
            {"t": float(t), "p0": float(p[0])}
        )
    return np.outer(grad[0], grad[0]) / variance


def fisher_sum(model: AbstractNoiseModel, schedule: ScheduleLike) -> np.ndarray:
    """
    Shot-weighted Fisher information sum_i N_i I(t_i).

    Args:
        model: Noise model
        schedule: Schedule or iterable of (t, N) pairs

    Returns:
        Symmetric (n, n) matrix
    """
    times, shots = _schedule_arrays(schedule)
    return symmetrize(np.einsum("i,ijk->jk", shots, fisher_matrices(model, times)))


def check_nonsingular(matrix: np.ndarray, what: str) -> None:
    """
    Raise SingularMatrixError when a symmetric matrix is numerically singular.

    Args:
        matrix: Symmetric matrix
        what: Name used in diagnostics
    """
    eigenvalues = np.linalg.eigvalsh(symmetrize(matrix))
    largest = float(np.max(np.abs(eigenvalues)))
    if largest == 0.0 or float(np.min(eigenvalues)) <= SINGULAR_RTOL * largest:
        raise SingularMatrixError(diagnostics={"matrix": what, "eigenvalues": eigenvalues.tolist()})


def asymptotic_cov(model: AbstractNoiseModel, schedule: ScheduleLike) -> np.ndarray:
    """
    Asymptotic covariance [sum_i N_i I(t_i)]^-1 of the maximum-likelihood estimate.

    Args:
        model: Noise model at which the information is evaluated
        schedule: Schedule or iterable of (t, N) pairs

    Returns:
        Symmetric (n, n) covariance

    Raises:
        SingularMatrixError: If the weighted Fisher sum is singular (infinite covariance)
    """
    information = fisher_sum(model, schedule)
    check_nonsingular(information, "fisher_sum")
    return symmetrize(np.linalg.inv(information))


def sensitivity_matrix(model: AbstractNoiseModel, times: Sequence[float]) -> np.ndarray:
    """
    Linear map from frequency deviations to parameter deviations.

    With n times for an n-parameter family the frequencies determine the
    parameters locally; M is the inverse of the Jacobian dp(t_i)/dtheta_j.

    Args:
        model: Noise model
        times: Exactly n measurement times

    Returns:
        (n, n) matrix M with delta_theta = M delta_f

    Raises:
        ValidationError: If the number of times differs from the parameter count
        SingularMatrixError: If the Jacobian is singular (e.g. coincident times)
    """
    times = np.atleast_1d(as_times(times, allow_zero=False))
    n = model.dimension()
    if times.size != n:
        raise ValidationError(f"{model.KIND} needs exactly {n} times",
                              [{"times": f"got {times.size} times"}])
    _, jacobian = probability_gradients(model, times)
    singular_values = np.linalg.svd(jacobian, compute_uv=False)
    if singular_values[-1] <= SINGULAR_RTOL * singular_values[0]:
        raise SingularMatrixError(diagnostics={"matrix": "jacobian",
                                               "singular_values": singular_values.tolist()})
    return np.linalg.inv(jacobian)


def propagated_covariance(model: AbstractNoiseModel, schedule: ScheduleLike) -> np.ndarray:
    """
    Covariance M diag(sigma_f^2) M^T propagated from binomial frequency noise.

    Args:
        model: Noise model
        schedule: Exactly n entries (t_i, N_i)

    Returns:
        Symmetric (n, n) covariance
    """
    times, shots = _schedule_arrays(schedule)
    sensitivity = sensitivity_matrix(model, times)
    p, _ = probability_gradients(model, times)
    variances = p * (1.0 - p) / shots
    return symmetrize(sensitivity @ np.diag(variances) @ sensitivity.T)
