"""
Common mathematical operations.

The phi functions are the building blocks of every closed-form attenuation:
phi1(z) = (1 - e^-z)/z and phi2(z) = (e^-z - 1 + z)/z^2, evaluated for real
or complex arguments without cancellation near z = 0.
"""
from typing import Sequence
import math
import numpy as np

# Below this modulus the phi functions are summed from their Taylor series
_SERIES_RADIUS = 0.5
_SERIES_TERMS = 24


def _phi_series(z: np.ndarray, order: int) -> np.ndarray:
    # sum_k (-z)^k / (k + order)!
    result = np.zeros_like(z)
    for k in reversed(range(_SERIES_TERMS)):
        result = result * (-z) + 1.0 / math.factorial(k + order)
    return result


def _as_array(z) -> np.ndarray:
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        z = z.astype(float)
    return z


def phi1(z) -> np.ndarray:
    """
    Evaluate (1 - e^-z)/z, with phi1(0) = 1.

    Args:
        z: Real or complex argument(s) with nonnegative real part

    Returns:
        Array of the same shape as z
    """
    z = _as_array(z)
    small = np.abs(z) < _SERIES_RADIUS
    with np.errstate(all="ignore"):
        direct = -np.expm1(-z) / z if not np.iscomplexobj(z) else (1.0 - np.exp(-z)) / z
        series = _phi_series(np.where(small, z, 0.0), 1)
    return np.where(small, series, direct)


def phi2(z) -> np.ndarray:
    """
    Evaluate (e^-z - 1 + z)/z^2, with phi2(0) = 1/2.

    Args:
        z: Real or complex argument(s) with nonnegative real part

    Returns:
        Array of the same shape as z
    """
    z = _as_array(z)
    small = np.abs(z) < _SERIES_RADIUS
    with np.errstate(all="ignore"):
        direct = (np.exp(-z) - 1.0 + z) / (z * z)
        series = _phi_series(np.where(small, z, 0.0), 2)
    return np.where(small, series, direct)


def phi2_prime(z) -> np.ndarray:
    """
    Evaluate the derivative of phi2, (phi1(z) - 2 phi2(z))/z, with value -1/6 at 0.

    Args:
        z: Real or complex argument(s) with nonnegative real part

    Returns:
        Array of the same shape as z
    """
    z = _as_array(z)
    small = np.abs(z) < _SERIES_RADIUS
    with np.errstate(all="ignore"):
        direct = (phi1(z) - 2.0 * phi2(z)) / z
        zs = np.where(small, z, 0.0)
        # d/dz sum_k (-z)^k/(k+2)! = -sum_k (k+1) (-z)^k/(k+3)!
        series = np.zeros_like(zs)
        for k in reversed(range(_SERIES_TERMS)):
            series = series * (-zs) - (k + 1) / math.factorial(k + 3)
    return np.where(small, series, direct)


def clamp_probability(p, eps: float) -> np.ndarray:
    """
    Clamp probabilities to [eps, 1 - eps].

    Args:
        p: Probabilities
        eps: Clamp width

    Returns:
        Clamped array
    """
    return np.clip(np.asarray(p, dtype=float), eps, 1.0 - eps)


def det_metric(matrix: np.ndarray) -> float:
    """
    Compute the normalized determinant det(M)^(1/(2n)) of an n x n covariance.

    Args:
        matrix: Symmetric positive semidefinite matrix

    Returns:
        Normalized determinant; 0 for singular input
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    n = matrix.shape[0]
    sign, logdet = np.linalg.slogdet(matrix)
    if sign <= 0:
        return 0.0
    return float(np.exp(logdet / (2 * n)))


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """
    Return the symmetric part of a square matrix.

    Args:
        matrix: Square matrix

    Returns:
        (M + M^T)/2
    """
    matrix = np.asarray(matrix, dtype=float)
    return 0.5 * (matrix + matrix.T)


def log_grid(low: float, high: float, points: int) -> np.ndarray:
    """
    Build a log-spaced grid including both endpoints.

    Args:
        low: First value (> 0)
        high: Last value (> low)
        points: Number of points

    Returns:
        Increasing array of grid values
    """
    return np.geomspace(low, high, points)


def weighted_mean_cov(samples: np.ndarray, weights: Sequence[float]):
    """
    Weighted mean and (biased) weighted covariance of row samples.

    Args:
        samples: Array of shape (K, n)
        weights: Normalized nonnegative weights of length K

    Returns:
        Tuple of (mean of shape (n,), covariance of shape (n, n))
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    weights = np.asarray(weights, dtype=float)
    mean = weights @ samples
    centered = samples - mean
    cov = (centered * weights[:, None]).T @ centered
    return mean, symmetrize(cov)
