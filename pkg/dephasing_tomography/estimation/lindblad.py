"""
Closed-form Ramsey estimator for white (Lindblad) noise.

With Gamma(t) = t/T2 a single measured frequency f0 inverts to
T2 = -t/log(2 f0 - 1), whose variance at N shots is

    Var(T2) = T2^4 (e^{2t/T2} - 1) / (N t^2)

minimized at t = 0.797 T2.
"""
import math

from scipy import optimize

from dephasing_tomography.utils.exceptions import NoSignalError, ValidationError
from dephasing_tomography.utils.validation import validate_integer_param, validate_numeric_param


def _positive(name: str, value: float) -> float:
    is_valid, error = validate_numeric_param(value, min_val=0.0, exclusive_min=True)
    if not is_valid:
        raise ValidationError(f"Invalid {name}", [{name: error}])
    return float(value)


def lindblad_closed_form_fit(f0: float, t: float) -> float:
    """
    Invert one outcome-0 frequency into a T2 estimate.

    Args:
        f0: Measured frequency of outcome 0, in (1/2, 1]
        t: Measurement time > 0

    Returns:
        T2 estimate; math.inf for f0 = 1

    Raises:
        NoSignalError: If f0 <= 1/2
        ValidationError: If f0 > 1 or t <= 0
    """
    t = _positive("t", t)
    is_valid, error = validate_numeric_param(f0, min_val=0.0, max_val=1.0)
    if not is_valid:
        raise ValidationError("Invalid frequency", [{"f0": error}])
    if f0 <= 0.5:
        raise NoSignalError("no decay signal: f0 <= 1/2", {"f0": f0, "t": t})
    if f0 == 1.0:
        return math.inf
    return -t / math.log(2.0 * f0 - 1.0)


def lindblad_variance(T2: float, t: float, shots: int) -> float:
    """
    Asymptotic variance of the closed-form T2 estimate.

    Args:
        T2: True decoherence time
        t: Measurement time
        shots: Number of shots

    Returns:
        T2^4 (e^{2t/T2} - 1) / (N t^2)
    """
    T2, t = _positive("T2", T2), _positive("t", t)
    is_valid, error = validate_integer_param(shots, min_val=1)
    if not is_valid:
        raise ValidationError("Invalid shot count", [{"shots": error}])
    return T2 ** 4 * math.expm1(2.0 * t / T2) / (shots * t * t)


def lindblad_optimal_time(T2: float) -> float:
    """
    Measurement time minimizing lindblad_variance, about 0.797 T2.

    The stationarity condition of (e^{2x} - 1)/x^2 is (x - 1) e^{2x} + 1 = 0.
    """
    T2 = _positive("T2", T2)
    x = optimize.brentq(lambda u: (u - 1.0) * math.exp(2.0 * u) + 1.0, 0.1, 2.0, xtol=1e-14)
    return x * T2
