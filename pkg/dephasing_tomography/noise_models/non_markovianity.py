"""
Non-Markovianity measures of the dephasing map.

Both measures integrate over the recoherence windows where gamma(t) < 0:

    n_cp = integral (|gamma| - gamma) dt          = sum over windows of Gamma(a) - Gamma(b)
    n_td = -integral_{gamma < 0} dp/dt dt         = sum over windows of p(a) - p(b)

with p(t) = (1 - e^{-Gamma(t)})/2 the phase-flip probability, whose
derivative is gamma(t) e^{-Gamma(t)}. The antiderivatives are exact, so the
only numerical work is locating the sign changes of gamma.
"""
from typing import Any, Dict, List, Optional, Tuple, Union
import math

import numpy as np
from scipy import optimize

import config
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.noise_models.displaced_lorentzian import DisplacedLorentzian
from dephasing_tomography.utils.exceptions import NumericalError
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.validation import validate_numeric_param, raise_if_invalid

Horizon = Union[float, str, None]


def _settings(overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    settings = dict(config.NON_MARKOVIANITY_DEFAULTS)
    if overrides:
        settings.update(overrides)
    return settings


def resolve_horizon(model: AbstractNoiseModel, t_max: Horizon = None,
                    settings: Optional[Dict[str, Any]] = None) -> float:
    """
    Resolve an integration horizon, expanding None or "auto".

    Args:
        model: Noise model
        t_max: Horizon, or None/"auto" for the envelope cutoff horizon
        settings: Optional overrides of config.NON_MARKOVIANITY_DEFAULTS

    Returns:
        Horizon time > 0
    """
    if t_max is None or t_max == "auto":
        return model.auto_horizon(_settings(settings)["envelope_cutoff"])
    is_valid, error = validate_numeric_param(t_max, min_val=0.0, exclusive_min=True)
    raise_if_invalid((is_valid, [{"t_max": error}] if error else None), "Invalid horizon")
    return float(t_max)


def _scalar_gamma(model: AbstractNoiseModel):
    return lambda t: float(model.gamma(t))


def negative_rate_intervals(model: AbstractNoiseModel, t_max: Horizon = None,
                            settings: Optional[Dict[str, Any]] = None) -> List[Tuple[float, float]]:
    """
    Locate the recoherence windows of a model on [0, t_max].

    gamma is sampled with a fixed number of points per oscillation period and
    every bracketed sign change is polished with Brent's method.

    Args:
        model: Noise model
        t_max: Horizon, or None/"auto"
        settings: Optional overrides of config.NON_MARKOVIANITY_DEFAULTS

    Returns:
        Sorted list of (start, end) windows with gamma < 0 inside

    Raises:
        NumericalError: If a sign change cannot be polished
    """
    settings = _settings(settings)
    horizon = resolve_horizon(model, t_max, settings)
    if model.RATE_NONNEGATIVE:
        return []

    period = horizon
    if isinstance(model, DisplacedLorentzian) and model.delta_c > 0.0:
        period = 2.0 * math.pi / model.delta_c
    points = int(math.ceil(horizon / period * settings["points_per_period"])) + 1
    points = max(points, settings["min_grid_points"])
    if points > settings["max_grid_points"]:
        logger.warning(f"Sign-change grid capped at {settings['max_grid_points']} points "
                       f"(requested {points})", "noise")
        points = settings["max_grid_points"]

    grid = np.linspace(0.0, horizon, points)
    negative = model.gamma(grid) < 0.0
    if not np.any(negative):
        return []

    rate = _scalar_gamma(model)

    def polish(low: float, high: float) -> float:
        try:
            return optimize.brentq(rate, low, high, xtol=settings["root_xtol"])
        except (ValueError, RuntimeError) as e:
            raise NumericalError("Failed to polish a sign change of gamma",
                                 {"bracket": (low, high), "reason": str(e)}) from e

    intervals = []
    start = None
    for index in range(1, points):
        if negative[index] and not negative[index - 1]:
            start = polish(grid[index - 1], grid[index])
        elif negative[index - 1] and not negative[index]:
            intervals.append((start, polish(grid[index - 1], grid[index])))
            start = None
    if start is not None:
        intervals.append((start, horizon))
    return intervals


def n_cp(model: AbstractNoiseModel, t_max: Horizon = None,
         settings: Optional[Dict[str, Any]] = None) -> float:
    """
    Divisibility measure: twice the integrated negative part of gamma.

    Args:
        model: Noise model
        t_max: Horizon, or None/"auto"
        settings: Optional overrides of config.NON_MARKOVIANITY_DEFAULTS

    Returns:
        Measure >= 0; exactly 0 when gamma never goes negative
    """
    total = 0.0
    for start, end in negative_rate_intervals(model, t_max, settings):
        total += float(model.attenuation(start) - model.attenuation(end))
    return max(total, 0.0)


def n_td(model: AbstractNoiseModel, t_max: Horizon = None,
         settings: Optional[Dict[str, Any]] = None) -> float:
    """
    Trace-distance measure: total decrease of the phase-flip probability.

    Args:
        model: Noise model
        t_max: Horizon, or None/"auto"
        settings: Optional overrides of config.NON_MARKOVIANITY_DEFAULTS

    Returns:
        Measure >= 0; zero exactly when n_cp is zero
    """
    total = 0.0
    for start, end in negative_rate_intervals(model, t_max, settings):
        # factored so the difference survives when both flips round to 1/2
        g_start, g_end = model.attenuation(np.array([start, end]))
        total += float(0.5 * np.exp(-g_start) * np.expm1(g_start - g_end))
    return max(total, 0.0)


def markovian_boundary(kappa: float, tol: Optional[float] = None,
                       settings: Optional[Dict[str, Any]] = None) -> float:
    """
    Smallest detuning at which the Displaced-Lorentzian rate first touches zero.

    The minimum of gamma over t > 0 sits at delta_c t = 3 pi/2, so the boundary
    is the root in delta_c of gamma evaluated at that trough.

    Args:
        kappa: Mode linewidth > 0
        tol: Absolute tolerance on delta_c (default from config)
        settings: Optional overrides of config.NON_MARKOVIANITY_DEFAULTS

    Returns:
        Boundary detuning (about 1.82 kappa)

    Raises:
        ValidationError: If kappa <= 0
        NumericalError: If the bracket does not contain a sign change
    """
    settings = _settings(settings)
    is_valid, error = validate_numeric_param(kappa, min_val=0.0, exclusive_min=True)
    raise_if_invalid((is_valid, [{"kappa": error}] if error else None), "Invalid linewidth")
    kappa = float(kappa)
    tol = settings["boundary_tol"] if tol is None else tol

    def trough_rate(delta_c: float) -> float:
        # the sign is independent of g2n, so g2n = 1
        model = DisplacedLorentzian(g2n=1.0, kappa=kappa, delta_c=delta_c)
        return float(model.gamma(model.first_trough_time()))

    low, high = (factor * kappa for factor in settings["boundary_bracket"])
    f_low, f_high = trough_rate(low), trough_rate(high)
    if f_low * f_high > 0.0:
        raise NumericalError("Markovian boundary is not bracketed",
                             {"bracket": (low, high), "values": (f_low, f_high)})
    boundary = optimize.brentq(trough_rate, low, high, xtol=tol)
    logger.debug(f"Markovian boundary for kappa={kappa}: delta_c={boundary}", "noise")
    return boundary
