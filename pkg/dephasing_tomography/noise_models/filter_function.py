"""
Filter-function representation of the dephasing rate and attenuation.

Both quantities are overlaps of the symmetrized spectral density with a
time-dependent filter,

    gamma(t) = (1/2) integral S(omega) f_gamma(omega, t) domega,  f_gamma = (t/2pi) sinc(omega t)
    Gamma(t) = integral S(omega) F_Gamma(omega, t) domega,       F_Gamma = sin^2(omega t/2)/(pi omega^2)

where sinc(x) = sin(x)/x. F_Gamma is (t/2) times a nascent delta of width
2/t, so for long times Gamma(t) -> t S(0)/2. The quadrature routines exist to
cross-validate the closed forms of each family.
"""
from typing import Any, Callable, Dict, List, Optional
import math
import warnings

import numpy as np
from scipy import integrate

import config
from dephasing_tomography.core.interfaces import FrequencyLike
from dephasing_tomography.noise_models.base import AbstractNoiseModel, as_times
from dephasing_tomography.utils.exceptions import NumericalError
from dephasing_tomography.utils.validation import validate_numeric_param, raise_if_invalid


def dephasing_rate_filter(omega: FrequencyLike, t: float) -> np.ndarray:
    """
    Rate filter f_gamma(omega, t) = (t/2pi) sinc(omega t).

    Args:
        omega: Angular frequency (scalar or array)
        t: Time >= 0

    Returns:
        Filter values with the shape of omega
    """
    omega = np.asarray(omega, dtype=float)
    # numpy's sinc is sin(pi x)/(pi x)
    return t / (2.0 * math.pi) * np.sinc(omega * t / math.pi)


def attenuation_filter(omega: FrequencyLike, t: float) -> np.ndarray:
    """
    Attenuation filter F_Gamma(omega, t) = sin^2(omega t/2)/(pi omega^2).

    Args:
        omega: Angular frequency (scalar or array)
        t: Time >= 0

    Returns:
        Filter values with the shape of omega; t^2/(4 pi) at omega = 0
    """
    omega = np.asarray(omega, dtype=float)
    return t * t / (4.0 * math.pi) * np.sinc(omega * t / (2.0 * math.pi)) ** 2


def _settings(overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    settings = dict(config.QUADRATURE_DEFAULTS)
    if overrides:
        settings.update(overrides)
    return settings


def _breakpoints(model: AbstractNoiseModel, t: float, settings: Dict[str, Any]) -> np.ndarray:
    """Panel edges on [0, cutoff]: filter lobes 2 pi k/t plus the PSD peaks."""
    lobe = 2.0 * math.pi / t
    cutoff = max(settings["lobes"] * lobe, settings["feature_widths"] * model.spectral_scale())
    panels = min(int(math.ceil(cutoff / lobe)), settings["max_panels"])
    edges = np.linspace(0.0, cutoff, panels + 1)
    peaks = [p for p in model.spectral_peaks() if 0.0 < p < cutoff]
    return np.unique(np.concatenate([edges, peaks]))


def _integrate(quantity: str, model: AbstractNoiseModel, t: float,
               panel_integrand: Callable[[float], float],
               tail: Callable[[float, float, Dict[str, Any]], List[tuple]],
               settings: Dict[str, Any]) -> float:
    edges = _breakpoints(model, t, settings)
    epsabs = settings["tol"] / (len(edges) + 2)
    total = 0.0
    abserr = 0.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        for low, high in zip(edges[:-1], edges[1:]):
            value, error = integrate.quad(panel_integrand, low, high, epsabs=epsabs,
                                          epsrel=0.0, limit=settings["limit"])
            total += value
            abserr += error
        for value, error in tail(edges[-1], epsabs, settings):
            total += value
            abserr += error

    problems = [str(w.message) for w in caught if issubclass(w.category, integrate.IntegrationWarning)]
    if problems:
        raise NumericalError(
            f"{quantity} quadrature did not converge",
            {"kind": model.KIND, "t": t, "panels": len(edges) - 1,
             "estimate": total, "abserr": abserr, "messages": problems}
        )
    return total


def attenuation_quadrature(model: AbstractNoiseModel, t: float, tol: Optional[float] = None,
                           settings: Optional[Dict[str, Any]] = None) -> float:
    """
    Numerically integrate the symmetrized PSD against the attenuation filter.

    The finite range is split at filter-lobe boundaries and PSD peaks; beyond
    the last panel the integrand S(omega)(1 - cos(omega t))/(pi omega^2) is
    handled by an infinite-range rule for the smooth part and a Fourier rule
    for the cosine part.

    Args:
        model: Noise model
        t: Time > 0
        tol: Absolute tolerance (default from config.QUADRATURE_DEFAULTS)
        settings: Optional overrides of config.QUADRATURE_DEFAULTS

    Returns:
        Gamma(t)

    Raises:
        DomainError: If t <= 0
        ValidationError: If tol <= 0
        NumericalError: If QUADPACK reports non-convergence
    """
    t = float(as_times(t, allow_zero=False))
    settings = _settings(settings)
    if tol is not None:
        settings["tol"] = tol
    is_valid, error = validate_numeric_param(settings["tol"], min_val=0.0, exclusive_min=True)
    raise_if_invalid((is_valid, [{"tol": error}] if error else None), "Invalid quadrature tolerance")

    psd = model.symmetrized_psd

    def panel(omega):
        # both signs of omega folded onto [0, inf)
        return 2.0 * float(psd(omega)) * float(attenuation_filter(omega, t))

    def tail(cutoff, epsabs, opts):
        smooth = integrate.quad(lambda w: float(psd(w)) / (math.pi * w * w), cutoff, np.inf,
                                epsabs=epsabs, epsrel=0.0, limit=opts["limit"])
        oscillating = integrate.quad(lambda w: float(psd(w)) / (math.pi * w * w), cutoff, np.inf,
                                     weight="cos", wvar=t, epsabs=epsabs, limlst=100)
        return [smooth, (-oscillating[0], oscillating[1])]

    return _integrate("attenuation", model, t, panel, tail, settings)


def gamma_quadrature(model: AbstractNoiseModel, t: float, tol: Optional[float] = None,
                     settings: Optional[Dict[str, Any]] = None) -> float:
    """
    Numerically integrate the symmetrized PSD against the rate filter.

    Args:
        model: Noise model
        t: Time > 0
        tol: Absolute tolerance (default from config.QUADRATURE_DEFAULTS)
        settings: Optional overrides of config.QUADRATURE_DEFAULTS

    Returns:
        gamma(t)

    Raises:
        DomainError: If t <= 0
        NumericalError: If QUADPACK reports non-convergence
    """
    t = float(as_times(t, allow_zero=False))
    settings = _settings(settings)
    if tol is not None:
        settings["tol"] = tol
    is_valid, error = validate_numeric_param(settings["tol"], min_val=0.0, exclusive_min=True)
    raise_if_invalid((is_valid, [{"tol": error}] if error else None), "Invalid quadrature tolerance")

    psd = model.symmetrized_psd

    def panel(omega):
        return float(psd(omega)) * float(dephasing_rate_filter(omega, t))

    def tail(cutoff, epsabs, opts):
        # (1/2pi) S(omega) sin(omega t)/omega, conditionally convergent for flat spectra
        oscillating = integrate.quad(lambda w: float(psd(w)) / (2.0 * math.pi * w), cutoff, np.inf,
                                     weight="sin", wvar=t, epsabs=epsabs, limlst=100)
        return [oscillating]

    return _integrate("rate", model, t, panel, tail, settings)
