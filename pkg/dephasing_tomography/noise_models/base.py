"""
Abstract base class for all noise model families.

A noise model is an immutable value object holding the parameter vector of one
family. Every physical quantity is implemented once as a batched class method
operating on a parameter array of shape (..., n), so the same code path serves
single-model evaluation over a time grid and particle-ensemble evaluation at a
single time.
"""
from typing import ClassVar, Dict, Any, Sequence, Tuple
import math

import numpy as np

from dephasing_tomography.core.interfaces import NoiseModelInterface, TimeLike, FrequencyLike, ParamDict
from dephasing_tomography.utils.exceptions import DomainError
from dephasing_tomography.utils.validation import validate_numeric_param, raise_if_invalid


def as_times(t: TimeLike, allow_zero: bool = True) -> np.ndarray:
    """
    Convert times to a float array, rejecting negative or non-finite entries.

    Args:
        t: Scalar or array of times
        allow_zero: Whether t = 0 is in the domain

    Returns:
        Float array of times

    Raises:
        DomainError: If any time lies outside the domain
    """
    times = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(times)):
        raise DomainError("Times must be finite", [{"t": "non-finite value"}])
    if allow_zero and np.any(times < 0.0):
        raise DomainError("Times must be nonnegative", [{"t": f"min value {float(np.min(times))}"}])
    if not allow_zero and np.any(times <= 0.0):
        raise DomainError("Times must be strictly positive", [{"t": f"min value {float(np.min(times))}"}])
    return times


class AbstractNoiseModel(NoiseModelInterface):
    """
    Base class for the dephasing noise families.

    Subclasses are frozen dataclasses whose fields are the parameters in
    PARAM_NAMES order, and they implement the batched ``_batch_*`` methods.
    """

    # Family identifier used in serialization
    KIND: ClassVar[str] = "Abstract"

    # Accepted lowercase spellings of KIND
    ALIASES: ClassVar[Tuple[str, ...]] = ()

    # Parameter names in vector order
    PARAM_NAMES: ClassVar[Tuple[str, ...]] = ()

    # Parameters allowed to be exactly zero
    NONNEGATIVE_PARAMS: ClassVar[Tuple[str, ...]] = ()

    # Whether gamma(t) >= 0 holds analytically for every parameter value
    RATE_NONNEGATIVE: ClassVar[bool] = True

    def __post_init__(self):
        errors = []
        for name in self.PARAM_NAMES:
            value = getattr(self, name)
            is_valid, error = validate_numeric_param(
                value,
                min_val=0.0,
                exclusive_min=name not in self.NONNEGATIVE_PARAMS
            )
            if not is_valid:
                errors.append({name: error})
            else:
                object.__setattr__(self, name, float(value))
        raise_if_invalid((not errors, errors or None), f"Invalid {self.KIND} parameters")

    # Batched implementations ---------------------------------------------------------

    @classmethod
    def _batch_psd(cls, params: np.ndarray, omega: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @classmethod
    def _batch_autocorr(cls, params: np.ndarray, dt: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @classmethod
    def _batch_gamma(cls, params: np.ndarray, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @classmethod
    def _batch_attenuation(cls, params: np.ndarray, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @classmethod
    def _batch_grad_attenuation(cls, params: np.ndarray, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @classmethod
    def _batch_s0(cls, params: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # Public batched API --------------------------------------------------------------

    @classmethod
    def dimension(cls) -> int:
        """Number of parameters of the family."""
        return len(cls.PARAM_NAMES)

    @classmethod
    def batch_attenuation(cls, params: np.ndarray, t: TimeLike) -> np.ndarray:
        """
        Evaluate Gamma(t) for many parameter vectors at once.

        Args:
            params: Array of shape (..., n)
            t: Scalar or array of times broadcastable against params[..., 0]

        Returns:
            Attenuation factors with the broadcast shape
        """
        return cls._batch_attenuation(np.asarray(params, dtype=float), as_times(t))

    @classmethod
    def batch_gamma(cls, params: np.ndarray, t: TimeLike) -> np.ndarray:
        """Evaluate gamma(t) for many parameter vectors at once."""
        return cls._batch_gamma(np.asarray(params, dtype=float), as_times(t))

    @classmethod
    def batch_grad_attenuation(cls, params: np.ndarray, t: TimeLike) -> np.ndarray:
        """
        Evaluate the attenuation gradient for many parameter vectors at once.

        Args:
            params: Array of shape (..., n)
            t: Scalar or array of times

        Returns:
            Array with the broadcast shape plus a trailing axis of length n
        """
        return cls._batch_grad_attenuation(np.asarray(params, dtype=float), as_times(t))

    @classmethod
    def batch_t2(cls, params: np.ndarray) -> np.ndarray:
        """Effective decoherence time T2 = 2/S(0) for many parameter vectors."""
        return 2.0 / cls._batch_s0(np.asarray(params, dtype=float))

    # Single-model API ----------------------------------------------------------------

    @property
    def values(self) -> Tuple[float, ...]:
        """Parameter values in PARAM_NAMES order."""
        return tuple(getattr(self, name) for name in self.PARAM_NAMES)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def psd(self, omega: FrequencyLike) -> np.ndarray:
        """
        Power spectral density S(omega).

        Args:
            omega: Angular frequency (scalar or array)

        Returns:
            Spectral density values
        """
        return self._batch_psd(self.as_array(), np.asarray(omega, dtype=float))

    def symmetrized_psd(self, omega: FrequencyLike) -> np.ndarray:
        """Symmetrized spectral density (S(omega) + S(-omega))/2; only this part enters Gamma."""
        omega = np.asarray(omega, dtype=float)
        return 0.5 * (self.psd(omega) + self.psd(-omega))

    def autocorr(self, dt: TimeLike) -> np.ndarray:
        """
        Noise autocorrelation C(dt).

        Args:
            dt: Time lag (scalar or array)

        Returns:
            Autocorrelation values
        """
        return self._batch_autocorr(self.as_array(), np.asarray(dt, dtype=float))

    def gamma(self, t: TimeLike) -> np.ndarray:
        """
        Time-dependent dephasing rate gamma(t).

        Args:
            t: Time(s) >= 0

        Returns:
            Rates with the shape of t

        Raises:
            DomainError: If t < 0
        """
        return self._batch_gamma(self.as_array(), as_times(t))

    def attenuation(self, t: TimeLike) -> np.ndarray:
        """
        Ramsey attenuation factor Gamma(t); coherence decays as e^-Gamma.

        Args:
            t: Time(s) >= 0

        Returns:
            Attenuation factors with the shape of t

        Raises:
            DomainError: If t < 0
        """
        return self._batch_attenuation(self.as_array(), as_times(t))

    def grad_attenuation(self, t: TimeLike) -> np.ndarray:
        """
        Partial derivatives of Gamma(t) with respect to the parameters.

        Args:
            t: Time(s) >= 0

        Returns:
            Array of shape (n,) + shape(t)

        Raises:
            DomainError: If t < 0
        """
        grad = self._batch_grad_attenuation(self.as_array(), as_times(t))
        return np.moveaxis(grad, -1, 0)

    @property
    def s0(self) -> float:
        """Static spectral weight S(0)."""
        return float(self._batch_s0(self.as_array()))

    @property
    def t2(self) -> float:
        """Effective decoherence time T2 = 2/S(0)."""
        return 2.0 / self.s0

    @property
    def correlation_time(self) -> float:
        """Noise correlation time tau_c; zero for white noise."""
        return 0.0

    def spectral_scale(self) -> float:
        """Characteristic angular frequency beyond which the PSD is in its tail."""
        return 0.0

    def spectral_peaks(self) -> Tuple[float, ...]:
        """Nonnegative frequencies where the symmetrized PSD peaks."""
        return (0.0,)

    def auto_horizon(self, envelope_cutoff: float) -> float:
        """
        Integration horizon beyond which the memory envelope is below envelope_cutoff.

        Args:
            envelope_cutoff: Envelope threshold (e.g. 1e-10)

        Returns:
            Horizon time
        """
        if self.correlation_time > 0.0:
            return self.correlation_time * math.log(1.0 / envelope_cutoff)
        return self.t2

    def with_values(self, values: Sequence[float]) -> "AbstractNoiseModel":
        """
        Build a model of the same family with new parameter values.

        Args:
            values: Parameter values in PARAM_NAMES order

        Returns:
            New model instance
        """
        return type(self)(*[float(v) for v in values])

    def to_dict(self) -> ParamDict:
        """
        JSON-ready representation.

        Returns:
            Dictionary with a 'kind' tag and one field per parameter
        """
        data: Dict[str, Any] = {"kind": self.KIND}
        for name in self.PARAM_NAMES:
            data[name] = getattr(self, name)
        return data

    def to_vector(self):
        """Parameter vector tagged with the family."""
        from dephasing_tomography.core.param_vector import ParamVector
        return ParamVector(self.KIND, self.values)
