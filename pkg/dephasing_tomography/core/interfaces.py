"""
Abstract interfaces for core components.

This module defines the abstract base class shared by every noise model family
and the type aliases used across the package.
"""
from abc import ABC, abstractmethod
from typing import Dict, Any, Optional, List, Tuple, Union

import numpy as np

# Time arguments accept scalars or arrays and broadcast
TimeLike = Union[float, np.ndarray]
FrequencyLike = Union[float, np.ndarray]

# Parameter types
ParamValue = Union[str, int, float, bool, None]
ParamDict = Dict[str, Any]

# Per-parameter (low, high) box
Bounds = Tuple[Tuple[float, ...], Tuple[float, ...]]

# Validation types
ValidationError = Dict[str, str]
ValidationResult = Tuple[bool, Optional[List[ValidationError]]]


class NoiseModelInterface(ABC):
    """Abstract interface for stationary dephasing noise models."""

    @abstractmethod
    def psd(self, omega: FrequencyLike) -> np.ndarray:
        """Power spectral density S(omega)."""
        pass

    @abstractmethod
    def autocorr(self, dt: TimeLike) -> np.ndarray:
        """Noise autocorrelation C(dt)."""
        pass

    @abstractmethod
    def gamma(self, t: TimeLike) -> np.ndarray:
        """Time-dependent dephasing rate gamma(t)."""
        pass

    @abstractmethod
    def attenuation(self, t: TimeLike) -> np.ndarray:
        """Ramsey attenuation factor Gamma(t) = 2 * integral of gamma."""
        pass

    @abstractmethod
    def grad_attenuation(self, t: TimeLike) -> np.ndarray:
        """Partial derivatives of Gamma(t) in the family's parameter order."""
        pass

    @property
    @abstractmethod
    def s0(self) -> float:
        """Static spectral weight S(0)."""
        pass

    @abstractmethod
    def to_dict(self) -> ParamDict:
        """JSON-ready representation with a 'kind' tag."""
        pass
