"""
White (delta-correlated) dephasing noise: the Lindblad limit with a constant rate.
"""
from dataclasses import dataclass

import numpy as np

from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.exceptions import UnsupportedOperationError


@dataclass(frozen=True)
class White(AbstractNoiseModel):
    """
    Flat spectrum S(omega) = 2/T2, constant rate gamma = 1/(2 T2) and Gamma(t) = t/T2.
    """

    T2: float

    KIND = "White"
    ALIASES = ("white", "lindblad")
    PARAM_NAMES = ("T2",)

    @classmethod
    def _batch_s0(cls, params):
        return 2.0 / params[..., 0]

    @classmethod
    def _batch_psd(cls, params, omega):
        return np.broadcast_to(2.0 / params[..., 0], np.broadcast(params[..., 0], omega).shape).copy()

    @classmethod
    def _batch_autocorr(cls, params, dt):
        raise UnsupportedOperationError("autocorrelation (Dirac delta)", cls.KIND)

    @classmethod
    def _batch_gamma(cls, params, t):
        t2 = params[..., 0]
        return np.broadcast_to(0.5 / t2, np.broadcast(t2, t).shape).copy()

    @classmethod
    def _batch_attenuation(cls, params, t):
        return t / params[..., 0]

    @classmethod
    def _batch_grad_attenuation(cls, params, t):
        t2 = params[..., 0]
        return (-t / (t2 * t2))[..., None]
