"""
Ornstein-Uhlenbeck dephasing noise.

The classical OU process with diffusion constant c and correlation time tau_c
has autocorrelation (c tau_c/2) e^{-|dt|/tau_c} and a Lorentzian spectrum
S(omega) = c tau_c^2/(1 + (omega tau_c)^2). The model is stored as
(T2, tau_c) with c = 2/(T2 tau_c^2), so that S(0) = 2/T2.

With u = t/tau_c the closed forms are

    gamma(t) = (1/(2 T2)) (1 - e^{-u})
    Gamma(t) = (1/T2) (t - tau_c (1 - e^{-u})) = t^2 phi2(u) / (T2 tau_c)

where phi2 is evaluated without cancellation at small u.
"""
from dataclasses import dataclass

import numpy as np

from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.math_utils import phi1, phi2, phi2_prime


@dataclass(frozen=True)
class OrnsteinUhlenbeck(AbstractNoiseModel):
    """
    Classical Ornstein-Uhlenbeck noise parametrized by (T2, tau_c).
    """

    T2: float
    tau_c: float

    KIND = "OrnsteinUhlenbeck"
    ALIASES = ("ou", "ornstein-uhlenbeck", "ornsteinuhlenbeck")
    PARAM_NAMES = ("T2", "tau_c")

    @classmethod
    def from_diffusion(cls, c: float, tau_c: float) -> "OrnsteinUhlenbeck":
        """
        Build the model from the diffusion constant c.

        Args:
            c: Diffusion constant
            tau_c: Correlation time

        Returns:
            Model with T2 = 2/(c tau_c^2)
        """
        return cls(T2=2.0 / (c * tau_c * tau_c), tau_c=tau_c)

    @property
    def diffusion(self) -> float:
        """Diffusion constant c = 2/(T2 tau_c^2)."""
        return 2.0 / (self.T2 * self.tau_c * self.tau_c)

    @property
    def correlation_time(self) -> float:
        return self.tau_c

    def spectral_scale(self) -> float:
        return 1.0 / self.tau_c

    @classmethod
    def _batch_s0(cls, params):
        return 2.0 / params[..., 0]

    @classmethod
    def _batch_psd(cls, params, omega):
        t2, tau = params[..., 0], params[..., 1]
        return (2.0 / t2) / (1.0 + (omega * tau) ** 2)

    @classmethod
    def _batch_autocorr(cls, params, dt):
        t2, tau = params[..., 0], params[..., 1]
        c = 2.0 / (t2 * tau * tau)
        return 0.5 * c * tau * np.exp(-np.abs(dt) / tau)

    @classmethod
    def _batch_gamma(cls, params, t):
        t2, tau = params[..., 0], params[..., 1]
        return t * phi1(t / tau) / (2.0 * t2 * tau)

    @classmethod
    def _batch_attenuation(cls, params, t):
        t2, tau = params[..., 0], params[..., 1]
        return t * t * phi2(t / tau) / (t2 * tau)

    @classmethod
    def _batch_grad_attenuation(cls, params, t):
        t2, tau = params[..., 0], params[..., 1]
        z = t / tau
        scale = 1.0 / (t2 * tau)
        attenuation = scale * t * t * phi2(z)
        d_t2 = -attenuation / t2
        # d/dtau [scale t^2 phi2(t/tau)] with d scale/dtau = -scale/tau and dz/dtau = -z/tau
        d_tau = -(attenuation + scale * t ** 3 * phi2_prime(z) / tau) / tau
        return np.stack(np.broadcast_arrays(d_t2, d_tau), axis=-1)
