"""
Displaced-Lorentzian dephasing noise.

A qubit dispersively coupled to a damped, driven mode sees a Lorentzian
spectrum centred at -delta_c instead of zero:

    S(omega) = 4 g2n kappa / ((omega + delta_c)^2 + (kappa/2)^2)
    C(dt)    = 4 g2n e^{-kappa |dt|/2} e^{-i delta_c dt}

With z = kappa/2 + i delta_c the rate and attenuation are the real parts of
the complex phi functions,

    gamma(t) = 2 g2n t Re phi1(z t)
    Gamma(t) = 4 g2n t^2 Re phi2(z t)

which, with S0 = S(0) and x = 2 delta_c/kappa, read

    gamma(t) = (S0/4) (1 - e^{-kappa t/2} (cos(delta_c t) - x sin(delta_c t)))
    Gamma(t) = (S0/2) (t + (2/kappa) (x^2 - 1)/(x^2 + 1)
                       + (2/kappa) e^{-kappa t/2} cos(delta_c t + 2 arctan x))

gamma(t) goes negative for large enough detuning; the first trough sits at
delta_c t = 3 pi/2.
"""
from dataclasses import dataclass
import math

import numpy as np

from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.math_utils import phi1, phi2, phi2_prime


@dataclass(frozen=True)
class DisplacedLorentzian(AbstractNoiseModel):
    """
    Displaced-Lorentzian noise parametrized by (g2n, kappa, delta_c).

    delta_c = 0 reduces to Ornstein-Uhlenbeck noise with T2 tau_c = 1/(4 g2n).
    """

    g2n: float
    kappa: float
    delta_c: float

    KIND = "DisplacedLorentzian"
    ALIASES = ("dl", "displaced-lorentzian", "displacedlorentzian")
    PARAM_NAMES = ("g2n", "kappa", "delta_c")
    NONNEGATIVE_PARAMS = ("delta_c",)
    RATE_NONNEGATIVE = False

    @classmethod
    def from_timescales(cls, T2: float, tau_c: float, delta_c: float) -> "DisplacedLorentzian":
        """
        Build the model from its decoherence time, correlation time and detuning.

        Args:
            T2: Effective decoherence time 2/S(0)
            tau_c: Correlation time 2/kappa
            delta_c: Detuning

        Returns:
            Model with kappa = 2/tau_c and g2n chosen so that 2/S(0) = T2
        """
        kappa = 2.0 / tau_c
        g2n = ((0.5 * kappa) ** 2 + delta_c ** 2) / (2.0 * kappa * T2)
        return cls(g2n=g2n, kappa=kappa, delta_c=delta_c)

    @property
    def correlation_time(self) -> float:
        return 2.0 / self.kappa

    def spectral_scale(self) -> float:
        return abs(self.delta_c) + self.kappa

    def spectral_peaks(self):
        return (0.0, abs(self.delta_c)) if self.delta_c else (0.0,)

    def first_trough_time(self) -> float:
        """Time of the first minimum of gamma(t), 3 pi/(2 delta_c); inf without detuning."""
        if self.delta_c == 0.0:
            return math.inf
        return 1.5 * math.pi / self.delta_c

    @staticmethod
    def _z(params):
        return 0.5 * params[..., 1] + 1j * params[..., 2]

    @classmethod
    def _batch_s0(cls, params):
        g2n, kappa, delta = params[..., 0], params[..., 1], params[..., 2]
        return 4.0 * g2n * kappa / ((0.5 * kappa) ** 2 + delta * delta)

    @classmethod
    def _batch_psd(cls, params, omega):
        g2n, kappa, delta = params[..., 0], params[..., 1], params[..., 2]
        return 4.0 * g2n * kappa / ((omega + delta) ** 2 + (0.5 * kappa) ** 2)

    @classmethod
    def _batch_autocorr(cls, params, dt):
        g2n, kappa, delta = params[..., 0], params[..., 1], params[..., 2]
        return 4.0 * g2n * np.exp(-0.5 * kappa * np.abs(dt)) * np.exp(-1j * delta * dt)

    @classmethod
    def _batch_gamma(cls, params, t):
        g2n = params[..., 0]
        return 2.0 * g2n * t * np.real(phi1(cls._z(params) * t))

    @classmethod
    def _batch_attenuation(cls, params, t):
        g2n = params[..., 0]
        # Gamma >= 0 analytically; clamp the last-digit rounding near t = 0
        return np.maximum(4.0 * g2n * t * t * np.real(phi2(cls._z(params) * t)), 0.0)

    @classmethod
    def _batch_grad_attenuation(cls, params, t):
        g2n = params[..., 0]
        zt = cls._z(params) * t
        d_phi = phi2_prime(zt)
        d_g2n = 4.0 * t * t * np.real(phi2(zt))
        # dz/dkappa = 1/2 and dz/ddelta = i
        d_kappa = 2.0 * g2n * t ** 3 * np.real(d_phi)
        d_delta = -4.0 * g2n * t ** 3 * np.imag(d_phi)
        return np.stack(np.broadcast_arrays(d_g2n, d_kappa, d_delta), axis=-1)
