"""
Noise model families and the quantities derived from them.
"""
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.noise_models.white import White
from dephasing_tomography.noise_models.ornstein_uhlenbeck import OrnsteinUhlenbeck
from dephasing_tomography.noise_models.displaced_lorentzian import DisplacedLorentzian
from dephasing_tomography.noise_models.filter_function import (
    attenuation_filter,
    attenuation_quadrature,
    dephasing_rate_filter,
    gamma_quadrature,
)
from dephasing_tomography.noise_models.non_markovianity import (
    markovian_boundary,
    n_cp,
    n_td,
    negative_rate_intervals,
)
