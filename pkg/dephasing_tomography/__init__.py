"""
Dephasing Tomography - estimation of single-qubit dephasing noise from Ramsey data.
"""

__version__ = "1.0.0"

# Import main entry points for easier access
from dephasing_tomography.noise_models import DisplacedLorentzian, OrnsteinUhlenbeck, White
from dephasing_tomography.measurement import DataSet, Schedule, ramsey_prob, sample_dataset
from dephasing_tomography.estimation import FitConfig, asymptotic_cov, fit, optimal_times
from dephasing_tomography.bayesian import ProtocolConfig, run_protocol
from dephasing_tomography.harness import ComparisonSpec, compare, precision_ratio
