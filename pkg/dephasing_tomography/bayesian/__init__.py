"""
Sequential Bayesian estimation with weighted particle ensembles.
"""
from dephasing_tomography.bayesian.ensemble import ParticleEnsemble, posterior_cov, posterior_mean
from dephasing_tomography.bayesian.updates import bayes_update, liu_west_resample
from dephasing_tomography.bayesian.information import candidate_grid, expected_kl_gain, select_time
from dephasing_tomography.bayesian.protocol import (
    ProtocolConfig,
    ProtocolTrace,
    TraceStep,
    init_prior,
    run_protocol,
)
from dephasing_tomography.bayesian.lindblad_benchmark import (
    cumulative_lindblad_variance,
    lindblad_optimal_update_time,
    lindblad_variance_update,
)
