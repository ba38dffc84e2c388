"""
Frequentist estimation: costs, fits, Fisher information and optimal design.
"""
from dephasing_tomography.estimation.costs import nll_cost, wls_cost
from dephasing_tomography.estimation.fisher import (
    asymptotic_cov,
    fisher_matrix,
    propagated_covariance,
    sensitivity_matrix,
)
from dephasing_tomography.estimation.fitting import EstimateReport, FitConfig, fit
from dephasing_tomography.estimation.design import SearchConfig, design_criterion, optimal_times
from dephasing_tomography.estimation.lindblad import (
    lindblad_closed_form_fit,
    lindblad_optimal_time,
    lindblad_variance,
)
