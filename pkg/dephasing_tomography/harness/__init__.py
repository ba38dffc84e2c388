"""
Monte-Carlo comparison of estimation strategies and parameter sweeps.
"""
from dephasing_tomography.harness.comparison import (
    ComparisonReport,
    ComparisonSpec,
    compare,
    precision_ratio,
    run_bayesian_mc,
    run_frequentist_mc,
    uniform_schedule,
    uniform_vs_bayesian_ratio,
    uniform_vs_optimal_ratio,
)
from dephasing_tomography.harness.sweeps import (
    SweepTable,
    nonmarkovianity_sweep,
    optimal_time_sweep,
    ratio_sweep,
)
