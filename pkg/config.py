"""
Configuration module for Dephasing Tomography.

This module contains centralized configuration settings for the application,
including output directory structure, numerical defaults for every estimation
stage, logging settings, and the CLI exit-code contract.
"""
import os

# Base output directory
OUTPUT_DIR = "output"

# Log directory, kept apart from result directories so that results replay byte-identically
LOG_DIR = os.path.join(OUTPUT_DIR, "logs")

# Main log file for all runs
MAIN_LOG_FILE = os.path.join(LOG_DIR, "tomography.log")

# CLI subcommands, one output subdirectory each
COMMANDS = [
    "simulate",
    "fit",
    "optimal-times",
    "bayes",
    "compare",
    "nonmarkov"
]

# Clamp applied to probabilities in every log and variance denominator
PROBABILITY_EPS = 1e-12

# Filter-function quadrature settings
QUADRATURE_DEFAULTS = {
    "tol": 1e-9,
    "lobes": 8,             # filter lobes integrated panel by panel before the tail
    "feature_widths": 20.0, # PSD widths covered before the tail starts
    "max_panels": 400,
    "limit": 200            # QUADPACK subdivision limit per panel
}

# Non-Markovianity settings
NON_MARKOVIANITY_DEFAULTS = {
    "envelope_cutoff": 1e-10,  # auto horizon: e^{-kappa t/2} below this value
    "points_per_period": 64,
    "min_grid_points": 256,
    "max_grid_points": 2_000_000,
    "root_xtol": 1e-12,
    "boundary_tol": 1e-6,
    "boundary_bracket": (0.5, 10.0)  # in units of kappa
}

# Frequentist fit defaults
FIT_DEFAULTS = {
    "cost_kind": "wls",
    "restarts": 8,
    "gtol": 1e-12,
    "xtol": 1e-15,
    "ftol": 1e-15,
    "max_iterations": 2000
}

# D-optimal design defaults
DESIGN_DEFAULTS = {
    "t_min_factor": 1e-3,
    "t_max_factor": 5.0,
    "grid_points": 40,
    "refine_starts": 3,
    "xatol": 1e-7,
    "fatol": 1e-12,
    "max_iterations": 4000,
    "criterion": "d",
    # smallest log-time gap between neighbouring design times
    "min_log_separation": 1e-3
}

# Liu-West resampler defaults
RESAMPLER_DEFAULTS = {
    "a": 0.98,
    "threshold": 0.5
}

# Sequential Bayesian protocol defaults
PROTOCOL_DEFAULTS = {
    "particles_by_dimension": {1: 4000, 2: 4000, 3: 8000},
    "shots_per_step": 50,
    "steps": 200,
    "grid_points": 200,
    "grid_low": 1e-2,     # in units of the prior-center T2
    "grid_high": 5.0,
    "grid_refresh": 0.2,  # relative drift of the posterior-mean T2 that refreshes the grid
    "prior_factor": 3.0   # uniform prior box [theta/3, 3 theta]
}

# Monte-Carlo comparison defaults
HARNESS_DEFAULTS = {
    "shots_per_step": 100,
    "frequentist_runs": 1000,
    "bayesian_runs": 30,
    "fit_restarts": 1,
    "max_nonconverged_fraction": 0.2,
    "uniform_interval": (0.02, 3.0),
    "uniform_points": 20
}

# CLI exit codes
EXIT_CODES = {
    "success": 0,
    "error": 1,
    "validation": 2,
    "io": 3,
    "numerical": 4
}

# Logging configuration
LOGGING_CONFIG = {
    "default_level": "INFO",
    "file_level": "DEBUG",
    "console_level": "INFO",
    "format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    "date_format": "%Y-%m-%d %H:%M:%S"
}


def get_command_output_dir(command: str, seed: int) -> str:
    """
    Get the default output directory for a command run.

    Args:
        command: CLI command name
        seed: Seed used for the run

    Returns:
        Path to the run directory
    """
    return os.path.join(OUTPUT_DIR, command.lower(), str(seed).zfill(8))


def get_run_log_path(command: str, seed: int) -> str:
    """
    Get the path for an individual run's log file.

    Args:
        command: CLI command name
        seed: Seed used for the run

    Returns:
        Path to the run's log file
    """
    return os.path.join(LOG_DIR, command.lower(), f"{str(seed).zfill(8)}.log")


def get_output_file_path(output_dir: str, name: str) -> str:
    """
    Get the path of a result file inside an output directory.

    Args:
        output_dir: Output directory of the run
        name: File name (e.g. "dataset.csv")

    Returns:
        Path to the result file
    """
    return os.path.join(output_dir, name)
