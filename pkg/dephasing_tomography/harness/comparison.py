"""
Monte-Carlo comparison of frequentist and Bayesian estimation.

Both arms spend the same shot budget. The frequentist arm refits R synthetic
datasets on a fixed schedule and takes the empirical covariance of the
estimates; the Bayesian arm runs adaptive protocols and averages the final
posterior covariances. Arms are compared through

    r = (det Cov_a / det Cov_b)^(1/(2n))

so r > 1 means arm b is more precise and r^2 is its shot-equivalence factor.
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple
import math
import time

import numpy as np

import config
from dephasing_tomography.bayesian.protocol import ProtocolConfig, run_protocol
from dephasing_tomography.estimation.design import SearchConfig, optimal_times
from dephasing_tomography.estimation.fisher import asymptotic_cov
from dephasing_tomography.estimation.fitting import COST_KINDS, FitConfig, fit
from dephasing_tomography.measurement.ramsey import sample_dataset
from dephasing_tomography.measurement.schedule import Schedule
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.exceptions import (
    NumericalError,
    ReliabilityError,
    SingularMatrixError,
    ValidationError,
)
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.math_utils import det_metric, symmetrize
from dephasing_tomography.utils.parallel import run_indexed
from dephasing_tomography.utils.random_utils import derive_seed
from dephasing_tomography.utils.validation import (
    raise_if_invalid,
    validate_integer_param,
    validate_numeric_param,
    validate_seed,
    validate_string_param,
    validate_time_list,
)

SCHEDULE_SOURCES = ["optimal", "uniform", "explicit"]

COMPARISON_MODES = ["bayesian", "uniform-optimal", "uniform-bayesian", "all"]


def uniform_schedule(interval: Tuple[float, float], points: int, n_shot: int) -> Schedule:
    """
    Equidistant times over an interval with an equal shot split.

    Args:
        interval: (t_lo, t_hi) with 0 < t_lo < t_hi
        points: Number of times; a single point sits at t_lo
        n_shot: Total shots, remainder to the earliest times

    Returns:
        Schedule
    """
    t_lo, t_hi = (float(v) for v in interval)
    errors = []
    is_valid, error = validate_numeric_param(t_lo, min_val=0.0, exclusive_min=True)
    if not is_valid:
        errors.append({"interval": error})
    elif t_hi <= t_lo:
        errors.append({"interval": f"t_hi must exceed t_lo, got ({t_lo}, {t_hi})"})
    is_valid, error = validate_integer_param(points, min_val=1)
    if not is_valid:
        errors.append({"points": error})
    raise_if_invalid((not errors, errors or None), "Invalid uniform schedule")

    times = [t_lo] if points == 1 else np.linspace(t_lo, t_hi, points).tolist()
    return Schedule.equal_split(times, n_shot)


@dataclass(frozen=True)
class ComparisonSpec:
    """
    Settings of a Monte-Carlo comparison.

    Attributes:
        truth: Model generating every dataset
        n_shot: Shot budget of each arm
        schedule_source: Frequentist schedule, "optimal", "uniform" or "explicit"
        explicit_times: Times for the explicit source
        uniform_interval, uniform_points: Uniform schedule, in units of the truth's T2
        frequentist_runs, bayesian_runs: Monte-Carlo repetitions
        fit_restarts, cost_kind: Frequentist fit settings
        protocol: Overrides of the Bayesian ProtocolConfig fields
        search: Optimal-time search settings
        seed: Base seed; run i uses seed ^ i
        threads: Worker threads
    """

    truth: AbstractNoiseModel
    n_shot: int
    schedule_source: str = "optimal"
    explicit_times: Optional[Tuple[float, ...]] = None
    uniform_interval: Tuple[float, float] = config.HARNESS_DEFAULTS["uniform_interval"]
    uniform_points: int = config.HARNESS_DEFAULTS["uniform_points"]
    frequentist_runs: int = config.HARNESS_DEFAULTS["frequentist_runs"]
    bayesian_runs: int = config.HARNESS_DEFAULTS["bayesian_runs"]
    fit_restarts: int = config.HARNESS_DEFAULTS["fit_restarts"]
    cost_kind: str = config.FIT_DEFAULTS["cost_kind"]
    protocol: Dict[str, Any] = field(default_factory=dict)
    search: SearchConfig = field(default_factory=SearchConfig)
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ("schedule_source", "cost_kind"):
            value = getattr(self, name)
            if isinstance(value, str):
                object.__setattr__(self, name, value.lower())
        errors = []
        for name in ("n_shot", "frequentist_runs", "bayesian_runs", "fit_restarts", "threads",
                     "uniform_points"):
            is_valid, error = validate_integer_param(getattr(self, name), min_val=1)
            if not is_valid:
                errors.append({name: error})
        for name, options in (("schedule_source", SCHEDULE_SOURCES), ("cost_kind", COST_KINDS)):
            is_valid, error = validate_string_param(getattr(self, name), options, case_sensitive=False)
            if not is_valid:
                errors.append({name: error})
        if self.schedule_source == "explicit":
            times = list(self.explicit_times or ())
            is_valid, error = validate_time_list(times)
            if not is_valid:
                errors.append({"explicit_times": error})
            elif len(times) < self.truth.dimension():
                errors.append({"explicit_times": f"needs at least {self.truth.dimension()} times"})
        is_valid, error = validate_seed(self.seed)
        if not is_valid:
            errors.append({"seed": error})
        if not isinstance(self.protocol, dict):
            raise ValidationError("Invalid comparison settings", [{"protocol": "expected an object"}])
        for key in ("kind", "seed", "max_shots", "low", "high", "steps"):
            if key in self.protocol:
                errors.append({f"protocol.{key}": "set by the comparison"})
        if "shots_per_step" in self.protocol:
            is_valid, error = validate_integer_param(self.protocol["shots_per_step"], min_val=1)
            if not is_valid:
                errors.append({"protocol.shots_per_step": error})
        raise_if_invalid((not errors, errors or None), "Invalid comparison settings")

    @property
    def dimension(self) -> int:
        return self.truth.dimension()

    def protocol_config(self, seed: int) -> ProtocolConfig:
        """
        Bayesian arm settings for one run.

        The arm takes shots_per_step (default 100) per step and stops exactly
        at n_shot; the last step takes the remaining shots.
        """
        overrides = dict(self.protocol)
        shots = overrides.pop("shots_per_step", config.HARNESS_DEFAULTS["shots_per_step"])
        factor = overrides.pop("prior_factor", config.PROTOCOL_DEFAULTS["prior_factor"])
        steps = math.ceil(self.n_shot / shots)
        return ProtocolConfig.around(self.truth, factor, shots_per_step=shots, steps=steps,
                                     max_shots=self.n_shot, seed=seed, **overrides)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "truth": self.truth.to_dict(),
            "n_shot": self.n_shot,
            "schedule_source": self.schedule_source,
            "explicit_times": None if self.explicit_times is None else list(self.explicit_times),
            "uniform_interval": list(self.uniform_interval),
            "uniform_points": self.uniform_points,
            "frequentist_runs": self.frequentist_runs,
            "bayesian_runs": self.bayesian_runs,
            "fit_restarts": self.fit_restarts,
            "cost_kind": self.cost_kind,
            "protocol": dict(self.protocol),
            "seed": self.seed
        }


def frequentist_schedule(spec: ComparisonSpec, source: Optional[str] = None) -> Schedule:
    """
    Schedule of a frequentist arm.

    Args:
        spec: Comparison settings
        source: Override of spec.schedule_source

    Returns:
        Schedule spending spec.n_shot shots
    """
    source = (source or spec.schedule_source).lower()
    if source == "optimal":
        return Schedule.equal_split(optimal_times(spec.truth, search=spec.search), spec.n_shot)
    if source == "uniform":
        t2 = spec.truth.t2
        interval = (spec.uniform_interval[0] * t2, spec.uniform_interval[1] * t2)
        return uniform_schedule(interval, spec.uniform_points, spec.n_shot)
    return Schedule.equal_split(spec.explicit_times, spec.n_shot)


@dataclass
class FrequentistArm:
    """
    Result of repeated frequentist fits on one schedule.

    Attributes:
        schedule: Schedule every dataset was drawn on
        estimates: Converged estimates, shape (R_converged, n)
        covariance: Empirical covariance (ddof = 1)
        det_metric: det(covariance)^(1/(2n))
        runs: Requested runs
        failed: Runs excluded for non-convergence or numerical failure
        asymptotic_det_metric: det^(1/(2n)) of the asymptotic covariance, None if singular
    """

    schedule: Schedule
    estimates: np.ndarray
    covariance: Optional[np.ndarray]
    det_metric: float
    runs: int
    failed: int
    asymptotic_det_metric: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schedule": self.schedule.to_dict(),
            "covariance": None if self.covariance is None else self.covariance.tolist(),
            "det_metric": self.det_metric,
            "runs": self.runs,
            "converged_runs": self.runs - self.failed,
            "failed_runs": self.failed,
            "asymptotic_det_metric": self.asymptotic_det_metric,
            "total_shots": self.schedule.total_shots
        }


@dataclass
class BayesianArm:
    """
    Result of repeated Bayesian protocols.

    det_metric is the mean over runs of det(final posterior cov)^(1/(2n));
    mean_covariance is the mean of the final posterior covariances.
    """

    covariances: List[np.ndarray]
    mean_covariance: np.ndarray
    det_metric: float
    det_metrics: List[float]
    total_shots: List[int]
    final_means: List[np.ndarray]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean_covariance": self.mean_covariance.tolist(),
            "det_metric": self.det_metric,
            "det_metrics": list(self.det_metrics),
            "runs": len(self.covariances),
            "total_shots": list(self.total_shots)
        }


def _fit_run(spec: ComparisonSpec, schedule: Schedule, fit_config: FitConfig, index: int):
    seed = derive_seed(spec.seed, index)
    data = sample_dataset(spec.truth, schedule, seed)
    try:
        report = fit(data, spec.truth.KIND, fit_config, seed=seed)
    except NumericalError as exc:
        logger.debug(f"Run {index}: fit failed ({exc})", "harness")
        return None
    if not report.converged:
        logger.debug(f"Run {index}: fit did not converge", "harness")
        return None
    return report.theta_hat.as_array()


def run_frequentist_mc(spec: ComparisonSpec, schedule: Optional[Schedule] = None) -> FrequentistArm:
    """
    Empirical covariance of the frequentist estimator over independent datasets.

    Args:
        spec: Comparison settings
        schedule: Schedule to use (default frequentist_schedule(spec))

    Returns:
        FrequentistArm

    Raises:
        ReliabilityError: If more than 20% of the fits fail; carries the partial arm
    """
    start_time = time.time()
    schedule = schedule or frequentist_schedule(spec)
    fit_config = FitConfig.around(spec.truth, initial_guess=spec.truth.to_vector(),
                                  restarts=spec.fit_restarts, cost_kind=spec.cost_kind)

    results = run_indexed(lambda index: _fit_run(spec, schedule, fit_config, index),
                          spec.frequentist_runs, spec.threads)
    estimates = np.array([r for r in results if r is not None]).reshape(-1, spec.dimension)
    failed = spec.frequentist_runs - len(estimates)

    covariance = None
    if len(estimates) >= 2:
        covariance = symmetrize(np.atleast_2d(np.cov(estimates, rowvar=False, ddof=1)))
    try:
        asymptotic = det_metric(asymptotic_cov(spec.truth, schedule))
    except SingularMatrixError:
        asymptotic = None

    arm = FrequentistArm(schedule, estimates, covariance,
                         det_metric(covariance) if covariance is not None else math.nan,
                         spec.frequentist_runs, failed, asymptotic)

    if failed > config.HARNESS_DEFAULTS["max_nonconverged_fraction"] * spec.frequentist_runs:
        logger.warning(f"{failed}/{spec.frequentist_runs} frequentist fits failed", "harness")
        raise ReliabilityError(f"{failed} of {spec.frequentist_runs} fits did not converge",
                               partial=arm, diagnostics={"failed": failed, "runs": spec.frequentist_runs})
    if covariance is None:
        raise NumericalError("Fewer than two converged fits", {"converged": len(estimates)})

    duration_ms = (time.time() - start_time) * 1000
    logger.debug(f"Frequentist MC on {len(schedule)} times: {len(estimates)} fits, "
                 f"det metric {arm.det_metric:.6g} in {duration_ms:.2f}ms", "harness")
    return arm


def run_bayesian_mc(spec: ComparisonSpec) -> BayesianArm:
    """
    Final posterior covariances of independent adaptive protocols.

    Args:
        spec: Comparison settings

    Returns:
        BayesianArm
    """
    start_time = time.time()

    def task(index: int):
        trace = run_protocol(spec.truth, spec.protocol_config(derive_seed(spec.seed, index)))
        logger.debug(f"Bayesian run {index}: {len(trace)} steps, {trace.total_shots} shots", "harness")
        return trace.final_cov, trace.total_shots, trace.final_mean

    results = run_indexed(task, spec.bayesian_runs, spec.threads)
    covariances = [cov for cov, _, _ in results]
    det_metrics = [det_metric(cov) for cov in covariances]
    arm = BayesianArm(
        covariances=covariances,
        mean_covariance=symmetrize(np.mean(covariances, axis=0)),
        det_metric=float(np.mean(det_metrics)),
        det_metrics=det_metrics,
        total_shots=[shots for _, shots, _ in results],
        final_means=[mean for _, _, mean in results]
    )
    duration_ms = (time.time() - start_time) * 1000
    logger.debug(f"Bayesian MC: {spec.bayesian_runs} runs, det metric {arm.det_metric:.6g} "
                 f"in {duration_ms:.2f}ms", "harness")
    return arm


@dataclass
class ComparisonReport:
    """
    Precision ratio between two arms.

    Attributes:
        mode: Comparison name
        arms: Labels of (numerator, denominator) arms
        covariance_a, covariance_b: Arm covariances
        det_metric_a, det_metric_b: Arm det metrics
        ratio: det_metric_a / det_metric_b
        ratio_squared: Shot-equivalence factor r^2
        diagnostics: Per-arm run details
    """

    mode: str
    arms: Tuple[str, str]
    covariance_a: np.ndarray
    covariance_b: np.ndarray
    det_metric_a: float
    det_metric_b: float
    ratio: float
    ratio_squared: float
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def inverted(self) -> "ComparisonReport":
        """Report with the arms swapped."""
        return ComparisonReport(self.mode, (self.arms[1], self.arms[0]), self.covariance_b,
                                self.covariance_a, self.det_metric_b, self.det_metric_a,
                                1.0 / self.ratio, 1.0 / self.ratio_squared, dict(self.diagnostics))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "arms": list(self.arms),
            "covariance_a": self.covariance_a.tolist(),
            "covariance_b": self.covariance_b.tolist(),
            "det_metric_a": self.det_metric_a,
            "det_metric_b": self.det_metric_b,
            "r": self.ratio,
            "r_squared": self.ratio_squared,
            "diagnostics": self.diagnostics
        }


def _ratio_report(mode: str, label_a: str, arm_a, label_b: str, arm_b) -> ComparisonReport:
    cov_a = arm_a.covariance if isinstance(arm_a, FrequentistArm) else arm_a.mean_covariance
    cov_b = arm_b.covariance if isinstance(arm_b, FrequentistArm) else arm_b.mean_covariance
    for label, value in ((label_a, arm_a.det_metric), (label_b, arm_b.det_metric)):
        if not value > 0.0 or not math.isfinite(value):
            raise SingularMatrixError(f"infinite covariance: {label} arm has det metric {value}",
                                      {"mode": mode, "arm": label})
    ratio = arm_a.det_metric / arm_b.det_metric
    return ComparisonReport(mode, (label_a, label_b), cov_a, cov_b, arm_a.det_metric, arm_b.det_metric,
                            ratio, ratio * ratio,
                            {label_a: arm_a.to_dict(), label_b: arm_b.to_dict()})


def compare(spec: ComparisonSpec, mode: str = "bayesian") -> Dict[str, ComparisonReport]:
    """
    Run the arms a comparison mode needs and build its reports.

    Args:
        spec: Comparison settings
        mode: "bayesian" (frequentist vs Bayesian), "uniform-optimal",
              "uniform-bayesian" or "all"

    Returns:
        Reports keyed by mode; arms shared between modes run once

    Raises:
        ValidationError: If mode is unknown
        SingularMatrixError: If an arm's covariance is singular
        ReliabilityError: If a frequentist arm has too many failed fits
    """
    is_valid, error = validate_string_param(mode, COMPARISON_MODES, case_sensitive=False)
    if not is_valid:
        raise ValidationError("Invalid comparison mode", [{"mode": error}])
    mode = mode.lower()
    modes = COMPARISON_MODES[:-1] if mode == "all" else [mode]

    cache: Dict[str, Any] = {}
    builders: Dict[str, Callable[[], Any]] = {
        "frequentist": lambda: run_frequentist_mc(spec),
        "optimal": lambda: run_frequentist_mc(spec, frequentist_schedule(spec, "optimal")),
        "uniform": lambda: run_frequentist_mc(spec, frequentist_schedule(spec, "uniform")),
        "bayesian": lambda: run_bayesian_mc(spec)
    }

    def arm(label: str):
        key = label
        if label == "frequentist" and spec.schedule_source in ("optimal", "uniform"):
            key = spec.schedule_source
        if key not in cache:
            cache[key] = builders[key]()
        return cache[key]

    pairs = {
        "bayesian": ("frequentist", "bayesian"),
        "uniform-optimal": ("uniform", "optimal"),
        "uniform-bayesian": ("uniform", "bayesian")
    }
    reports = {}
    for name in modes:
        label_a, label_b = pairs[name]
        reports[name] = _ratio_report(name, label_a, arm(label_a), label_b, arm(label_b))
        logger.info(f"{name}: r = {reports[name].ratio:.6g}, r^2 = {reports[name].ratio_squared:.6g}",
                    "harness", console=False)
    return reports


def precision_ratio(spec: ComparisonSpec) -> ComparisonReport:
    """
    Frequentist vs Bayesian precision, r = (det Cov_F / det Sigma_B)^(1/(2n)).

    Args:
        spec: Comparison settings

    Returns:
        ComparisonReport; r > 1 means the Bayesian arm is more precise
    """
    return compare(spec, "bayesian")["bayesian"]


def uniform_vs_optimal_ratio(spec: ComparisonSpec) -> float:
    """Ratio of the uniform to the optimal frequentist estimator."""
    return compare(spec, "uniform-optimal")["uniform-optimal"].ratio


def uniform_vs_bayesian_ratio(spec: ComparisonSpec) -> float:
    """Ratio of the uniform frequentist estimator to the Bayesian protocol."""
    return compare(spec, "uniform-bayesian")["uniform-bayesian"].ratio
