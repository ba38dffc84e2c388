"""
Box-constrained frequentist point estimation.

fit() minimizes either the Ramsey negative log-likelihood (L-BFGS-B) or the
iteratively reweighted least-squares cost (trust-region reflective) from one
or more starting points and keeps the best minimizer.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import time

import numpy as np
from scipy import optimize

import config
from dephasing_tomography.core.model_factory import model_class
from dephasing_tomography.core.param_vector import ParamVector
from dephasing_tomography.estimation.costs import nll_value_and_grad, wls_residuals_and_jacobian
from dephasing_tomography.estimation.fisher import check_nonsingular, fisher_matrices
from dephasing_tomography.measurement.dataset import DataSet
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.exceptions import (
    IllPosedError,
    NumericalError,
    SingularMatrixError,
    ValidationError,
)
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.math_utils import det_metric, symmetrize
from dephasing_tomography.utils.random_utils import RandomGenerator, STREAM_RESTARTS
from dephasing_tomography.utils.validation import (
    raise_if_invalid,
    validate_bounds,
    validate_integer_param,
    validate_string_param,
)

# Supported cost functions
COST_KINDS = ["wls", "nll"]


def box_around(model: AbstractNoiseModel, factor: float = 3.0) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    """
    Per-parameter box [theta/factor, factor theta] around a model.

    Zero-valued parameters (a vanishing detuning) get the box [0, factor/T2].

    Args:
        model: Center of the box
        factor: Multiplicative half-width (> 1)

    Returns:
        Tuple of (low, high)
    """
    low, high = [], []
    for value in model.values:
        if value > 0.0:
            low.append(value / factor)
            high.append(value * factor)
        else:
            low.append(0.0)
            high.append(factor / model.t2)
    return tuple(low), tuple(high)


@dataclass(frozen=True)
class FitConfig:
    """
    Settings of a frequentist fit.

    Attributes:
        bounds: (low, high) per parameter
        initial_guess: Starting point, or None for random starts in the box
        cost_kind: "wls" or "nll"
        restarts: Number of starting points (the initial guess counts as one)
        gtol, xtol, ftol: Optimizer tolerances
        max_iterations: Iteration budget per start
    """

    bounds: Tuple[Tuple[float, ...], Tuple[float, ...]]
    initial_guess: Optional[ParamVector] = None
    cost_kind: str = config.FIT_DEFAULTS["cost_kind"]
    restarts: int = config.FIT_DEFAULTS["restarts"]
    gtol: float = config.FIT_DEFAULTS["gtol"]
    xtol: float = config.FIT_DEFAULTS["xtol"]
    ftol: float = config.FIT_DEFAULTS["ftol"]
    max_iterations: int = config.FIT_DEFAULTS["max_iterations"]

    def __post_init__(self):
        low, high = (tuple(float(v) for v in side) for side in self.bounds)
        object.__setattr__(self, "bounds", (low, high))
        errors = []
        is_valid, error = validate_string_param(self.cost_kind, COST_KINDS, case_sensitive=False)
        if not is_valid:
            errors.append({"cost_kind": error})
        else:
            object.__setattr__(self, "cost_kind", self.cost_kind.lower())
        for name in ("restarts", "max_iterations"):
            is_valid, error = validate_integer_param(getattr(self, name), min_val=1)
            if not is_valid:
                errors.append({name: error})
        is_valid, bound_errors = validate_bounds(low, high, len(low))
        if not is_valid:
            errors.extend(bound_errors)
        elif self.initial_guess is not None:
            guess = self.initial_guess.values
            if len(guess) != len(low):
                errors.append({"initial_guess": f"Expected {len(low)} values, got {len(guess)}"})
            elif any(not lo <= g <= hi for g, lo, hi in zip(guess, low, high)):
                errors.append({"initial_guess": "Initial guess lies outside the bounds"})
        raise_if_invalid((not errors, errors or None), "Invalid fit configuration")

    @classmethod
    def around(cls, model: AbstractNoiseModel, factor: float = 3.0, **kwargs) -> "FitConfig":
        """Config whose bounds are box_around(model, factor)."""
        return cls(bounds=box_around(model, factor), **kwargs)


@dataclass
class EstimateReport:
    """
    Result of a frequentist fit.

    covariance is the asymptotic covariance at theta_hat, or None when the
    Fisher sum is singular (det_metric is then inf).
    """

    theta_hat: ParamVector
    cost_at_min: float
    covariance: Optional[np.ndarray]
    det_metric: float
    converged: bool
    iterations: int
    cost_kind: str = "wls"
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def model(self) -> AbstractNoiseModel:
        return self.theta_hat.to_model()

    def to_dict(self) -> Dict[str, Any]:
        cls = model_class(self.theta_hat.kind)
        return {
            "kind": cls.KIND,
            "theta_hat": dict(zip(cls.PARAM_NAMES, self.theta_hat.values)),
            "cost_kind": self.cost_kind,
            "cost_at_min": self.cost_at_min,
            "covariance": None if self.covariance is None else self.covariance.tolist(),
            "det_metric": self.det_metric,
            "converged": self.converged,
            "iterations": self.iterations,
            "diagnostics": self.diagnostics
        }


def _starting_points(fit_config: FitConfig, rng: RandomGenerator) -> np.ndarray:
    low, high = (np.array(side) for side in fit_config.bounds)
    starts = []
    if fit_config.initial_guess is not None:
        starts.append(fit_config.initial_guess.as_array())
    missing = fit_config.restarts - len(starts)
    if missing > 0:
        starts.extend(rng.uniform_box(low, high, missing))
    return np.array(starts)


def _run_wls(cls, data: DataSet, start: np.ndarray, fit_config: FitConfig):
    times, shots, frequencies = data.times, data.shots, data.frequencies

    def residuals(x):
        return wls_residuals_and_jacobian(cls, x, times, shots, frequencies)[0]

    def jacobian(x):
        return wls_residuals_and_jacobian(cls, x, times, shots, frequencies)[1]

    result = optimize.least_squares(
        residuals, start, jac=jacobian, bounds=fit_config.bounds, method="trf",
        x_scale="jac", gtol=fit_config.gtol, xtol=fit_config.xtol, ftol=fit_config.ftol,
        max_nfev=fit_config.max_iterations
    )
    # scipy reports half the sum of squares
    return result.x, 2.0 * float(result.cost), bool(result.status > 0), int(result.nfev), result.message


def _run_nll(cls, data: DataSet, start: np.ndarray, fit_config: FitConfig):
    times, counts0, counts1 = data.times, data.counts0, data.counts1

    def objective(x):
        return nll_value_and_grad(cls, x, times, counts0, counts1)

    result = optimize.minimize(
        objective, start, jac=True, method="L-BFGS-B",
        bounds=list(zip(*fit_config.bounds)),
        options={"gtol": fit_config.gtol, "ftol": fit_config.ftol, "maxiter": fit_config.max_iterations}
    )
    # status 1 is the exhausted budget; a line-search stall at machine precision still counts
    return result.x, float(result.fun), int(result.status) != 1, int(result.nit), str(result.message)


def _covariance_at(model: AbstractNoiseModel, data: DataSet) -> Optional[np.ndarray]:
    information = symmetrize(np.einsum("i,ijk->jk", data.shots.astype(float),
                                       fisher_matrices(model, data.times)))
    try:
        check_nonsingular(information, "fisher_sum")
    except SingularMatrixError:
        return None
    return symmetrize(np.linalg.inv(information))


def fit(data: DataSet, family: str, fit_config: Optional[FitConfig] = None,
        seed: int = 0, rng: Optional[RandomGenerator] = None) -> EstimateReport:
    """
    Estimate noise parameters from measurement records.

    Args:
        data: Measurement records
        family: Model family name or alias
        fit_config: Fit settings; the bounds are required
        seed: Seed of the random restarts
        rng: Optional generator overriding the one built from seed

    Returns:
        EstimateReport of the best start; converged=False if its optimizer
        stopped on the iteration budget

    Raises:
        IllPosedError: If there are fewer distinct times than parameters
        ValidationError: If the bounds do not match the family
        NumericalError: If every start produced a non-finite cost
    """
    start_time = time.time()
    cls = model_class(family)
    n = cls.dimension()
    if data.distinct_times() < n:
        raise IllPosedError(
            f"{cls.KIND} has {n} parameters but the data has {data.distinct_times()} distinct time(s)",
            [{"data": "needs at least one distinct time per parameter"}]
        )
    if fit_config is None:
        raise ValidationError("Fit needs a configuration with bounds", [{"fit_config": "missing"}])
    low = fit_config.bounds[0]
    if len(low) != n:
        raise ValidationError(f"{cls.KIND} takes {n} bounds, got {len(low)}", [{"bounds": "dimension mismatch"}])
    for name, value in zip(cls.PARAM_NAMES, low):
        if value < 0.0 or (value == 0.0 and name not in cls.NONNEGATIVE_PARAMS):
            raise ValidationError("Bounds leave the parameter domain", [{f"bounds.{name}": f"low = {value}"}])

    rng = rng if rng is not None else RandomGenerator(seed, STREAM_RESTARTS)
    runner = _run_wls if fit_config.cost_kind == "wls" else _run_nll

    best = None
    attempts: List[Dict[str, Any]] = []
    for start in _starting_points(fit_config, rng):
        x, cost, success, iterations, message = runner(cls, data, start, fit_config)
        attempts.append({"cost": cost, "success": success, "iterations": iterations})
        if np.isfinite(cost) and (best is None or cost < best[1]):
            best = (x, cost, success, iterations, message)

    if best is None:
        raise NumericalError("Every fit start produced a non-finite cost", {"attempts": attempts})

    x, cost, success, iterations, message = best
    low_arr, high_arr = (np.array(side) for side in fit_config.bounds)
    theta_hat = ParamVector.from_array(cls.KIND, np.clip(x, low_arr, high_arr))
    model_hat = theta_hat.to_model()
    covariance = _covariance_at(model_hat, data)

    report = EstimateReport(
        theta_hat=theta_hat,
        cost_at_min=cost,
        covariance=covariance,
        det_metric=det_metric(covariance) if covariance is not None else float("inf"),
        converged=success,
        iterations=iterations,
        cost_kind=fit_config.cost_kind,
        diagnostics={"message": message, "starts": len(attempts),
                     "converged_starts": sum(a["success"] for a in attempts),
                     "singular_information": covariance is None}
    )
    duration_ms = (time.time() - start_time) * 1000
    logger.debug(f"{cls.KIND} {fit_config.cost_kind} fit: theta_hat={theta_hat.values}, "
                 f"cost={cost:.6g}, converged={success} in {duration_ms:.2f}ms", "fit")
    return report
