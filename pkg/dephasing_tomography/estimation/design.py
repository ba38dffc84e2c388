"""
Optimal measurement-time design.

Times are chosen to minimize a scalar criterion of the shot-weighted Fisher
sum under an equal shot split. A coarse log-spaced grid is searched
exhaustively and the best grid designs are refined with Nelder-Mead in log
time. Times are sorted after every evaluation so permutations are identical,
and neighbours are pushed at least min_log_separation apart in log time so a
design with more times than parameters stays strictly increasing.
"""
from dataclasses import dataclass, fields
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple
import math
import time

import numpy as np
from scipy import optimize

import config
from dephasing_tomography.estimation.fisher import fisher_matrices
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.exceptions import NumericalError, ValidationError
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.math_utils import log_grid
from dephasing_tomography.utils.validation import (
    check_unknown_keys,
    raise_if_invalid,
    validate_integer_param,
    validate_numeric_param,
    validate_string_param,
)

# D: -log det, A: trace of the inverse, E: -smallest eigenvalue
CRITERIA = ["d", "a", "e"]

# Grid designs beyond this count are sampled around the best minimal design
MAX_GRID_DESIGNS = 250_000


@dataclass(frozen=True)
class SearchConfig:
    """
    Settings of the optimal-time search; times scale with the model's T2.
    """

    t_min_factor: float = config.DESIGN_DEFAULTS["t_min_factor"]
    t_max_factor: float = config.DESIGN_DEFAULTS["t_max_factor"]
    grid_points: int = config.DESIGN_DEFAULTS["grid_points"]
    refine_starts: int = config.DESIGN_DEFAULTS["refine_starts"]
    xatol: float = config.DESIGN_DEFAULTS["xatol"]
    fatol: float = config.DESIGN_DEFAULTS["fatol"]
    max_iterations: int = config.DESIGN_DEFAULTS["max_iterations"]
    criterion: str = config.DESIGN_DEFAULTS["criterion"]
    min_log_separation: float = config.DESIGN_DEFAULTS["min_log_separation"]

    def __post_init__(self):
        errors = []
        for name in ("t_min_factor", "t_max_factor", "xatol", "fatol", "min_log_separation"):
            is_valid, error = validate_numeric_param(getattr(self, name), min_val=0.0, exclusive_min=True)
            if not is_valid:
                errors.append({name: error})
        if not errors and self.t_min_factor >= self.t_max_factor:
            errors.append({"t_min_factor": "must be below t_max_factor"})
        for name, minimum in (("grid_points", 2), ("refine_starts", 1), ("max_iterations", 1)):
            is_valid, error = validate_integer_param(getattr(self, name), min_val=minimum)
            if not is_valid:
                errors.append({name: error})
        is_valid, error = validate_string_param(self.criterion, CRITERIA, case_sensitive=False)
        if not is_valid:
            errors.append({"criterion": error})
        raise_if_invalid((not errors, errors or None), "Invalid search configuration")
        object.__setattr__(self, "criterion", self.criterion.lower())

    @classmethod
    def from_dict(cls, block: Optional[Dict[str, Any]]) -> "SearchConfig":
        block = dict(block or {})
        errors = check_unknown_keys(block, [f.name for f in fields(cls)], "search")
        raise_if_invalid((not errors, errors or None), "Invalid search configuration")
        return cls(**block)


def design_criterion(fisher_sum: np.ndarray, kind: str = "d") -> float:
    """
    Scalar design criterion to minimize.

    Args:
        fisher_sum: Symmetric Fisher information sum
        kind: "d" (-log det), "a" (trace of the inverse) or "e" (-smallest eigenvalue)

    Returns:
        Criterion value; inf for singular information under D and A
    """
    kind = kind.lower()
    if kind == "d":
        sign, logdet = np.linalg.slogdet(fisher_sum)
        return -float(logdet) if sign > 0 else math.inf
    if kind == "a":
        eigenvalues = np.linalg.eigvalsh(fisher_sum)
        if eigenvalues[0] <= 0.0:
            return math.inf
        return float(np.sum(1.0 / eigenvalues))
    if kind == "e":
        return -float(np.linalg.eigvalsh(fisher_sum)[0])
    raise ValidationError("Unknown design criterion", [{"criterion": f"must be one of {CRITERIA}, got {kind}"}])


def _batched_criterion(sums: np.ndarray, kind: str) -> np.ndarray:
    if kind == "d":
        sign, logdet = np.linalg.slogdet(sums)
        return np.where(sign > 0, -logdet, np.inf)
    eigenvalues = np.linalg.eigvalsh(sums)
    if kind == "a":
        with np.errstate(divide="ignore"):
            trace = np.sum(1.0 / eigenvalues, axis=-1)
        return np.where(eigenvalues[:, 0] > 0.0, trace, np.inf)
    return -eigenvalues[:, 0]


def _separated(log_times: np.ndarray, gap: float) -> np.ndarray:
    """Sorted log times with neighbours at least gap apart."""
    offsets = gap * np.arange(len(log_times))
    return np.maximum.accumulate(np.sort(log_times) - offsets) + offsets


def _grid_designs(count: int, k: int, n: int, scores_of) -> List[Tuple[int, ...]]:
    """Candidate index tuples: all combinations, or neighbours of the best n-point design."""
    if math.comb(count, k) <= MAX_GRID_DESIGNS:
        return list(combinations(range(count), k))
    base = list(combinations(range(count), n))
    best = base[int(np.argmin(scores_of(base)))]
    extra = [i for i in range(count) if i not in best]
    # fill remaining slots with points nearest to the chosen support
    extra.sort(key=lambda i: min(abs(i - j) for j in best))
    return [tuple(sorted(best + tuple(extra[:k - n])))]


def optimal_times(model_truth: AbstractNoiseModel, k: Optional[int] = None,
                  search: Optional[SearchConfig] = None) -> Tuple[float, ...]:
    """
    Measurement times minimizing the design criterion with equal shots per time.

    Args:
        model_truth: Model at which the information is evaluated
        k: Number of times (default: the parameter count)
        search: Search settings

    Returns:
        k strictly increasing times; when k > n, extra times may replicate a
        support point up to the minimum separation

    Raises:
        ValidationError: If k is below the parameter count
        NumericalError: If no refinement converges (best point attached)
    """
    start_time = time.time()
    search = search or SearchConfig()
    n = model_truth.dimension()
    k = n if k is None else k
    is_valid, error = validate_integer_param(k, min_val=n)
    if not is_valid:
        raise ValidationError(f"{model_truth.KIND} needs at least {n} times", [{"k": error}])

    scale = model_truth.t2
    t_min, t_max = search.t_min_factor * scale, search.t_max_factor * scale
    grid = log_grid(t_min, t_max, search.grid_points)
    grid_info = fisher_matrices(model_truth, grid)

    def scores_of(designs):
        index = np.array(designs)
        return _batched_criterion(grid_info[index].sum(axis=1), search.criterion)

    designs = _grid_designs(len(grid), k, n, scores_of)
    scores = scores_of(designs)
    order = np.argsort(scores, kind="stable")[:search.refine_starts]
    log_bounds = (math.log(t_min), math.log(t_max))

    def objective(x):
        times = np.exp(_separated(np.clip(x, *log_bounds), search.min_log_separation))
        info = fisher_matrices(model_truth, times).sum(axis=0)
        return design_criterion(info, search.criterion)

    best_x, best_value, converged = None, math.inf, False
    for index in order:
        x0 = np.log(grid[list(designs[index])])
        result = optimize.minimize(
            objective, x0, method="Nelder-Mead",
            options={"xatol": search.xatol, "fatol": search.fatol,
                     "maxiter": search.max_iterations, "maxfev": 2 * search.max_iterations}
        )
        if result.fun < best_value:
            best_x, best_value, converged = result.x, float(result.fun), bool(result.success)

    if best_x is None or not math.isfinite(best_value):
        raise NumericalError("Optimal-time search found no finite design",
                             {"kind": model_truth.KIND, "k": k})
    times = tuple(float(t) for t in np.exp(_separated(np.clip(best_x, *log_bounds), search.min_log_separation)))
    if not converged:
        raise NumericalError("Optimal-time refinement did not converge",
                             {"kind": model_truth.KIND, "k": k, "criterion": best_value},
                             best_point=times)
    if any(math.log(b / a) <= 1.01 * search.min_log_separation for a, b in zip(times[:-1], times[1:])):
        logger.info(f"Design with k={k} replicates support points at the minimum separation: {times}", "design",
                    console=False)

    duration_ms = (time.time() - start_time) * 1000
    logger.debug(f"Optimal times for {model_truth.KIND} (k={k}): {times} in {duration_ms:.2f}ms", "design")
    return times
