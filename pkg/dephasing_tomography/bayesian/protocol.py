"""
Sequential adaptive Bayesian estimation.

Each step picks the candidate time with the largest expected information
gain, draws a batch of outcomes from the true model and conditions the
particle ensemble on it.
"""
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple
import time

import numpy as np

import config
from dephasing_tomography.bayesian.ensemble import ParticleEnsemble
from dephasing_tomography.bayesian.information import candidate_grid, select_time
from dephasing_tomography.bayesian.updates import bayes_update
from dephasing_tomography.core.model_factory import model_class
from dephasing_tomography.estimation.fitting import box_around
from dephasing_tomography.measurement.ramsey import ramsey_prob
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.exceptions import DegenerateUpdateError, ValidationError
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.random_utils import (
    RandomGenerator,
    STREAM_DATA,
    STREAM_PRIOR,
    STREAM_RESAMPLE,
)
from dephasing_tomography.utils.validation import (
    check_unknown_keys,
    raise_if_invalid,
    validate_bounds,
    validate_integer_param,
    validate_numeric_param,
    validate_seed,
)

# Smallest ensemble accepted by a protocol
MIN_PARTICLES = 100


@dataclass(frozen=True)
class ProtocolConfig:
    """
    Settings of a sequential Bayesian protocol.

    Attributes:
        kind: Model family of the prior
        low, high: Uniform prior box
        particles: Ensemble size (default depends on the dimension)
        shots_per_step: Shots per batch
        steps: Number of batches
        grid_points, grid_low, grid_high: Candidate grid, in units of the posterior T2
        grid_refresh: Relative T2 drift that rebuilds the grid
        resample_a: Liu-West shrinkage
        resample_threshold: Resample when ESS < threshold K
        seed: 64-bit seed
        max_shots: Optional cap on the total shots; the last batch is truncated
    """

    kind: str
    low: Tuple[float, ...]
    high: Tuple[float, ...]
    particles: Optional[int] = None
    shots_per_step: int = config.PROTOCOL_DEFAULTS["shots_per_step"]
    steps: int = config.PROTOCOL_DEFAULTS["steps"]
    grid_points: int = config.PROTOCOL_DEFAULTS["grid_points"]
    grid_low: float = config.PROTOCOL_DEFAULTS["grid_low"]
    grid_high: float = config.PROTOCOL_DEFAULTS["grid_high"]
    grid_refresh: float = config.PROTOCOL_DEFAULTS["grid_refresh"]
    resample_a: float = config.RESAMPLER_DEFAULTS["a"]
    resample_threshold: float = config.RESAMPLER_DEFAULTS["threshold"]
    seed: int = 0
    max_shots: Optional[int] = None

    def __post_init__(self):
        cls = model_class(self.kind)
        object.__setattr__(self, "kind", cls.KIND)
        low, high = tuple(float(v) for v in self.low), tuple(float(v) for v in self.high)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)
        if self.particles is None:
            object.__setattr__(self, "particles",
                               config.PROTOCOL_DEFAULTS["particles_by_dimension"][cls.dimension()])

        errors = []
        is_valid, bound_errors = validate_bounds(low, high, cls.dimension())
        if not is_valid:
            errors.extend(bound_errors)
        else:
            for name, lo in zip(cls.PARAM_NAMES, low):
                if lo < 0.0 or (lo == 0.0 and name not in cls.NONNEGATIVE_PARAMS):
                    errors.append({f"low.{name}": f"Prior box leaves the parameter domain, low = {lo}"})
        for name, minimum in (("particles", MIN_PARTICLES), ("shots_per_step", 1), ("steps", 1),
                              ("grid_points", 1)):
            is_valid, error = validate_integer_param(getattr(self, name), min_val=minimum)
            if not is_valid:
                errors.append({name: error})
        if self.max_shots is not None:
            is_valid, error = validate_integer_param(self.max_shots, min_val=1)
            if not is_valid:
                errors.append({"max_shots": error})
        for name in ("grid_low", "grid_high", "grid_refresh"):
            is_valid, error = validate_numeric_param(getattr(self, name), min_val=0.0, exclusive_min=True)
            if not is_valid:
                errors.append({name: error})
        if not errors and self.grid_low >= self.grid_high and self.grid_points > 1:
            errors.append({"grid_low": "must be below grid_high"})
        is_valid, error = validate_numeric_param(self.resample_a, min_val=0.0, max_val=1.0, exclusive_min=True)
        if not is_valid:
            errors.append({"resample_a": error})
        is_valid, error = validate_numeric_param(self.resample_threshold, min_val=0.0, max_val=1.0)
        if not is_valid:
            errors.append({"resample_threshold": error})
        is_valid, error = validate_seed(self.seed)
        if not is_valid:
            errors.append({"seed": error})
        raise_if_invalid((not errors, errors or None), "Invalid protocol configuration")

    @classmethod
    def around(cls, truth: AbstractNoiseModel, factor: float = config.PROTOCOL_DEFAULTS["prior_factor"],
               **kwargs) -> "ProtocolConfig":
        """Config whose prior box is [theta/factor, factor theta] around the truth."""
        low, high = box_around(truth, factor)
        return cls(kind=truth.KIND, low=low, high=high, **kwargs)

    @classmethod
    def from_dict(cls, block: Dict[str, Any]) -> "ProtocolConfig":
        """
        Build a config from a JSON block; unknown keys are rejected.

        Args:
            block: Mapping with the dataclass field names

        Returns:
            ProtocolConfig
        """
        allowed = [f.name for f in fields(cls)]
        errors = check_unknown_keys(block, allowed, "protocol")
        errors += [{f"protocol.{key}": "Missing required key"} for key in ("kind", "low", "high")
                   if key not in block]
        raise_if_invalid((not errors, errors or None), "Invalid protocol configuration")
        return cls(**block)

    @property
    def total_shots(self) -> int:
        planned = self.steps * self.shots_per_step
        return planned if self.max_shots is None else min(planned, self.max_shots)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class TraceStep(NamedTuple):
    """One protocol step: the measurement and the posterior after it."""
    step: int
    t: float
    shots: int
    count0: int
    mean: Tuple[float, ...]
    cov: Tuple[Tuple[float, ...], ...]
    ess: float


@dataclass
class ProtocolTrace:
    """
    Record of a protocol run.

    Attributes:
        kind: Model family
        seed: Seed of the run
        steps: Per-step records
        ensemble: Final ensemble (not serialized)
    """

    kind: str
    seed: int
    steps: List[TraceStep] = field(default_factory=list)
    ensemble: Optional[ParticleEnsemble] = None

    def __len__(self) -> int:
        return len(self.steps)

    def header(self) -> List[str]:
        """CSV header step,t,shots,count0,mean_<param>...,cov_<i>_<j>...,ess (upper triangle)."""
        names = model_class(self.kind).PARAM_NAMES
        n = len(names)
        columns = ["step", "t", "shots", "count0"]
        columns += [f"mean_{name}" for name in names]
        columns += [f"cov_{i}_{j}" for i in range(n) for j in range(i, n)]
        return columns + ["ess"]

    def rows(self) -> List[List[Any]]:
        rows = []
        for record in self.steps:
            n = len(record.mean)
            cov = [record.cov[i][j] for i in range(n) for j in range(i, n)]
            rows.append([record.step, record.t, record.shots, record.count0, *record.mean, *cov, record.ess])
        return rows

    @property
    def times(self) -> np.ndarray:
        return np.array([record.t for record in self.steps])

    @property
    def total_shots(self) -> int:
        return sum(record.shots for record in self.steps)

    @property
    def final_mean(self) -> np.ndarray:
        if not self.steps:
            raise ValidationError("Empty protocol trace", [{"trace": "no steps recorded"}])
        return np.array(self.steps[-1].mean)

    @property
    def final_cov(self) -> np.ndarray:
        if not self.steps:
            raise ValidationError("Empty protocol trace", [{"trace": "no steps recorded"}])
        return np.array(self.steps[-1].cov)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "total_shots": self.total_shots,
            "steps": [record._asdict() for record in self.steps]
        }


def init_prior(protocol_config: ProtocolConfig) -> ParticleEnsemble:
    """
    Draw the uniform prior ensemble.

    Args:
        protocol_config: Protocol settings

    Returns:
        K particles i.i.d. uniform in the prior box with weights 1/K
    """
    rng = RandomGenerator(protocol_config.seed, STREAM_PRIOR)
    size = protocol_config.particles
    particles = rng.uniform_box(protocol_config.low, protocol_config.high, size)
    return ParticleEnsemble(protocol_config.kind, particles, np.full(size, 1.0 / size),
                            np.array(protocol_config.low), np.array(protocol_config.high))


def _mean_t2(ensemble: ParticleEnsemble, mean: np.ndarray) -> float:
    return float(ensemble.model_class.batch_t2(mean[None, :])[0])


def run_protocol(truth: AbstractNoiseModel, protocol_config: ProtocolConfig) -> ProtocolTrace:
    """
    Run the adaptive protocol against a simulated truth.

    Args:
        truth: Model generating the outcomes (same family as the prior)
        protocol_config: Protocol settings

    Returns:
        ProtocolTrace with one record per step

    Raises:
        ValidationError: If truth and prior families differ
        DegenerateUpdateError: If an update degenerates; carries the trace so far
    """
    start_time = time.time()
    if truth.KIND != protocol_config.kind:
        raise ValidationError("Truth and prior families differ",
                              [{"truth": f"{truth.KIND} vs prior {protocol_config.kind}"}])

    base_rng = RandomGenerator(protocol_config.seed)
    data_rng = base_rng.spawn(STREAM_DATA)
    resample_rng = base_rng.spawn(STREAM_RESAMPLE)
    resampler = {"a": protocol_config.resample_a, "threshold": protocol_config.resample_threshold}

    ensemble = init_prior(protocol_config)
    mean, _ = ensemble.mean_and_cov()
    t2_center = _mean_t2(ensemble, mean)
    grid_args = (protocol_config.grid_points, protocol_config.grid_low, protocol_config.grid_high)
    grid = candidate_grid(t2_center, *grid_args)

    trace = ProtocolTrace(truth.KIND, protocol_config.seed)
    remaining = protocol_config.total_shots
    for step in range(1, protocol_config.steps + 1):
        shots = min(protocol_config.shots_per_step, remaining)
        if shots == 0:
            break
        t = select_time(ensemble, grid, shots)
        count0 = int(data_rng.binomial(shots, float(ramsey_prob(truth, t))))
        try:
            ensemble = bayes_update(ensemble, t, shots, count0, rng=resample_rng, resampler=resampler)
        except DegenerateUpdateError as exc:
            trace.ensemble = ensemble
            logger.warning(f"Protocol degenerated at step {step} (t={t:.6g}, k0={count0}/{shots})", "bayes")
            raise DegenerateUpdateError(str(exc), exc.diagnostics, trace=trace) from exc
        remaining -= shots

        mean, cov = ensemble.mean_and_cov()
        trace.steps.append(TraceStep(step, float(t), shots, count0, tuple(mean.tolist()),
                                     tuple(tuple(row) for row in cov.tolist()), ensemble.ess()))

        t2_mean = _mean_t2(ensemble, mean)
        if abs(t2_mean - t2_center) > protocol_config.grid_refresh * t2_center:
            logger.debug(f"Candidate grid recentred from T2={t2_center:.6g} to {t2_mean:.6g} at step {step}",
                         "bayes")
            t2_center = t2_mean
            grid = candidate_grid(t2_center, *grid_args)
        logger.debug(f"Step {step}: t={t:.6g}, k0={count0}/{shots}, ESS={ensemble.ess():.1f}", "bayes")

    trace.ensemble = ensemble
    duration_ms = (time.time() - start_time) * 1000
    logger.debug(f"{truth.KIND} protocol: {len(trace)} steps, {trace.total_shots} shots "
                 f"in {duration_ms:.2f}ms", "bayes")
    return trace
