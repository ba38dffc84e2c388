"""
Ramsey outcome probabilities and synthetic measurement records.

A qubit prepared in |+> dephases for a time t and is measured in the x basis:

    p(m_x) = (1 + (-1)^m_x e^{-Gamma(t)}) / 2
"""
from typing import Optional

import numpy as np

from dephasing_tomography.core.interfaces import TimeLike
from dephasing_tomography.measurement.dataset import DataSet
from dephasing_tomography.measurement.schedule import Schedule
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.utils.exceptions import ValidationError
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.random_utils import RandomGenerator, STREAM_DATA


def prob0_from_attenuation(attenuation: np.ndarray) -> np.ndarray:
    """p(0) = (1 + e^{-Gamma})/2."""
    return 0.5 * (1.0 + np.exp(-attenuation))


def ramsey_prob(model: AbstractNoiseModel, t: TimeLike, outcome: int = 0) -> np.ndarray:
    """
    Probability of a Ramsey outcome.

    Args:
        model: Noise model
        t: Time(s) >= 0
        outcome: 0 or 1

    Returns:
        Probabilities with the shape of t; p(0) >= 1/2 and p(0) + p(1) == 1

    Raises:
        DomainError: If t < 0
        ValidationError: If outcome is not 0 or 1
    """
    if outcome not in (0, 1):
        raise ValidationError("Invalid outcome", [{"outcome": f"must be 0 or 1, got {outcome}"}])
    p0 = prob0_from_attenuation(model.attenuation(t))
    if outcome == 0:
        return p0
    return 1.0 - p0


def phase_flip_prob(model: AbstractNoiseModel, t: TimeLike) -> np.ndarray:
    """
    Phase-flip probability p(t) = (1 - e^{-Gamma(t)})/2.

    Args:
        model: Noise model
        t: Time(s) >= 0

    Returns:
        Probabilities in [0, 1/2)
    """
    return -0.5 * np.expm1(-model.attenuation(t))


def sample_counts(model: AbstractNoiseModel, schedule: Schedule, rng: RandomGenerator) -> np.ndarray:
    """
    Draw outcome-0 counts for every entry of a schedule.

    Args:
        model: Noise model generating the data
        schedule: Times and shots
        rng: Random generator

    Returns:
        Integer counts, one per schedule entry
    """
    p0 = ramsey_prob(model, schedule.times_array(), 0)
    return rng.binomial(schedule.shots_array(), p0)


def sample_dataset(model: AbstractNoiseModel, schedule: Schedule, seed: int,
                   rng: Optional[RandomGenerator] = None) -> DataSet:
    """
    Simulate a measurement record.

    Each count is an independent binomial draw with parameters
    (N_i, p(0 | model, t_i)); the draw is a pure function of the seed.

    Args:
        model: Noise model generating the data
        schedule: Times and shots
        seed: 64-bit seed
        rng: Optional generator overriding the one built from seed

    Returns:
        DataSet carrying the seed and the truth model
    """
    rng = rng if rng is not None else RandomGenerator(seed, STREAM_DATA)
    counts = sample_counts(model, schedule, rng)
    logger.debug(f"Sampled {len(schedule)} times, {schedule.total_shots} shots from {model.KIND}", "measurement")
    return DataSet.from_arrays(schedule.times, schedule.shots, counts, seed=seed, model_truth=model)
