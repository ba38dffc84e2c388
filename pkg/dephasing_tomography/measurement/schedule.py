"""
Measurement schedules: ordered Ramsey times with shot allocations.
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Iterator, Sequence, Tuple

import numpy as np

from dephasing_tomography.utils.exceptions import ValidationError
from dephasing_tomography.utils.validation import validate_integer_param, validate_time_list


@dataclass(frozen=True)
class Schedule:
    """
    Strictly increasing positive times t_i with positive shot counts N_i.
    """

    times: Tuple[float, ...]
    shots: Tuple[int, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        errors = []
        is_valid, error = validate_time_list(list(times), strictly_increasing=True, allow_zero=False)
        if not is_valid:
            errors.append({"times": error})
        if len(self.shots) != len(times):
            errors.append({"shots": f"Expected {len(times)} shot counts, got {len(self.shots)}"})
        for index, count in enumerate(self.shots):
            is_valid, error = validate_integer_param(count, min_val=1)
            if not is_valid:
                errors.append({f"shots[{index}]": error})
        if errors:
            raise ValidationError("Invalid schedule", errors)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "shots", tuple(int(n) for n in self.shots))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[Any]]) -> "Schedule":
        """
        Build a schedule from (t, N) pairs.

        Args:
            pairs: Iterable of (time, shots)

        Returns:
            Schedule
        """
        pairs = [tuple(p) for p in pairs]
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @classmethod
    def equal_split(cls, times: Sequence[float], total_shots: int) -> "Schedule":
        """
        Split a shot budget evenly over the given times.

        The remainder goes one shot each to the earliest times.

        Args:
            times: Strictly increasing times
            total_shots: Shot budget, at least one per time

        Returns:
            Schedule with sum(shots) == total_shots
        """
        count = len(times)
        is_valid, error = validate_integer_param(total_shots, min_val=max(count, 1))
        if not is_valid:
            raise ValidationError("Invalid shot budget", [{"total_shots": error}])
        base, remainder = divmod(int(total_shots), count)
        shots = tuple(base + (1 if index < remainder else 0) for index in range(count))
        return cls(tuple(times), shots)

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[Tuple[float, int]]:
        return iter(zip(self.times, self.shots))

    @property
    def total_shots(self) -> int:
        return sum(self.shots)

    def times_array(self) -> np.ndarray:
        return np.array(self.times, dtype=float)

    def shots_array(self) -> np.ndarray:
        return np.array(self.shots, dtype=np.int64)

    def scaled(self, factor: int) -> "Schedule":
        """Schedule with every shot count multiplied by factor."""
        return Schedule(self.times, tuple(n * int(factor) for n in self.shots))

    def to_dict(self) -> Dict[str, Any]:
        return {"times": list(self.times), "shots": list(self.shots)}
