"""
Binomial measurement records.

A DataSet stores, per Ramsey time, the number of shots and the number of
outcome-0 results; outcome-1 counts are derived.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from dephasing_tomography.utils.exceptions import ValidationError
from dephasing_tomography.utils.validation import validate_integer_param, validate_numeric_param


class Record(NamedTuple):
    """One measured time: t, shot count N and outcome-0 count N0."""
    t: float
    shots: int
    count0: int


def validate_record(index: int, t: Any, shots: Any, count0: Any) -> list:
    """
    Check one record's domain.

    Returns:
        List of {field: message} errors
    """
    errors = []
    is_valid, error = validate_numeric_param(t, min_val=0.0, exclusive_min=True)
    if not is_valid:
        errors.append({f"records[{index}].t": error})
    is_valid, error = validate_integer_param(shots, min_val=1)
    if not is_valid:
        errors.append({f"records[{index}].shots": error})
    is_valid, error = validate_integer_param(count0, min_val=0)
    if not is_valid:
        errors.append({f"records[{index}].count0": error})
    elif not errors and int(count0) > int(shots):
        errors.append({f"records[{index}].count0": f"count0 {count0} exceeds shots {shots}"})
    return errors


@dataclass(frozen=True)
class DataSet:
    """
    Ordered measurement records with provenance.

    Attributes:
        records: Tuple of Record(t, shots, count0)
        seed: Seed that produced the data, if simulated
        model_truth: Model that produced the data, if simulated
    """

    records: Tuple[Record, ...]
    seed: Optional[int] = None
    model_truth: Optional[Any] = field(default=None, compare=False)

    def __post_init__(self):
        errors = []
        for index, record in enumerate(self.records):
            errors.extend(validate_record(index, *record))
        if not self.records:
            errors.append({"records": "DataSet needs at least one record"})
        if errors:
            raise ValidationError("Invalid data set", errors)
        object.__setattr__(self, "records", tuple(
            Record(float(r[0]), int(r[1]), int(r[2])) for r in self.records
        ))

    @classmethod
    def from_arrays(cls, times: Sequence[float], shots: Sequence[int], counts0: Sequence[int],
                    seed: Optional[int] = None, model_truth: Optional[Any] = None) -> "DataSet":
        records = tuple(Record(t, n, k) for t, n, k in zip(times, shots, counts0))
        return cls(records, seed=seed, model_truth=model_truth)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterable[Record]:
        return iter(self.records)

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records], dtype=float)

    @property
    def shots(self) -> np.ndarray:
        return np.array([r.shots for r in self.records], dtype=np.int64)

    @property
    def counts0(self) -> np.ndarray:
        return np.array([r.count0 for r in self.records], dtype=np.int64)

    @property
    def counts1(self) -> np.ndarray:
        return self.shots - self.counts0

    @property
    def frequencies(self) -> np.ndarray:
        """Relative frequencies f_i(0) = N_i0/N_i."""
        return self.counts0 / self.shots

    @property
    def total_shots(self) -> int:
        return int(self.shots.sum())

    def distinct_times(self) -> int:
        return len(set(r.t for r in self.records))

    def merged(self, other: "DataSet") -> "DataSet":
        """Concatenate records, keeping this set's provenance."""
        return DataSet(self.records + other.records, seed=self.seed, model_truth=self.model_truth)

    def to_dict(self) -> Dict[str, Any]:
        """JSON sidecar: provenance only; records live in the CSV."""
        return {
            "seed": self.seed,
            "model_truth": self.model_truth.to_dict() if self.model_truth is not None else None,
            "records": len(self.records),
            "total_shots": self.total_shots
        }
