"""
Parameter vectors tagged with their noise family.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class ParamVector:
    """
    Ordered parameter values of one noise family.

    The order is the family's PARAM_NAMES order: (T2,) for White, (T2, tau_c)
    for Ornstein-Uhlenbeck and (g2n, kappa, delta_c) for Displaced-Lorentzian.
    """

    kind: str
    values: Tuple[float, ...]

    def __post_init__(self):
        from dephasing_tomography.core.model_factory import model_class

        cls = model_class(self.kind)
        values = tuple(float(v) for v in self.values)
        if len(values) != cls.dimension():
            from dephasing_tomography.utils.exceptions import ValidationError
            raise ValidationError(
                f"{cls.KIND} takes {cls.dimension()} parameters, got {len(values)}",
                [{"values": f"expected order {cls.PARAM_NAMES}"}]
            )
        object.__setattr__(self, "kind", cls.KIND)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls, kind: str, values: Sequence[float]) -> "ParamVector":
        return cls(kind, tuple(np.asarray(values, dtype=float).ravel()))

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def to_model(self):
        """Build the noise model; validates the parameter domain."""
        from dephasing_tomography.core.model_factory import model_class
        return model_class(self.kind)(*self.values)
