"""
Ramsey measurement simulation: schedules, records and sampling.
"""
from dephasing_tomography.measurement.schedule import Schedule
from dephasing_tomography.measurement.dataset import DataSet, Record
from dephasing_tomography.measurement.ramsey import (
    phase_flip_prob,
    ramsey_prob,
    sample_dataset,
)
