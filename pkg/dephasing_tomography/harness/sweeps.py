"""
Parameter sweeps producing plot-ready tables.

Each sweep evaluates one operation over a grid of true noise parameters and
returns one row per grid point in grid order. Failed points keep their row
with the error in the status column.
"""
from dataclasses import dataclass, replace
from itertools import product
from typing import Any, List, Optional, Sequence
import math

from dephasing_tomography.estimation.design import SearchConfig, optimal_times
from dephasing_tomography.harness.comparison import ComparisonSpec, compare
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.noise_models.displaced_lorentzian import DisplacedLorentzian
from dephasing_tomography.noise_models.non_markovianity import n_cp, n_td, negative_rate_intervals
from dephasing_tomography.noise_models.ornstein_uhlenbeck import OrnsteinUhlenbeck
from dephasing_tomography.utils.csv_utils import write_table_csv
from dephasing_tomography.utils.exceptions import NumericalError, ValidationError
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.parallel import run_indexed

STATUS_OK = "ok"


@dataclass
class SweepTable:
    """Header plus rows of a sweep."""

    header: List[str]
    rows: List[List[Any]]

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> List[Any]:
        index = self.header.index(name)
        return [row[index] for row in self.rows]

    def failed_rows(self) -> List[List[Any]]:
        status = self.header.index("status")
        return [row for row in self.rows if row[status] != STATUS_OK]

    def write_csv(self, path: str) -> str:
        return write_table_csv(path, self.header, self.rows)


def _status(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def _truth(T2: float, tau_c: float, delta_c: Optional[float]) -> AbstractNoiseModel:
    if delta_c is None:
        return OrnsteinUhlenbeck(T2=T2, tau_c=tau_c)
    return DisplacedLorentzian.from_timescales(T2, tau_c, delta_c)


def _check_grid(name: str, values: Sequence[float]) -> List[float]:
    values = [float(v) for v in values]
    if not values:
        raise ValidationError("Empty sweep grid", [{name: "needs at least one value"}])
    return values


def optimal_time_sweep(ratios: Sequence[float], delta_values: Optional[Sequence[float]] = None,
                       T2: float = 1.0, search: Optional[SearchConfig] = None,
                       threads: int = 1) -> SweepTable:
    """
    Optimal measurement times as a function of tau_c/T2 (and the detuning).

    Without detunings the truth is Ornstein-Uhlenbeck with two times per row;
    with detunings it is displaced-Lorentzian with three.

    Args:
        ratios: Values of tau_c/T2
        delta_values: Optional detunings, in units of 1/T2
        T2: Decoherence time of every truth
        search: Optimal-time search settings
        threads: Worker threads

    Returns:
        SweepTable with columns ratio[,delta_c],t1,t2[,t3],status; times in units of T2
    """
    ratios = _check_grid("ratios", ratios)
    deltas = [None] if delta_values is None else _check_grid("delta_values", delta_values)
    points = list(product(ratios, deltas))
    count = 2 if delta_values is None else 3

    def task(index: int) -> List[Any]:
        ratio, delta = points[index]
        truth = _truth(T2, ratio * T2, None if delta is None else delta / T2)
        key = [ratio] if delta is None else [ratio, delta]
        try:
            times = optimal_times(truth, search=search)
            status = STATUS_OK
        except NumericalError as exc:
            times = exc.best_point or (math.nan,) * count
            status = _status(exc)
        return key + [t / T2 for t in times] + [status]

    header = ["ratio"] + ([] if delta_values is None else ["delta_c"])
    header += [f"t{i + 1}" for i in range(count)] + ["status"]
    table = SweepTable(header, run_indexed(task, len(points), threads))
    logger.info(f"Optimal-time sweep: {len(table)} rows, {len(table.failed_rows())} flagged",
                "harness", console=False)
    return table


def nonmarkovianity_sweep(tau_values: Sequence[float], delta_values: Sequence[float], T2: float = 1.0,
                          t_max: Any = None, threads: int = 1) -> SweepTable:
    """
    Non-Markovianity measures over a (tau_c, delta_c) grid of displaced-Lorentzian truths.

    Args:
        tau_values: Correlation times
        delta_values: Detunings
        T2: Decoherence time of every truth
        t_max: Horizon of the measures, or None/"auto"
        threads: Worker threads

    Returns:
        SweepTable with columns tau_c,delta_c,kappa,g2n,n_cp,n_td,
        window_start,window_end,status; the window is the first negative-rate interval
    """
    points = list(product(_check_grid("tau_values", tau_values), _check_grid("delta_values", delta_values)))

    def task(index: int) -> List[Any]:
        tau_c, delta_c = points[index]
        truth = DisplacedLorentzian.from_timescales(T2, tau_c, delta_c)
        row = [tau_c, delta_c, truth.kappa, truth.g2n]
        try:
            windows = negative_rate_intervals(truth, t_max)
            start, end = windows[0] if windows else (None, None)
            return row + [n_cp(truth, t_max), n_td(truth, t_max), start, end, STATUS_OK]
        except NumericalError as exc:
            return row + [math.nan, math.nan, None, None, _status(exc)]

    header = ["tau_c", "delta_c", "kappa", "g2n", "n_cp", "n_td", "window_start", "window_end", "status"]
    table = SweepTable(header, run_indexed(task, len(points), threads))
    logger.info(f"Non-Markovianity sweep: {len(table)} rows, {len(table.failed_rows())} flagged",
                "harness", console=False)
    return table


def ratio_sweep(base: ComparisonSpec, tau_values: Sequence[float],
                delta_values: Optional[Sequence[float]] = None,
                n_shots: Optional[Sequence[int]] = None, mode: str = "bayesian") -> SweepTable:
    """
    Precision ratios over a grid of truths and shot budgets.

    Every grid point reruns compare() with the base comparison settings; the
    truth keeps the base truth's T2.

    Args:
        base: Comparison settings shared by every point
        tau_values: Correlation times
        delta_values: Optional detunings (displaced-Lorentzian truths)
        n_shots: Optional shot budgets (default the base budget)
        mode: Comparison mode passed to compare()

    Returns:
        SweepTable with columns tau_c,delta_c,n_shot,mode,r,r_squared,
        det_metric_a,det_metric_b,status
    """
    T2 = base.truth.t2
    deltas = [None] if delta_values is None else _check_grid("delta_values", delta_values)
    shots = [base.n_shot] if n_shots is None else [int(n) for n in n_shots]
    header = ["tau_c", "delta_c", "n_shot", "mode", "r", "r_squared", "det_metric_a", "det_metric_b", "status"]

    rows = []
    for tau_c, delta_c, n_shot in product(_check_grid("tau_values", tau_values), deltas, shots):
        spec = replace(base, truth=_truth(T2, tau_c, delta_c), n_shot=n_shot)
        try:
            reports = compare(spec, mode)
        except NumericalError as exc:
            rows.append([tau_c, delta_c, n_shot, mode, math.nan, math.nan, math.nan, math.nan, _status(exc)])
            continue
        for name, report in reports.items():
            rows.append([tau_c, delta_c, n_shot, name, report.ratio, report.ratio_squared,
                         report.det_metric_a, report.det_metric_b, STATUS_OK])
        logger.debug(f"Ratio sweep point tau_c={tau_c}, delta_c={delta_c}, N={n_shot} done", "harness")

    table = SweepTable(header, rows)
    logger.info(f"Ratio sweep: {len(table)} rows, {len(table.failed_rows())} flagged", "harness", console=False)
    return table
