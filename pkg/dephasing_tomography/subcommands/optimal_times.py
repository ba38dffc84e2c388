"""
Optimal-times subcommand: D-optimal measurement times for one model or a sweep.
"""
import argparse
from typing import Any, Dict, List

import config
from dephasing_tomography.estimation.design import SearchConfig, optimal_times
from dephasing_tomography.estimation.fisher import asymptotic_cov
from dephasing_tomography.harness.sweeps import optimal_time_sweep
from dephasing_tomography.measurement.schedule import Schedule
from dephasing_tomography.subcommands._common import (
    add_common_arguments,
    parse_model,
    run_command,
    write_report,
)
from dephasing_tomography.utils.csv_utils import write_table_csv
from dephasing_tomography.utils.exceptions import SingularMatrixError, ValidationError
from dephasing_tomography.utils.math_utils import det_metric
from dephasing_tomography.utils.validation import check_unknown_keys

COMMAND_NAME = "optimal-times"

CONFIG_KEYS = ("model", "k", "sweep", "search")

SWEEP_KEYS = ("ratios", "delta_values", "T2")


def register_subcommand(subparsers: Any) -> None:
    """
    Register the 'optimal-times' subcommand with its arguments.

    Args:
        subparsers: Subparsers object from argparse
    """
    parser = subparsers.add_parser(
        COMMAND_NAME,
        help="Compute optimal measurement times",
        description="Minimize the asymptotic covariance determinant over measurement times",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    add_common_arguments(parser)


def _single(resolved: Dict[str, Any], output_dir: str, search: SearchConfig) -> List[str]:
    model = parse_model(resolved["model"])
    times = optimal_times(model, resolved.get("k"), search)
    header = [f"t{i + 1}" for i in range(len(times))]
    csv_path = write_table_csv(config.get_output_file_path(output_dir, "optimal_times.csv"), header, [times])

    payload: Dict[str, Any] = {"model": model.to_dict(), "times": list(times)}
    if len(set(times)) == len(times):
        # unit shots per time; covariance scales as 1/N
        try:
            cov = asymptotic_cov(model, Schedule(times, (1,) * len(times)))
            payload.update({"asymptotic_cov_per_shot": cov, "det_metric_per_shot": det_metric(cov)})
        except SingularMatrixError:
            payload["asymptotic_cov_per_shot"] = None
    return [csv_path, write_report(output_dir, "optimal_times.json", COMMAND_NAME, resolved, payload)]


def _sweep(resolved: Dict[str, Any], output_dir: str, search: SearchConfig, threads: int) -> List[str]:
    block = resolved["sweep"]
    if not isinstance(block, dict):
        raise ValidationError("Invalid sweep", [{"sweep": "expected an object"}])
    errors = check_unknown_keys(block, SWEEP_KEYS, "sweep")
    if "ratios" not in block:
        errors.append({"sweep.ratios": "Missing required key"})
    if errors:
        raise ValidationError("Invalid sweep", errors)

    table = optimal_time_sweep(block["ratios"], block.get("delta_values"), block.get("T2", 1.0),
                               search, threads)
    csv_path = table.write_csv(config.get_output_file_path(output_dir, "optimal_times.csv"))
    payload = {"rows": len(table), "flagged_rows": len(table.failed_rows())}
    return [csv_path, write_report(output_dir, "optimal_times.json", COMMAND_NAME, resolved, payload)]


def optimal_times_command(resolved: Dict[str, Any], output_dir: str, threads: int) -> List[str]:
    """Dispatch to the single-model or the sweep form of the command."""
    if ("model" in resolved) == ("sweep" in resolved):
        raise ValidationError("Invalid config", [{"model": "give exactly one of model and sweep"}])
    if "k" in resolved and "sweep" in resolved:
        raise ValidationError("Invalid config", [{"k": "only applies to a single model"}])
    search = SearchConfig.from_dict(resolved.get("search"))
    if "model" in resolved:
        return _single(resolved, output_dir, search)
    return _sweep(resolved, output_dir, search, threads)


def main(args: argparse.Namespace) -> int:
    """
    Main function for the 'optimal-times' subcommand.

    Args:
        args: Parsed arguments

    Returns:
        Exit code
    """
    return run_command(COMMAND_NAME, args, CONFIG_KEYS, optimal_times_command)
