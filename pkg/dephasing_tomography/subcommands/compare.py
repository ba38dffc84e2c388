"""
Compare subcommand: Monte-Carlo precision ratios between estimation strategies.
"""
import argparse
from typing import Any, Dict, List

import config
from dephasing_tomography.estimation.design import SearchConfig
from dephasing_tomography.harness.comparison import COMPARISON_MODES, ComparisonSpec, compare
from dephasing_tomography.harness.sweeps import ratio_sweep
from dephasing_tomography.subcommands._common import (
    add_common_arguments,
    parse_model,
    require_keys,
    run_command,
    write_report,
)
from dephasing_tomography.utils.exceptions import ReliabilityError, ValidationError
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.validation import check_unknown_keys, validate_string_param

COMMAND_NAME = "compare"

SPEC_KEYS = ("n_shot", "schedule_source", "explicit_times", "uniform_interval", "uniform_points",
             "frequentist_runs", "bayesian_runs", "fit_restarts", "cost_kind", "protocol")

CONFIG_KEYS = ("truth", "mode", "search", "sweep") + SPEC_KEYS

SWEEP_KEYS = ("tau_values", "delta_values", "n_shots")


def register_subcommand(subparsers: Any) -> None:
    """
    Register the 'compare' subcommand with its arguments.

    Args:
        subparsers: Subparsers object from argparse
    """
    parser = subparsers.add_parser(
        COMMAND_NAME,
        help="Compare frequentist, uniform and Bayesian estimators",
        description="Monte-Carlo precision ratios at a matched shot budget",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    add_common_arguments(parser)


def build_spec(resolved: Dict[str, Any], threads: int) -> ComparisonSpec:
    """ComparisonSpec from the resolved config."""
    require_keys(resolved, ("truth", "n_shot"))
    kwargs = {key: resolved[key] for key in SPEC_KEYS if key in resolved}
    for key in ("explicit_times", "uniform_interval"):
        if kwargs.get(key) is not None:
            kwargs[key] = tuple(kwargs[key])
    return ComparisonSpec(truth=parse_model(resolved["truth"], "truth"),
                          search=SearchConfig.from_dict(resolved.get("search")),
                          seed=resolved["seed"], threads=threads, **kwargs)


def compare_command(resolved: Dict[str, Any], output_dir: str, threads: int) -> List[str]:
    """Run the comparison (or a ratio sweep) and write its report."""
    mode = resolved.get("mode", "bayesian")
    is_valid, error = validate_string_param(mode, COMPARISON_MODES, case_sensitive=False)
    if not is_valid:
        raise ValidationError("Invalid config", [{"mode": error}])
    spec = build_spec(resolved, threads)

    if "sweep" in resolved:
        block = resolved["sweep"]
        if not isinstance(block, dict):
            raise ValidationError("Invalid sweep", [{"sweep": "expected an object"}])
        errors = check_unknown_keys(block, SWEEP_KEYS, "sweep")
        if "tau_values" not in block:
            errors.append({"sweep.tau_values": "Missing required key"})
        if errors:
            raise ValidationError("Invalid sweep", errors)
        table = ratio_sweep(spec, block["tau_values"], block.get("delta_values"), block.get("n_shots"), mode)
        csv_path = table.write_csv(config.get_output_file_path(output_dir, "ratio_sweep.csv"))
        payload = {"rows": len(table), "flagged_rows": len(table.failed_rows())}
        return [csv_path, write_report(output_dir, "ratio_sweep.json", COMMAND_NAME, resolved, payload)]

    try:
        reports = compare(spec, mode)
    except ReliabilityError as e:
        if e.partial is not None:
            write_report(output_dir, "partial.json", COMMAND_NAME, resolved, {"partial": e.partial.to_dict()})
        raise
    for name, report in reports.items():
        print(f"{name}: r = {report.ratio:.6g}, r^2 = {report.ratio_squared:.6g}")
        logger.info(f"{name}: r = {report.ratio:.6g}", "cli", console=False)
    payload = {"spec": spec.to_dict(), "reports": {name: r.to_dict() for name, r in reports.items()}}
    return [write_report(output_dir, "report.json", COMMAND_NAME, resolved, payload)]


def main(args: argparse.Namespace) -> int:
    """
    Main function for the 'compare' subcommand.

    Args:
        args: Parsed arguments

    Returns:
        Exit code
    """
    return run_command(COMMAND_NAME, args, CONFIG_KEYS, compare_command)
