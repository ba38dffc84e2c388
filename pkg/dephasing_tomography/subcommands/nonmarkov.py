"""
Nonmarkov subcommand: non-Markovianity measures and the Markovian boundary.
"""
import argparse
from typing import Any, Dict, List

import config
from dephasing_tomography.harness.sweeps import nonmarkovianity_sweep
from dephasing_tomography.noise_models.non_markovianity import (
    markovian_boundary,
    n_cp,
    n_td,
    negative_rate_intervals,
    resolve_horizon,
)
from dephasing_tomography.subcommands._common import (
    add_common_arguments,
    parse_model,
    run_command,
    write_report,
)
from dephasing_tomography.utils.csv_utils import write_table_csv
from dephasing_tomography.utils.exceptions import ValidationError
from dephasing_tomography.utils.validation import check_required_keys, check_unknown_keys

COMMAND_NAME = "nonmarkov"

CONFIG_KEYS = ("model", "sweep", "t_max", "boundary")

SWEEP_KEYS = ("tau_values", "delta_values", "T2")


def register_subcommand(subparsers: Any) -> None:
    """
    Register the 'nonmarkov' subcommand with its arguments.

    Args:
        subparsers: Subparsers object from argparse
    """
    parser = subparsers.add_parser(
        COMMAND_NAME,
        help="Quantify non-Markovianity",
        description="Divisibility and trace-distance measures over negative-rate windows",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    add_common_arguments(parser)


def _check_block(block: Any, name: str, keys, required) -> Dict[str, Any]:
    if not isinstance(block, dict):
        raise ValidationError(f"Invalid {name}", [{name: "expected an object"}])
    errors = check_unknown_keys(block, keys, name)
    errors += check_required_keys(block, required, name)
    if errors:
        raise ValidationError(f"Invalid {name}", errors)
    return block


def nonmarkov(resolved: Dict[str, Any], output_dir: str, threads: int) -> List[str]:
    """Evaluate the measures for one model or a (tau_c, delta_c) sweep."""
    if ("model" in resolved) == ("sweep" in resolved):
        raise ValidationError("Invalid config", [{"model": "give exactly one of model and sweep"}])
    t_max = resolved.get("t_max")
    csv_name = config.get_output_file_path(output_dir, "nonmarkov.csv")
    paths: List[str] = []
    payload: Dict[str, Any] = {}

    if "model" in resolved:
        model = parse_model(resolved["model"])
        horizon = resolve_horizon(model, t_max)
        windows = negative_rate_intervals(model, horizon)
        measures = {"n_cp": n_cp(model, horizon), "n_td": n_td(model, horizon)}
        paths.append(write_table_csv(csv_name, ["start", "end"], windows))
        payload.update({"model": model.to_dict(), "t_max": horizon, "windows": windows, **measures})
    else:
        block = _check_block(resolved["sweep"], "sweep", SWEEP_KEYS, ("tau_values", "delta_values"))
        table = nonmarkovianity_sweep(block["tau_values"], block["delta_values"], block.get("T2", 1.0),
                                      t_max, threads)
        paths.append(table.write_csv(csv_name))
        payload.update({"rows": len(table), "flagged_rows": len(table.failed_rows())})

    if "boundary" in resolved:
        block = _check_block(resolved["boundary"], "boundary", ("kappas", "tol"), ("kappas",))
        rows = []
        for kappa in block["kappas"]:
            delta = markovian_boundary(kappa, block.get("tol"))
            rows.append([kappa, delta, delta / kappa])
        paths.append(write_table_csv(config.get_output_file_path(output_dir, "boundary.csv"),
                                     ["kappa", "delta_c", "ratio"], rows))
        payload["boundary"] = rows

    paths.append(write_report(output_dir, "nonmarkov.json", COMMAND_NAME, resolved, payload))
    return paths


def main(args: argparse.Namespace) -> int:
    """
    Main function for the 'nonmarkov' subcommand.

    Args:
        args: Parsed arguments

    Returns:
        Exit code
    """
    return run_command(COMMAND_NAME, args, CONFIG_KEYS, nonmarkov)
