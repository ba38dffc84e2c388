"""
Simulate subcommand: draw a synthetic Ramsey measurement record.
"""
import argparse
from typing import Any, Dict, List

import config
from dephasing_tomography.measurement.ramsey import sample_dataset
from dephasing_tomography.measurement.schedule import Schedule
from dephasing_tomography.subcommands._common import (
    add_common_arguments,
    parse_model,
    require_keys,
    run_command,
    write_report,
)
from dephasing_tomography.utils.csv_utils import write_dataset_csv
from dephasing_tomography.utils.exceptions import ValidationError
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.validation import check_unknown_keys

COMMAND_NAME = "simulate"

CONFIG_KEYS = ("model", "schedule")


def register_subcommand(subparsers: Any) -> None:
    """
    Register the 'simulate' subcommand with its arguments.

    Args:
        subparsers: Subparsers object from argparse
    """
    parser = subparsers.add_parser(
        COMMAND_NAME,
        help="Simulate a Ramsey measurement record",
        description="Draw binomial outcome counts from a noise model on a schedule",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    add_common_arguments(parser)


def parse_schedule(block: Any) -> Schedule:
    """
    Build a schedule from {"times": [...], "shots": [...]} or {"times": [...], "total_shots": N}.
    """
    if not isinstance(block, dict):
        raise ValidationError("Invalid schedule", [{"schedule": "expected an object"}])
    errors = check_unknown_keys(block, ("times", "shots", "total_shots"), "schedule")
    if "times" not in block:
        errors.append({"schedule.times": "Missing required key"})
    if ("shots" in block) == ("total_shots" in block):
        errors.append({"schedule": "give exactly one of shots and total_shots"})
    if errors:
        raise ValidationError("Invalid schedule", errors)
    if "total_shots" in block:
        return Schedule.equal_split(block["times"], block["total_shots"])
    return Schedule(tuple(block["times"]), tuple(block["shots"]))


def simulate(resolved: Dict[str, Any], output_dir: str, threads: int) -> List[str]:
    """Draw the record and write dataset.csv with its JSON sidecar."""
    require_keys(resolved, CONFIG_KEYS)
    model = parse_model(resolved["model"])
    schedule = parse_schedule(resolved["schedule"])
    dataset = sample_dataset(model, schedule, resolved["seed"])
    logger.info(f"Simulated {len(dataset)} records, {dataset.total_shots} shots from {model.KIND}",
                "cli", console=False)

    csv_path = write_dataset_csv(config.get_output_file_path(output_dir, "dataset.csv"), dataset)
    sidecar = write_report(output_dir, "dataset.json", COMMAND_NAME, resolved,
                           {"dataset": dataset.to_dict(), "schedule": schedule.to_dict()})
    return [csv_path, sidecar]


def main(args: argparse.Namespace) -> int:
    """
    Main function for the 'simulate' subcommand.

    Args:
        args: Parsed arguments

    Returns:
        Exit code
    """
    return run_command(COMMAND_NAME, args, CONFIG_KEYS, simulate)
