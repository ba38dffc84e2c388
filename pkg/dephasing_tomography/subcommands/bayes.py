"""
Bayes subcommand: adaptive Bayesian protocol against a simulated truth.
"""
import argparse
from typing import Any, Dict, List

import config
from dephasing_tomography.bayesian.protocol import ProtocolConfig, ProtocolTrace, run_protocol
from dephasing_tomography.estimation.fitting import box_around
from dephasing_tomography.subcommands._common import (
    add_common_arguments,
    parse_model,
    require_keys,
    run_command,
    write_report,
)
from dephasing_tomography.utils.csv_utils import write_table_csv
from dephasing_tomography.utils.exceptions import DegenerateUpdateError, ValidationError
from dephasing_tomography.utils.logger import logger

COMMAND_NAME = "bayes"

CONFIG_KEYS = ("truth", "protocol")


def register_subcommand(subparsers: Any) -> None:
    """
    Register the 'bayes' subcommand with its arguments.

    Args:
        subparsers: Subparsers object from argparse
    """
    parser = subparsers.add_parser(
        COMMAND_NAME,
        help="Run the adaptive Bayesian protocol",
        description="Sequential Monte-Carlo estimation with information-optimal measurement times",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    add_common_arguments(parser)


def build_protocol_config(truth, block: Any, seed: int) -> ProtocolConfig:
    """
    ProtocolConfig from the 'protocol' block.

    The prior box defaults to [theta/f, f theta] around the truth with
    f = prior_factor; kind and seed come from the truth and the run.
    """
    if block is not None and not isinstance(block, dict):
        raise ValidationError("Invalid protocol block", [{"protocol": "expected an object"}])
    block = dict(block or {})
    for key in ("kind", "seed"):
        if key in block:
            raise ValidationError("Invalid protocol block", [{f"protocol.{key}": "set by the run"}])
    factor = block.pop("prior_factor", config.PROTOCOL_DEFAULTS["prior_factor"])
    if "low" not in block and "high" not in block:
        low, high = box_around(truth, factor)
        block.update(low=low, high=high)
    return ProtocolConfig.from_dict({"kind": truth.KIND, "seed": seed, **block})


def _write_trace(output_dir: str, name: str, trace: ProtocolTrace) -> str:
    return write_table_csv(config.get_output_file_path(output_dir, name), trace.header(), trace.rows())


def bayes(resolved: Dict[str, Any], output_dir: str, threads: int) -> List[str]:
    """Run the protocol and write trace.csv with its JSON report."""
    require_keys(resolved, ("truth",))
    truth = parse_model(resolved["truth"], "truth")
    protocol_config = build_protocol_config(truth, resolved.get("protocol"), resolved["seed"])
    try:
        trace = run_protocol(truth, protocol_config)
    except DegenerateUpdateError as e:
        if e.trace is not None and len(e.trace):
            path = _write_trace(output_dir, "trace_partial.csv", e.trace)
            logger.warning(f"Partial trace written to {path}", "cli")
        raise

    logger.info(f"Protocol finished after {len(trace)} steps, {trace.total_shots} shots", "cli", console=False)
    payload = {
        "protocol": protocol_config.to_dict(),
        "truth": truth.to_dict(),
        "trace": trace.to_dict(),
        "final_mean": trace.final_mean,
        "final_cov": trace.final_cov
    }
    return [_write_trace(output_dir, "trace.csv", trace),
            write_report(output_dir, "trace.json", COMMAND_NAME, resolved, payload)]


def main(args: argparse.Namespace) -> int:
    """
    Main function for the 'bayes' subcommand.

    Args:
        args: Parsed arguments

    Returns:
        Exit code
    """
    return run_command(COMMAND_NAME, args, CONFIG_KEYS, bayes)
