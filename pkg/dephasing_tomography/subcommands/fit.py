"""
Fit subcommand: frequentist estimate from a measurement-record file.
"""
import argparse
from typing import Any, Dict, List

from dephasing_tomography.core.model_factory import model_class
from dephasing_tomography.core.param_vector import ParamVector
from dephasing_tomography.estimation.fitting import FitConfig, fit
from dephasing_tomography.subcommands._common import (
    add_common_arguments,
    relative_to_config,
    require_keys,
    run_command,
    write_report,
)
from dephasing_tomography.utils.csv_utils import read_dataset_csv
from dephasing_tomography.utils.exceptions import ValidationError
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.validation import check_unknown_keys

COMMAND_NAME = "fit"

CONFIG_KEYS = ("data", "family", "fit")

FIT_KEYS = ("bounds", "initial_guess", "prior_factor", "cost_kind", "restarts",
            "gtol", "xtol", "ftol", "max_iterations")


def register_subcommand(subparsers: Any) -> None:
    """
    Register the 'fit' subcommand with its arguments.

    Args:
        subparsers: Subparsers object from argparse
    """
    parser = subparsers.add_parser(
        COMMAND_NAME,
        help="Fit a noise model to a measurement record",
        description="Estimate noise parameters by weighted least squares or maximum likelihood",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    add_common_arguments(parser)


def parse_fit_config(family: str, block: Any) -> FitConfig:
    """
    Build a FitConfig from the 'fit' block.

    Bounds are given as {"low": [...], "high": [...]}; without them the box
    is [theta/f, f theta] around the initial guess with f = prior_factor.
    The initial guess is a list in parameter order or an object keyed by name.
    """
    block = dict(block or {})
    errors = check_unknown_keys(block, FIT_KEYS, "fit")
    if errors:
        raise ValidationError("Invalid fit block", errors)

    cls = model_class(family)
    guess = block.pop("initial_guess", None)
    if isinstance(guess, dict):
        missing = [name for name in cls.PARAM_NAMES if name not in guess]
        if missing or set(guess) - set(cls.PARAM_NAMES):
            raise ValidationError("Invalid initial guess",
                                  [{"fit.initial_guess": f"expected keys {list(cls.PARAM_NAMES)}"}])
        guess = [guess[name] for name in cls.PARAM_NAMES]
    vector = ParamVector.from_array(cls.KIND, guess) if guess is not None else None

    factor = block.pop("prior_factor", 3.0)
    bounds = block.pop("bounds", None)
    if bounds is None:
        if vector is None:
            raise ValidationError("Fit needs bounds or an initial guess",
                                  [{"fit.bounds": "Missing required key"}])
        return FitConfig.around(vector.to_model(), factor, initial_guess=vector, **block)
    if not isinstance(bounds, dict) or set(bounds) != {"low", "high"}:
        raise ValidationError("Invalid bounds", [{"fit.bounds": "expected {\"low\": [...], \"high\": [...]}"}])
    return FitConfig(bounds=(tuple(bounds["low"]), tuple(bounds["high"])), initial_guess=vector, **block)


def fit_command(args: argparse.Namespace):
    def body(resolved: Dict[str, Any], output_dir: str, threads: int) -> List[str]:
        require_keys(resolved, CONFIG_KEYS)
        data = read_dataset_csv(relative_to_config(args, resolved["data"]))
        fit_config = parse_fit_config(resolved["family"], resolved["fit"])
        report = fit(data, resolved["family"], fit_config, seed=resolved["seed"])
        logger.info(f"Fitted {report.theta_hat.kind}: {report.theta_hat.values}, "
                    f"det metric {report.det_metric:.6g}", "cli", console=False)
        payload = {
            "estimate": report.to_dict(),
            "data": {"records": len(data), "total_shots": data.total_shots}
        }
        return [write_report(output_dir, "estimate.json", COMMAND_NAME, resolved, payload)]
    return body


def main(args: argparse.Namespace) -> int:
    """
    Main function for the 'fit' subcommand.

    Args:
        args: Parsed arguments

    Returns:
        Exit code
    """
    return run_command(COMMAND_NAME, args, CONFIG_KEYS, fit_command(args))
