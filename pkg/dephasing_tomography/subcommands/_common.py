"""
Shared plumbing of the CLI subcommands.

Every subcommand reads one JSON config document, applies the --seed flag,
validates the keys against its schema, runs inside a logged run context and
writes its results with the resolved config and its hash embedded.
"""
import argparse
import os
import time
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional

import config
from dephasing_tomography.core.model_factory import model_class, model_from_dict
from dephasing_tomography.noise_models.base import AbstractNoiseModel
from dephasing_tomography.noise_models.displaced_lorentzian import DisplacedLorentzian
from dephasing_tomography.utils.directory_utils import resolve_output_directory
from dephasing_tomography.utils.exceptions import (
    ConfigurationError,
    DataFormatError,
    NumericalError,
    ResourceNotFoundError,
    TomographyError,
    ValidationError,
)
from dephasing_tomography.utils.json_utils import config_hash, read_json, write_json
from dephasing_tomography.utils.logger import logger
from dephasing_tomography.utils.validation import (
    check_required_keys,
    check_unknown_keys,
    raise_if_invalid,
    validate_integer_param,
    validate_seed,
)

# Keys accepted by every command config
COMMON_KEYS = ("seed",)

# Alternative parametrization of the displaced-Lorentzian model
TIMESCALE_KEYS = ("T2", "tau_c", "delta_c")


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """
    Add the flags shared by every subcommand.

    Args:
        parser: Subcommand parser
    """
    parser.add_argument("--config", type=str, required=True,
                        help="JSON config document of the command")
    parser.add_argument("--out", type=str, default=None,
                        help="Output directory (default: output/<command>/<seed>)")
    parser.add_argument("--seed", type=int, default=None,
                        help="64-bit seed overriding the config")
    parser.add_argument("--threads", type=int, default=1,
                        help="Worker threads for independent runs and sweep rows")


def load_config(path: str) -> Dict[str, Any]:
    """
    Read a command config document.

    Args:
        path: Path of the JSON document

    Returns:
        Config dictionary

    Raises:
        ResourceNotFoundError: If the file does not exist
        DataFormatError: If the file is not valid JSON
        ConfigurationError: If the document is not a JSON object
    """
    document = read_json(path, "config")
    if not isinstance(document, dict):
        raise ConfigurationError("Config document must be a JSON object")
    return document


def resolve_config(document: Mapping[str, Any], allowed: Iterable[str], seed: Optional[int] = None,
                   defaults: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """
    Validate the top-level keys and apply defaults and the --seed override.

    Args:
        document: Parsed config
        allowed: Command-specific keys
        seed: Value of --seed, if given
        defaults: Values used for absent keys

    Returns:
        Resolved config; always carries a seed

    Raises:
        ValidationError: On unknown keys or an invalid seed
    """
    resolved = dict(defaults or {})
    resolved.update(document)
    if seed is not None:
        resolved["seed"] = seed
    resolved.setdefault("seed", 0)

    errors = check_unknown_keys(resolved, list(allowed) + list(COMMON_KEYS))
    is_valid, error = validate_seed(resolved["seed"], allow_none=False)
    if not is_valid:
        errors.append({"seed": error})
    raise_if_invalid((not errors, errors or None), "Invalid config")
    resolved["seed"] = int(resolved["seed"])
    return resolved


def require_keys(block: Mapping[str, Any], keys: Iterable[str], path: str = "") -> None:
    """Raise a ValidationError naming every missing key."""
    errors = check_required_keys(block, keys, path)
    raise_if_invalid((not errors, errors or None), "Invalid config")


def parse_model(block: Any, path: str = "model") -> AbstractNoiseModel:
    """
    Build a noise model from a config block.

    Besides the native parameters, a displaced-Lorentzian model may be given
    by its timescales T2, tau_c and delta_c.

    Args:
        block: {"kind": ..., parameters}
        path: Location of the block, used in messages

    Returns:
        Noise model
    """
    if not isinstance(block, Mapping):
        raise ValidationError("Model block must be an object", [{path: "expected {\"kind\": ..., params}"}])
    if "kind" in block and model_class(block["kind"]) is DisplacedLorentzian \
            and set(block) - {"kind"} == set(TIMESCALE_KEYS):
        return DisplacedLorentzian.from_timescales(*(block[key] for key in TIMESCALE_KEYS))
    try:
        return model_from_dict(block)
    except ValidationError as e:
        raise ValidationError(f"Invalid {path}: {e.args[0]}",
                              [{f"{path}.{k}": v for k, v in error.items()} for error in e.errors]) from e


def validate_threads(threads: Any) -> int:
    is_valid, error = validate_integer_param(threads, min_val=1)
    if not is_valid:
        raise ValidationError("Invalid thread count", [{"threads": error}])
    return int(threads)


def provenance(command: str, resolved: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Provenance block embedded in every output.

    Args:
        command: CLI command name
        resolved: Resolved config

    Returns:
        Dictionary with the command, seed, resolved config and its hash
    """
    from dephasing_tomography import __version__
    return {
        "command": command,
        "version": __version__,
        "seed": resolved["seed"],
        "config": dict(resolved),
        "config_hash": config_hash(dict(resolved))
    }


def write_report(output_dir: str, name: str, command: str, resolved: Mapping[str, Any],
                 payload: Mapping[str, Any]) -> str:
    """
    Write a JSON result with the provenance block.

    Args:
        output_dir: Output directory of the run
        name: File name
        command: CLI command name
        resolved: Resolved config
        payload: Result fields

    Returns:
        Path written
    """
    document = {"provenance": provenance(command, resolved)}
    document.update(payload)
    return write_json(config.get_output_file_path(output_dir, name), document)


def exit_code_for(error: BaseException) -> int:
    """
    Map an exception to the CLI exit-code contract.

    Args:
        error: Exception raised by a command

    Returns:
        2 for validation and configuration errors, 3 for I/O errors,
        4 for numerical failures and 1 otherwise
    """
    codes = config.EXIT_CODES
    if isinstance(error, (ValidationError, ConfigurationError)):
        return codes["validation"]
    if isinstance(error, (DataFormatError, ResourceNotFoundError, OSError)):
        return codes["io"]
    if isinstance(error, NumericalError):
        return codes["numerical"]
    return codes["error"]


def run_command(command: str, args: argparse.Namespace, allowed: Iterable[str],
                body: Callable[[Dict[str, Any], str, int], List[str]],
                defaults: Optional[Mapping[str, Any]] = None) -> int:
    """
    Run a subcommand body inside a logged run context.

    The body receives the resolved config, the output directory and the
    thread count and returns the paths it wrote.

    Args:
        command: CLI command name
        args: Parsed arguments (config, out, seed, threads)
        allowed: Config keys accepted by the command
        body: Command implementation
        defaults: Default config values

    Returns:
        Exit code
    """
    start_time = time.time()
    seed = args.seed if getattr(args, "seed", None) is not None else 0
    try:
        document = load_config(args.config)
        resolved = resolve_config(document, allowed, getattr(args, "seed", None), defaults)
        seed = resolved["seed"]
        threads = validate_threads(getattr(args, "threads", 1))
    except (TomographyError, OSError) as e:
        logger.error(f"{command}: {e}", "cli")
        print(f"Error: {e}")
        return exit_code_for(e)

    logger.start_run(command, seed, resolved)
    try:
        output_dir = resolve_output_directory(command, seed, getattr(args, "out", None))
        paths = body(resolved, output_dir, threads)
    except (TomographyError, OSError) as e:
        logger.end_run(False, error=str(e))
        print(f"Error: {e}")
        return exit_code_for(e)
    except Exception as e:
        logger.error(f"Unexpected error in {command}: {e}", "cli", exc_info=True)
        logger.end_run(False, error=str(e))
        print(f"Error: {e}")
        return config.EXIT_CODES["error"]

    duration_ms = (time.time() - start_time) * 1000
    logger.log_step(command, duration_ms, f"{len(paths)} file(s)")
    for path in paths:
        print(f"Wrote {path}")
    logger.end_run(True, output_dir)
    return config.EXIT_CODES["success"]


def relative_to_config(args: argparse.Namespace, path: str) -> str:
    """Resolve a path from a config document against the config file's directory."""
    if os.path.isabs(path):
        return path
    return os.path.join(os.path.dirname(os.path.abspath(args.config)), path)
