"""
JSON utilities for Dephasing Tomography.

Reports and sidecars are written as canonical JSON (sorted keys, fixed
indentation, shortest round-trip float repr) so that a rerun from the embedded
config reproduces every file byte for byte.
"""
import hashlib
import json
import math
import os
from typing import Any, Dict

import numpy as np

from dephasing_tomography.utils.directory_utils import ensure_file_directory
from dephasing_tomography.utils.exceptions import DataFormatError, ResourceNotFoundError


def to_jsonable(value: Any) -> Any:
    """
    Convert numpy containers and non-finite floats into JSON-safe values.

    Non-finite floats become the strings "inf", "-inf" and "nan".

    Args:
        value: Value to convert

    Returns:
        JSON-serializable value
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def canonical_dumps(payload: Any) -> str:
    """
    Serialize a payload to canonical JSON text.

    Args:
        payload: JSON-compatible payload (numpy values allowed)

    Returns:
        JSON text terminated by a newline
    """
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def config_hash(config_block: Dict[str, Any]) -> str:
    """
    Hash a resolved configuration.

    Args:
        config_block: Resolved configuration

    Returns:
        Hex SHA-256 digest of the canonical JSON encoding
    """
    encoded = json.dumps(to_jsonable(config_block), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(encoded.encode("utf-8")).hexdigest()


def write_json(path: str, payload: Any) -> str:
    """
    Write a payload as canonical JSON.

    Args:
        path: Destination file
        payload: JSON-compatible payload

    Returns:
        The path written
    """
    ensure_file_directory(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(canonical_dumps(payload))
    return path


def read_json(path: str, resource_type: str = "file") -> Any:
    """
    Read a JSON document.

    Args:
        path: Source file
        resource_type: Resource name used in error messages

    Returns:
        Parsed document

    Raises:
        ResourceNotFoundError: If the file does not exist
        DataFormatError: If the file is not valid JSON
    """
    if not os.path.exists(path):
        raise ResourceNotFoundError(resource_type, path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"Invalid JSON: {e.msg}", path=path, line=e.lineno) from e
