"""
Parameter validation utilities.

This module provides utilities for validating parameters and command
configurations. Scalar validators return ``(is_valid, error_message)`` tuples;
block validators return a ValidationResult ``(is_valid, errors)`` where errors
is a list of ``{field: message}`` dictionaries.
"""
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple
import math
import numbers

from dephasing_tomography.core.interfaces import ValidationResult, ValidationError
from dephasing_tomography.utils.exceptions import ValidationError as ValidationException

# Largest accepted seed (64-bit unsigned)
MAX_SEED = (1 << 64) - 1


def validate_numeric_param(
    value: Any,
    min_val: Optional[float] = None,
    max_val: Optional[float] = None,
    allow_none: bool = False,
    exclusive_min: bool = False
) -> Tuple[bool, Optional[str]]:
    """
    Validate a numeric parameter.

    Args:
        value: The value to validate
        min_val: Optional minimum value
        max_val: Optional maximum value (inclusive)
        allow_none: Whether None is an acceptable value
        exclusive_min: Whether min_val itself is rejected

    Returns:
        Tuple of (is_valid, error_message)
    """
    if value is None:
        if allow_none:
            return True, None
        return False, "Value cannot be None"

    if isinstance(value, bool):
        return False, "Value must be a number, got bool"

    try:
        float_value = float(value)
    except (ValueError, TypeError):
        return False, f"Value must be a number, got {type(value).__name__}"

    if not math.isfinite(float_value):
        return False, f"Value must be finite, got {float_value}"

    if min_val is not None:
        if exclusive_min and float_value <= min_val:
            return False, f"Value must be greater than {min_val}, got {float_value}"
        if not exclusive_min and float_value < min_val:
            return False, f"Value must be at least {min_val}, got {float_value}"

    if max_val is not None and float_value > max_val:
        return False, f"Value must be at most {max_val}, got {float_value}"

    return True, None


def validate_integer_param(
    value: Any,
    min_val: Optional[int] = None,
    max_val: Optional[int] = None,
    allow_none: bool = False
) -> Tuple[bool, Optional[str]]:
    """
    Validate an integer parameter.

    Args:
        value: The value to validate
        min_val: Optional minimum value (inclusive)
        max_val: Optional maximum value (inclusive)
        allow_none: Whether None is an acceptable value

    Returns:
        Tuple of (is_valid, error_message)
    """
    if value is None:
        if allow_none:
            return True, None
        return False, "Value cannot be None"

    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            return False, f"Value must be an integer, got {type(value).__name__}"

    if min_val is not None and value < min_val:
        return False, f"Value must be at least {min_val}, got {value}"

    if max_val is not None and value > max_val:
        return False, f"Value must be at most {max_val}, got {value}"

    return True, None


def validate_string_param(
    value: Any,
    allowed_values: Optional[List[str]] = None,
    allow_none: bool = False,
    case_sensitive: bool = True
) -> Tuple[bool, Optional[str]]:
    """
    Validate a string parameter.

    Args:
        value: The value to validate
        allowed_values: Optional list of allowed values
        allow_none: Whether None is an acceptable value
        case_sensitive: Whether to perform case-sensitive validation for allowed_values

    Returns:
        Tuple of (is_valid, error_message)
    """
    if value is None:
        if allow_none:
            return True, None
        return False, "Value cannot be None"

    if not isinstance(value, str):
        return False, f"Value must be a string, got {type(value).__name__}"

    if allowed_values:
        if case_sensitive:
            if value not in allowed_values:
                return False, f"Value must be one of {allowed_values}, got '{value}'"
        elif value.lower() not in [v.lower() for v in allowed_values]:
            return False, f"Value must be one of {allowed_values} (case insensitive), got '{value}'"

    return True, None


def validate_seed(
    value: Any,
    allow_none: bool = True
) -> Tuple[bool, Optional[str]]:
    """
    Validate a 64-bit unsigned seed.

    Args:
        value: The value to validate
        allow_none: Whether None is an acceptable value

    Returns:
        Tuple of (is_valid, error_message)
    """
    if value is None:
        if allow_none:
            return True, None
        return False, "Seed cannot be None"

    if isinstance(value, str):
        try:
            value = int(value)
        except ValueError:
            return False, f"Seed must be a valid integer, got '{value}'"

    if isinstance(value, float):
        if not value.is_integer():
            return False, f"Seed must be an integer, got {value}"
        value = int(value)

    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        return False, f"Seed must be an integer, got {type(value).__name__}"

    if value < 0 or value > MAX_SEED:
        return False, f"Seed must lie in [0, 2^64 - 1], got {value}"

    return True, None


def validate_time_list(
    values: Any,
    strictly_increasing: bool = True,
    allow_zero: bool = False
) -> Tuple[bool, Optional[str]]:
    """
    Validate a list of measurement times.

    Args:
        values: Sequence of times
        strictly_increasing: Whether the times must increase strictly
        allow_zero: Whether t = 0 is acceptable

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(values, (list, tuple)) or len(values) == 0:
        return False, "Times must be a nonempty list"

    previous = None
    for index, value in enumerate(values):
        is_valid, error = validate_numeric_param(value, min_val=0.0, exclusive_min=not allow_zero)
        if not is_valid:
            return False, f"Time #{index}: {error}"
        if strictly_increasing and previous is not None and float(value) <= previous:
            return False, f"Times must be strictly increasing, got {value} after {previous}"
        previous = float(value)

    return True, None


def check_unknown_keys(block: Dict[str, Any], allowed: Iterable[str], path: str = "") -> List[ValidationError]:
    """
    Report keys of a config block that no schema field claims.

    Args:
        block: Configuration block
        allowed: Accepted keys
        path: Dotted location of the block, used in messages

    Returns:
        List of validation errors (empty when every key is known)
    """
    allowed = set(allowed)
    prefix = f"{path}." if path else ""
    return [{f"{prefix}{key}": "Unknown key"} for key in sorted(block) if key not in allowed]


def check_required_keys(block: Dict[str, Any], required: Iterable[str], path: str = "") -> List[ValidationError]:
    """
    Report required keys missing from a config block.

    Args:
        block: Configuration block
        required: Required keys
        path: Dotted location of the block, used in messages

    Returns:
        List of validation errors
    """
    prefix = f"{path}." if path else ""
    return [{f"{prefix}{key}": "Missing required key"} for key in required if key not in block]


def validate_bounds(low: Sequence[float], high: Sequence[float], dimension: int) -> ValidationResult:
    """
    Validate a per-parameter box.

    Args:
        low: Lower bounds
        high: Upper bounds
        dimension: Expected number of parameters

    Returns:
        Tuple of (is_valid, list_of_errors)
    """
    errors = []

    if len(low) != dimension or len(high) != dimension:
        errors.append({"bounds": f"Expected {dimension} bounds, got {len(low)} low and {len(high)} high"})
        return False, errors

    for index, (lo, hi) in enumerate(zip(low, high)):
        for name, value in (("low", lo), ("high", hi)):
            is_valid, error = validate_numeric_param(value)
            if not is_valid:
                errors.append({f"bounds.{name}[{index}]": error})
        if not errors and float(lo) >= float(hi):
            errors.append({f"bounds[{index}]": f"low must be below high, got ({lo}, {hi})"})

    return len(errors) == 0, errors if errors else None


def raise_if_invalid(result: ValidationResult, message: str) -> None:
    """
    Raise a ValidationError when a ValidationResult reports failures.

    Args:
        result: Result of a block validator
        message: Summary message of the exception

    Raises:
        ValidationError: If the result is invalid
    """
    is_valid, errors = result
    if not is_valid:
        raise ValidationException(message, errors)
