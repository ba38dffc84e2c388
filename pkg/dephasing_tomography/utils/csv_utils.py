"""
CSV utilities for Dephasing Tomography.

This module provides functions for writing and reading the CSV tables the
CLI produces: measurement records, protocol traces and sweep tables. Floats
are written with repr so that a read-back is bit-exact.
"""
import csv
import numbers
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from dephasing_tomography.measurement.dataset import DataSet, validate_record
from dephasing_tomography.utils.directory_utils import ensure_file_directory
from dephasing_tomography.utils.exceptions import DataFormatError, ResourceNotFoundError

# Header of a measurement-record file
DATASET_HEADER = ["t", "shots", "count0"]


def format_cell(value: Any) -> str:
    """
    Format one CSV cell.

    Args:
        value: Cell value

    Returns:
        Text with shortest round-trip float formatting; empty for None
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return repr(float(value))
    return str(value)


def write_table_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """
    Write a header row followed by data rows.

    Args:
        path: Destination file
        header: Column names
        rows: Row values in header order

    Returns:
        The path written
    """
    ensure_file_directory(path)
    with open(path, "w", newline="", encoding="utf-8") as csvfile:
        writer = csv.writer(csvfile, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
    return path


def read_table_csv(path: str, required: Optional[Sequence[str]] = None) -> Tuple[List[str], List[Dict[str, str]]]:
    """
    Read a CSV table with a header row.

    Args:
        path: Source file
        required: Columns that must be present

    Returns:
        Tuple of (header, rows as dictionaries)

    Raises:
        ResourceNotFoundError: If the file does not exist
        DataFormatError: If the header is missing or a row is ragged
    """
    if not os.path.exists(path):
        raise ResourceNotFoundError("CSV file", path)

    try:
        with open(path, "r", newline="", encoding="utf-8") as csvfile:
            reader = csv.reader(csvfile)
            header = next(reader, None)
            if not header:
                raise DataFormatError("Missing header row", path=path, line=1)
            rows = []
            for row in reader:
                if not row:
                    continue
                if len(row) != len(header):
                    raise DataFormatError(f"Expected {len(header)} columns, got {len(row)}",
                                          path=path, line=reader.line_num)
                rows.append(dict(zip(header, row)))
    except (csv.Error, UnicodeDecodeError) as e:
        raise DataFormatError(f"Unreadable CSV: {e}", path=path) from e

    missing = [name for name in (required or []) if name not in header]
    if missing:
        raise DataFormatError(f"Missing columns {missing}", path=path, line=1)
    return header, rows


def write_dataset_csv(path: str, dataset: DataSet) -> str:
    """
    Write measurement records as t,shots,count0.

    Args:
        path: Destination file
        dataset: Records to write

    Returns:
        The path written
    """
    return write_table_csv(path, DATASET_HEADER, ([r.t, r.shots, r.count0] for r in dataset.records))


def read_dataset_csv(path: str, seed: Optional[int] = None, model_truth: Optional[Any] = None) -> DataSet:
    """
    Read measurement records written by write_dataset_csv.

    Args:
        path: Source file
        seed: Optional provenance seed (from the JSON sidecar)
        model_truth: Optional truth model (from the JSON sidecar)

    Returns:
        DataSet

    Raises:
        ResourceNotFoundError: If the file does not exist
        DataFormatError: If a row cannot be parsed or violates 0 <= count0 <= shots
    """
    _, rows = read_table_csv(path, required=DATASET_HEADER)
    records = []
    for index, row in enumerate(rows):
        line = index + 2
        try:
            t = float(row["t"])
            shots = int(row["shots"])
            count0 = int(row["count0"])
        except ValueError as e:
            raise DataFormatError(f"Unparseable record: {e}", path=path, line=line) from e
        errors = validate_record(index, t, shots, count0)
        if errors:
            raise DataFormatError(f"Invalid record: {errors[0]}", path=path, line=line)
        records.append((t, shots, count0))

    if not records:
        raise DataFormatError("No records", path=path)
    return DataSet(tuple(records), seed=seed, model_truth=model_truth)
