"""
Directory utilities for Dephasing Tomography.

This module provides functions for managing directories and files,
ensuring that the necessary directory structure exists before operations.
"""
import os
from typing import Optional

import config


def ensure_directory_exists(directory_path: str) -> None:
    """
    Ensure that a directory exists, creating it if necessary.

    Args:
        directory_path: Path to the directory to ensure
    """
    if not os.path.exists(directory_path):
        os.makedirs(directory_path, exist_ok=True)


def ensure_file_directory(file_path: str) -> None:
    """
    Ensure that the directory containing a file exists.

    Args:
        file_path: Path to the file
    """
    directory = os.path.dirname(file_path)
    if directory:
        ensure_directory_exists(directory)


def resolve_output_directory(command: str, seed: int, override: Optional[str] = None) -> str:
    """
    Resolve and create the output directory of a command run.

    Args:
        command: CLI command name
        seed: Seed used for the run
        override: Directory given with --out, if any

    Returns:
        Path to an existing output directory
    """
    output_dir = override if override else config.get_command_output_dir(command, seed)
    ensure_directory_exists(output_dir)
    return output_dir
