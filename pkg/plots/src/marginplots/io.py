"""Readers for the training CLI's artifact files.

Each reader validates the header against the documented schema and returns
plain numpy arrays; empty fields (undefined penalties) come back as NaN so
downstream line plots naturally show gaps.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import MissingFileError, SchemaMismatchError

MARGINS_HEADER = ["margin"]
PENALTY_HEADER = ["p", "theta", "theta2_penalty", "capital_N", "capital_N_full"]
HISTOGRAM_HEADER = ["bin_left", "bin_right", "count"]
ERRORS_HEADER = ["round", "train_error", "test_error"]
STAGED_HEADER = ["stage", "margin"]


def _read_table(path, expected_header: list[str]) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError(f"{path}: empty file") from None
        if header != expected_header:
            raise SchemaMismatchError(
                f"{path}: header {header} does not match expected {expected_header}"
            )
        columns: list[list[float]] = [[] for _ in expected_header]
        for i, row in enumerate(reader, start=1):
            if len(row) != len(expected_header):
                raise SchemaMismatchError(f"{path}: row {i} has {len(row)} fields")
            for col, cell in zip(columns, row):
                if cell == "":
                    col.append(math.nan)
                else:
                    try:
                        col.append(float(cell))
                    except ValueError:
                        raise SchemaMismatchError(
                            f"{path}: non-numeric value {cell!r} at row {i}"
                        ) from None
    return {name: np.array(col) for name, col in zip(expected_header, columns)}


def read_margins(path) -> np.ndarray:
    return _read_table(path, MARGINS_HEADER)["margin"]


def read_penalty(path) -> dict[str, np.ndarray]:
    return _read_table(path, PENALTY_HEADER)


def read_histogram(path) -> dict[str, np.ndarray]:
    return _read_table(path, HISTOGRAM_HEADER)


def read_errors(path) -> dict[str, np.ndarray]:
    return _read_table(path, ERRORS_HEADER)


def read_staged(path) -> dict[str, np.ndarray]:
    return _read_table(path, STAGED_HEADER)


def label_for(path) -> str:
    """Default legend label: the run-manifest algo if one is reachable,
    else the artifact's parent directory name."""
    path = Path(path)
    report = path.parent / "report.json"
    if report.is_file():
        try:
            algo = json.loads(report.read_text()).get("algo")
            if isinstance(algo, str):
                return algo
        except (json.JSONDecodeError, OSError):
            pass
    return path.parent.name or path.stem
