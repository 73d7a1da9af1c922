"""File formats: matrix CSV, flat key=value run configs, density TSV.

Matrices are CSV with one row per variable and an optional header line
(auto-detected: a first line whose cells do not all parse as numbers).
Values are written with 17 significant digits so doubles round-trip exactly.
"""
from __future__ import annotations

import numpy as np

from .errors import DataError

__all__ = [
    "read_matrix_csv",
    "write_matrix_csv",
    "parse_run_config",
    "read_run_config",
]


def read_matrix_csv(path) -> np.ndarray:
    """Load a rectangular CSV matrix, reporting the offending cell on failure."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = [line.rstrip("\n") for line in fh]
    rows = [line for line in raw if line.strip() != ""]
    if not rows:
        raise DataError(f"{path}: empty matrix file")

    def parse_line(line: str, lineno: int) -> list[float]:
        out = []
        for col, cell in enumerate(line.split(","), start=1):
            try:
                val = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: line {lineno}, column {col}: {cell.strip()!r} is not a number"
                ) from None
            if not np.isfinite(val):
                raise DataError(f"{path}: line {lineno}, column {col}: non-finite value {cell.strip()!r}")
            out.append(val)
        return out

    start = 0
    try:
        first = parse_line(rows[0], 1)
    except DataError:
        start = 1  # header line
        if len(rows) == 1:
            raise DataError(f"{path}: only a header line, no data") from None
        first = parse_line(rows[1], 2)
    width = len(first)
    data = [first]
    for i, line in enumerate(rows[start + 1 :], start=start + 2):
        vals = parse_line(line, i)
        if len(vals) != width:
            raise DataError(
                f"{path}: line {i} has {len(vals)} cells, expected {width} (ragged matrix)"
            )
        data.append(vals)
    return np.asarray(data, dtype=float)


def write_matrix_csv(path, R) -> None:
    R = np.asarray(R, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        for row in R:
            fh.write(",".join(f"{v:.17g}" for v in row))
            fh.write("\n")


def parse_run_config(text: str, known_keys, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{source}: line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known_keys:
            raise DataError(f"{source}: line {lineno}: unknown key {key!r}")
        if key in out:
            raise DataError(f"{source}: line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_run_config(path, known_keys) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_run_config(fh.read(), known_keys, source=str(path))
