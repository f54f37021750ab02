"""File formats of the command-line tool.

All files are UTF-8 with LF line endings and '.' decimal separators.
Features are CSV with nodes on rows and samples on columns; a header row
of sample IDs and a first column of node labels are auto-detected.
Square matrices (adjacency, distances, precision) use the same CSV
conventions.  Scores are JSON ``{labels, values, M}``; learnt graphs are
TSV edge lists ``(i, j, theta_ij)`` over pairs i < j; traces are CSV.
Parse errors carry the offending path and line number.
"""

import csv
import hashlib
import json

import numpy as np

from pathlib import Path

from .errors import InputError
from .model import CoreScores, FeatureMatrix

__all__ = [
    "read_table_csv",
    "read_features_csv",
    "read_square_csv",
    "read_scores_json",
    "write_matrix_csv",
    "write_scores_json",
    "write_edges_tsv",
    "write_trace_csv",
    "write_json",
    "sha256_file",
]


def _is_float(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_table_csv(path):
    """CSV table with auto-detected header row and label column.

    Returns ``(values, row_labels, col_labels)`` where the labels are
    None when absent.  Detection: a first row with any non-numeric cell
    (beyond a possible corner cell) is a header; a first column with any
    non-numeric cell is a label column.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    if not rows:
        raise InputError(f"{path}:1: empty file")
    widths = {len(row) for _, row in rows}
    if len(widths) != 1:
        lineno = next(n for n, row in rows if len(row) != len(rows[0][1]))
        raise InputError(f"{path}:{lineno}: ragged row width")

    first = rows[0][1]
    has_header = any(not _is_float(tok) for tok in first[1:])
    body = rows[1:] if has_header else rows
    if not body:
        raise InputError(f"{path}:1: no data rows")
    has_labels = any(not _is_float(row[0]) for _, row in body)

    col_labels = None
    if has_header:
        col_labels = [tok.strip() for tok in (first[1:] if has_labels else first)]
    row_labels = [] if has_labels else None
    data = []
    for lineno, row in body:
        cells = row[1:] if has_labels else row
        if has_labels:
            row_labels.append(row[0].strip())
        try:
            data.append([float(tok) for tok in cells])
        except ValueError:
            bad = next(tok for tok in cells if not _is_float(tok))
            raise InputError(
                f"{path}:{lineno}: non-numeric value {bad!r}"
            ) from None
    values = np.asarray(data, dtype=float)
    if not np.all(np.isfinite(values)):
        raise InputError(f"{path}: non-finite values in table")
    return values, row_labels, col_labels


def read_features_csv(path) -> FeatureMatrix:
    """Node-attribute matrix: N rows (nodes) by d columns (samples)."""
    values, row_labels, _ = read_table_csv(path)
    try:
        return FeatureMatrix(values, node_labels=row_labels)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def read_square_csv(path, name="matrix", symmetric=True):
    """Square numeric matrix (adjacency, distance, precision)."""
    values, row_labels, _ = read_table_csv(path)
    if values.shape[0] != values.shape[1]:
        raise InputError(
            f"{path}: {name} must be square, got shape {values.shape}"
        )
    if symmetric:
        scale = max(1.0, np.abs(values).max())
        if np.abs(values - values.T).max() > 1e-8 * scale:
            raise InputError(f"{path}: {name} must be symmetric")
    return values, row_labels


def read_scores_json(path) -> CoreScores:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    try:
        values = np.asarray(payload["values"], dtype=float)
        budget = float(payload["M"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed scores file ({exc})") from None
    try:
        return CoreScores(values, budget=budget)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def _fmt(x: float) -> str:
    return repr(float(x))


def write_matrix_csv(path, values, labels=None) -> None:
    values = np.asarray(values, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, row in enumerate(values):
            cells = [_fmt(v) for v in row]
            if labels is not None:
                cells.insert(0, str(labels[i]))
            fh.write(",".join(cells) + "\n")


def write_scores_json(path, scores: CoreScores, labels=None) -> None:
    n = len(scores)
    payload = {
        "labels": list(labels) if labels is not None else [str(i) for i in range(n)],
        "values": [float(v) for v in scores.values],
        "M": float(scores.budget),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_edges_tsv(path, theta, threshold: float = 0.0) -> None:
    tv = np.asarray(theta.values if hasattr(theta, "values") else theta, float)
    n = tv.shape[0]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("i\tj\ttheta\n")
        for i in range(n - 1):
            for j in range(i + 1, n):
                if abs(tv[i, j]) > threshold:
                    fh.write(f"{i}\t{j}\t{_fmt(tv[i, j])}\n")


def write_trace_csv(path, trace) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("outer_iter,half_step,objective\n")
        for idx, value in enumerate(trace):
            outer = idx // 2 + 1
            half = "graph" if idx % 2 == 0 else "scores"
            fh.write(f"{outer},{half},{_fmt(value)}\n")


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
