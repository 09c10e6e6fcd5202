"""CSV matrices and epoch trace files.

Matrix files are plain CSV: one row per line, comma-separated decimal
fields, no header. A trace file concatenates epoch blocks, each being one
line `epoch <k>`, then the m weight rows as CSV, then one bias row prefixed
`bias,`.
"""

from __future__ import annotations

import sys
from typing import Iterable, TextIO

import numpy as np

from .errors import ParseError


def _read_lines(path: str) -> list[str]:
    try:
        if path == "-":
            return sys.stdin.read().splitlines()
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _parse_row(line: str, path: str, lineno: int) -> list[float]:
    fields = line.split(",")
    try:
        return [float(f) for f in fields]
    except ValueError as exc:
        raise ParseError(f"{path}:{lineno}: bad numeric field: {exc}") from exc


def parse_matrix(lines: Iterable[str], path: str = "<memory>") -> np.ndarray:
    rows = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        row = _parse_row(line, path, lineno)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
        rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    a = np.array(rows, dtype=float)
    if not np.isfinite(a).all():
        raise ParseError(f"{path}: non-finite entries")
    return a


def read_matrix(path: str) -> np.ndarray:
    """Matrix CSV from a path ('-' reads standard input)."""
    return parse_matrix(_read_lines(path), path)


def read_vector(path: str, length: int | None = None) -> np.ndarray:
    """A vector stored as a single CSV row, a single column, or one value per line."""
    a = read_matrix(path)
    if a.shape[0] == 1:
        v = a[0]
    elif a.shape[1] == 1:
        v = a[:, 0]
    else:
        raise ParseError(f"{path}: expected a single row or column")
    if length is not None and v.shape[0] != length:
        raise ParseError(f"{path}: expected {length} values, got {v.shape[0]}")
    return v


def format_matrix(a: np.ndarray) -> str:
    return "\n".join(",".join(repr(float(v)) for v in row) for row in np.atleast_2d(a)) + "\n"


def write_matrix(a: np.ndarray, out: TextIO) -> None:
    out.write(format_matrix(a))


def read_trace(path: str) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """Epoch blocks (epoch number, weight matrix, bias vector), shape-checked."""
    lines = [ln for ln in _read_lines(path) if ln.strip()]
    epochs: list[tuple[int, np.ndarray, np.ndarray]] = []
    i = 0
    shape = None
    while i < len(lines):
        head = lines[i].split()
        if len(head) != 2 or head[0] != "epoch":
            raise ParseError(f"{path}: expected 'epoch <k>' at line {i + 1}")
        try:
            epoch = int(head[1])
        except ValueError as exc:
            raise ParseError(f"{path}: bad epoch number at line {i + 1}") from exc
        i += 1
        rows = []
        while i < len(lines) and not lines[i].startswith("bias,") and not lines[i].startswith("epoch "):
            rows.append(_parse_row(lines[i], path, i + 1))
            i += 1
        if i >= len(lines) or not lines[i].startswith("bias,"):
            raise ParseError(f"{path}: epoch {epoch} has no bias row")
        bias = _parse_row(lines[i][len("bias,"):], path, i + 1)
        i += 1
        if not rows:
            raise ParseError(f"{path}: epoch {epoch} has no weight rows")
        weights = np.array(rows, dtype=float)
        if any(len(r) != weights.shape[1] for r in rows):
            raise ParseError(f"{path}: epoch {epoch} weight rows are ragged")
        if len(bias) != weights.shape[0]:
            raise ParseError(f"{path}: epoch {epoch} bias length {len(bias)} != m={weights.shape[0]}")
        if shape is None:
            shape = weights.shape
        elif weights.shape != shape:
            raise ParseError(f"{path}: epoch {epoch} shape {weights.shape} != {shape}")
        if not (np.isfinite(weights).all() and np.isfinite(bias).all()):
            raise ParseError(f"{path}: epoch {epoch} has non-finite entries")
        epochs.append((epoch, weights, np.array(bias, dtype=float)))
    if not epochs:
        raise ParseError(f"{path}: empty trace")
    return epochs


def format_trace(epochs: Iterable[tuple[int, np.ndarray, np.ndarray]]) -> str:
    parts = []
    for epoch, weights, bias in epochs:
        parts.append(f"epoch {int(epoch)}\n")
        parts.append(format_matrix(weights))
        parts.append("bias," + ",".join(repr(float(v)) for v in bias) + "\n")
    return "".join(parts)
