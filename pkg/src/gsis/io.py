"""Text formats for matrices, graphs and signals, plus JSON emission.

Matrix files are either coordinate form::

    matrix N N nnz
    i j value          (1-based; a symmetric entry may be stored once)

or dense form (N rows of N whitespace-separated numbers). Graph files start
with ``graph N`` followed by ``u v [w]`` lines with 0-based vertices. Signal
files hold one number per line. Lines starting with ``#`` or ``%`` are
comments.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .shifts import Graph


class ParseError(ValueError):
    exit_code = 2
    code = "ParseError"


def _lines(path):
    text = Path(path).read_text()
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        out.append((lineno, line))
    return out


def _float(tok, path, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: cannot parse number '{tok}'") from None


def _int(tok, path, lineno):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: cannot parse integer '{tok}'") from None


def parse_coordinate(lines, path="<matrix>") -> np.ndarray:
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 4 or parts[0].lower() != "matrix":
        raise ParseError(f"{path}:{lineno}: expected header 'matrix N N nnz'")
    rows, cols, nnz = (_int(p, path, lineno) for p in parts[1:])
    if rows != cols or rows < 1:
        raise ParseError(f"{path}:{lineno}: matrix must be square, got {rows} x {cols}")
    body = lines[1:]
    if len(body) != nnz:
        raise ParseError(f"{path}: header announces {nnz} entries, found {len(body)}")
    a = np.zeros((rows, cols))
    seen = np.zeros((rows, cols), dtype=bool)
    for lineno, line in body:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"{path}:{lineno}: expected 'i j value'")
        i, j = _int(parts[0], path, lineno), _int(parts[1], path, lineno)
        v = _float(parts[2], path, lineno)
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise ParseError(f"{path}:{lineno}: index ({i}, {j}) out of range")
        if seen[i - 1, j - 1]:
            raise ParseError(f"{path}:{lineno}: entry ({i}, {j}) given twice")
        a[i - 1, j - 1] = v
        seen[i - 1, j - 1] = True
    # entries stored once stand for both triangles
    mirror = seen & ~seen.T
    a[mirror.T] = a.T[mirror.T]
    return a


def parse_dense(lines, path="<matrix>", square: bool = True) -> np.ndarray:
    rows = [[_float(t, path, lineno) for t in line.split()] for lineno, line in lines]
    if not rows:
        raise ParseError(f"{path}: empty matrix")
    width = len(rows[0])
    for (lineno, _), r in zip(lines, rows):
        if len(r) != width:
            raise ParseError(f"{path}:{lineno}: ragged row ({len(r)} vs {width} entries)")
    a = np.array(rows, dtype=float)
    if square and a.shape[0] != a.shape[1]:
        raise ParseError(f"{path}: expected a square matrix, got {a.shape[0]} x {a.shape[1]}")
    return a


def read_matrix(path, square: bool = True) -> np.ndarray:
    lines = _lines(path)
    if not lines:
        raise ParseError(f"{path}: empty file")
    if lines[0][1].split()[0].lower() == "matrix":
        return parse_coordinate(lines, path)
    return parse_dense(lines, path, square)


def read_graph(path) -> Graph:
    lines = _lines(path)
    if not lines:
        raise ParseError(f"{path}: empty file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0].lower() != "graph":
        raise ParseError(f"{path}:{lineno}: expected header 'graph N'")
    n = _int(parts[1], path, lineno)
    edges = []
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"{path}:{lineno}: expected 'u v [w]'")
        e = [_int(parts[0], path, lineno), _int(parts[1], path, lineno)]
        if len(parts) == 3:
            e.append(_float(parts[2], path, lineno))
        edges.append(e)
    return Graph.from_edges(n, edges)


def read_signal(path) -> np.ndarray:
    lines = _lines(path)
    vals = []
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 1:
            raise ParseError(f"{path}:{lineno}: expected one value per line")
        vals.append(_float(parts[0], path, lineno))
    if not vals:
        raise ParseError(f"{path}: empty signal")
    return np.array(vals)


def format_number(x: float) -> str:
    return repr(float(x))


def write_matrix(path, a) -> None:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    body = "\n".join(" ".join(format_number(v) for v in row) for row in a)
    Path(path).write_text(body + "\n")


def write_signal(path, x) -> None:
    Path(path).write_text("\n".join(format_number(v) for v in np.ravel(x)) + "\n")


def to_jsonable(obj):
    """Convert numpy containers and non-finite floats into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"
