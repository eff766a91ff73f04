"""Plain-text point-set files.

Layout: a header line ``n m`` followed by ``m`` lines of ``n`` coordinates,
each written with 17 significant digits and separated by single spaces.
Lines starting with ``#`` are comments and may appear anywhere.
"""

from __future__ import annotations

import io
import re
import sys
from typing import TextIO

import numpy as np

from .configurations import NORM_TOL, SphericalConfiguration
from .errors import PointFileError


def format_coordinate(x: float) -> str:
    # -0.0 prints as "-0" under %g; keep the sign-free form for stable goldens
    if x == 0:
        x = 0.0
    return f"{x:.17g}"


def dumps(X: SphericalConfiguration, comments=()) -> str:
    out = io.StringIO()
    dump(X, out, comments)
    return out.getvalue()


def dump(X: SphericalConfiguration, stream: TextIO, comments=()):
    for c in comments:
        stream.write(f"# {c}\n")
    stream.write(f"{X.dimension} {X.m}\n")
    for p in X.points:
        stream.write(" ".join(format_coordinate(float(v)) for v in p))
        stream.write("\n")


def save(X: SphericalConfiguration, path, comments=()):
    with open(path, "w", encoding="utf-8") as fh:
        dump(X, fh, comments)


def _column_of(raw: str, token_index: int) -> int:
    starts = [mt.start() for mt in re.finditer(r"\S+", raw)]
    return starts[token_index] + 1


def loads(text: str, normalize: bool = False, norm_tol: float = NORM_TOL) -> SphericalConfiguration:
    """Parse a point-set file.  Errors carry 1-based line and column numbers."""
    header = None
    rows = []
    row_lines = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        tokens = line.split()
        if header is None:
            if len(tokens) != 2:
                raise PointFileError("header must be 'n m'", lineno, 1)
            try:
                n, m = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise PointFileError(f"header must hold two integers, got {line!r}", lineno, 1) from None
            if n < 1 or m < 1:
                raise PointFileError("n and m must be positive", lineno, 1)
            header = (n, m)
            continue
        n, m = header
        if len(rows) == m:
            raise PointFileError(f"more than the declared {m} points", lineno, 1)
        if len(tokens) != n:
            raise PointFileError(f"expected {n} coordinates, found {len(tokens)}", lineno, 1)
        row = []
        for k, tok in enumerate(tokens):
            try:
                row.append(float(tok))
            except ValueError:
                raise PointFileError(f"not a number: {tok!r}", lineno, _column_of(line, k)) from None
        rows.append(row)
        row_lines.append(lineno)
    if header is None:
        raise PointFileError("empty file: missing 'n m' header", lineno or 1)
    if len(rows) != header[1]:
        raise PointFileError(f"declared {header[1]} points but found {len(rows)}", lineno)
    arr = np.array(rows, dtype=float)
    if not normalize:
        norms = np.linalg.norm(arr, axis=1)
        bad = np.nonzero(np.abs(norms - 1) > norm_tol)[0]
        if bad.size:
            k = int(bad[0])
            raise PointFileError(
                f"point {k} has norm {norms[k]!r}; pass --normalize to rescale", row_lines[k], 1
            )
    return SphericalConfiguration(arr, normalize=normalize, norm_tol=norm_tol)


def load(path, normalize: bool = False, norm_tol: float = NORM_TOL) -> SphericalConfiguration:
    """Read from ``path``; ``-`` reads standard input."""
    if str(path) == "-":
        return loads(sys.stdin.read(), normalize, norm_tol)
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), normalize, norm_tol)
