"""CSV exchange of design/output tables: header ``x1,...,xd,y``."""
from __future__ import annotations

import csv
import io
import itertools

import numpy as np

from .exceptions import UsageError


def _float(text, lineno):
    try:
        v = float(text)
    except ValueError:
        raise UsageError(f"line {lineno}: cannot parse {text!r} as a number") from None
    if not np.isfinite(v):
        raise UsageError(f"line {lineno}: non-finite value {text!r}")
    return v


def read_data_csv(text):
    """Parse a design/output table.

    Returns
    -------
    X : ndarray, shape (n, d)
    y : ndarray, shape (n,)

    Raises
    ------
    UsageError
        With the 1-based line number of the first malformed line.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise UsageError("line 1: empty input, expected header x1,...,xd,y")
    header = [h.strip() for h in rows[0]]
    d = len(header) - 1
    if d < 1 or header != [f"x{i + 1}" for i in range(d)] + ["y"]:
        raise UsageError(f"line 1: header must be x1,...,xd,y, got {','.join(header)!r}")
    X, y = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != d + 1:
            raise UsageError(f"line {lineno}: expected {d + 1} fields, got {len(row)}")
        vals = [_float(f.strip(), lineno) for f in row]
        X.append(vals[:d])
        y.append(vals[d])
    if not X:
        raise UsageError("no data rows")
    return np.array(X), np.array(y)


def write_data_csv(X, y) -> str:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{i + 1}" for i in range(X.shape[1])] + ["y"])
    for row, v in zip(X, np.asarray(y, dtype=float).ravel()):
        w.writerow([repr(float(a)) for a in row] + [repr(float(v))])
    return buf.getvalue()


def parse_grid(spec, dim=None):
    """Tensor grid from ``lo:hi:n[,lo:hi:n...]``, one triple per dimension.

    The last dimension varies fastest. ``n = 0`` in any dimension gives an
    empty grid of shape ``(0, d)``.
    """
    axes = []
    for part in spec.split(","):
        fields = part.strip().split(":")
        if len(fields) != 3:
            raise UsageError(f"grid axis {part!r} is not lo:hi:n")
        try:
            lo, hi, n = float(fields[0]), float(fields[1]), int(fields[2])
        except ValueError:
            raise UsageError(f"grid axis {part!r} is not lo:hi:n") from None
        if not (np.isfinite(lo) and np.isfinite(hi)) or n < 0:
            raise UsageError(f"grid axis {part!r} needs finite bounds and n >= 0")
        axes.append(np.linspace(lo, hi, n))
    if dim is not None and len(axes) != dim:
        raise UsageError(f"grid has {len(axes)} axes for {dim}-dimensional inputs")
    pts = np.array(list(itertools.product(*axes)), dtype=float)
    return pts.reshape(-1, len(axes))
