"""Data containers, CSV ingestion and the stacking map Y (T x d) -> Z (T*d)."""

import csv
import io
from pathlib import Path

import numpy as np


class CsvFormatError(ValueError):
    """Raised for unreadable or incomplete observation files."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


def as_series(values):
    """Validate and return a T x d float array of observations.

    A 1-d input is read as a single coordinate (d = 1).
    """
    y = np.asarray(values, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if y.ndim != 2:
        raise ValueError(f"series must be 2-d (T x d), got shape {y.shape}")
    if y.shape[0] < 1 or y.shape[1] < 1:
        raise ValueError(f"series must have T >= 1 and d >= 1, got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    return y


def check_order(order, d):
    """Return ``order`` as a 0-based index array, validating it is a permutation of d items.

    ``order`` is given 1-based, as in the CLI (``--order 2,1``). ``None`` is the
    natural column order.
    """
    if order is None:
        return np.arange(d)
    idx = np.asarray(order, dtype=int).ravel()
    if idx.size != d:
        raise ValueError(f"order has length {idx.size}, expected d={d}")
    if sorted(idx.tolist()) != list(range(1, d + 1)):
        raise ValueError(f"order {idx.tolist()} is not a permutation of 1..{d}")
    return idx - 1


def stack(series, order=None):
    """Stack rows of a T x d series into one sequence of length T*d.

    Element ``(t - 1) * d + l`` is ``Y[t, order[l]]`` (1-based ``order``).

    >>> stack([[1, 2], [3, 4]], order=(2, 1)).tolist()
    [2.0, 1.0, 4.0, 3.0]
    """
    y = as_series(series)
    idx = check_order(order, y.shape[1])
    return y[:, idx].reshape(-1)


def unstack(z, d, order=None):
    """Inverse of :func:`stack`; ``order`` must be the one used for stacking."""
    z = np.asarray(z, dtype=float).ravel()
    d = int(d)
    if d < 1 or z.size % d:
        raise ValueError(f"length {z.size} is not divisible by d={d}")
    idx = check_order(order, d)
    y = np.empty((z.size // d, d))
    y[:, idx] = z.reshape(-1, d)
    return y


def clamp_pit(u, eps=1e-15):
    """Clip PIT values into [eps, 1 - eps]."""
    return np.clip(u, eps, 1.0 - eps)


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_csv(source):
    """Read a T x d numeric CSV; a non-numeric first row is taken as a header.

    Parameters
    ----------
    source : path or file-like

    Returns
    -------
    values : ndarray, shape (T, d)
    header : list of str or None
    """
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_csv(fh)

    rows = [r for r in csv.reader(source) if r and any(c.strip() for c in r)]
    if not rows:
        raise CsvFormatError("file contains no data")
    header = None
    first = 1
    if not all(_is_number(c.strip()) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first = 2
    if not rows:
        raise CsvFormatError("file contains a header but no data")

    d = len(header) if header is not None else len(rows[0])
    out = np.empty((len(rows), d))
    for i, row in enumerate(rows):
        lineno = i + first
        if len(row) != d:
            raise CsvFormatError(f"expected {d} columns, found {len(row)}", lineno)
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell == "":
                raise CsvFormatError(f"missing value in column {j + 1}", lineno)
            try:
                v = float(cell)
            except ValueError:
                raise CsvFormatError(f"non-numeric value {cell!r} in column {j + 1}", lineno) from None
            if not np.isfinite(v):
                raise CsvFormatError(f"non-finite value {cell!r} in column {j + 1}", lineno)
            out[i, j] = v
    return out, header


def write_csv(dest, values, header=None):
    """Write a 2-d array (or 1-d column) as CSV with full float precision."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    buf = io.StringIO() if dest is None else None
    fh = buf if buf is not None else (open(dest, "w", newline="", encoding="utf-8")
                                      if isinstance(dest, (str, Path)) else dest)
    try:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for row in arr:
            w.writerow([repr(float(v)) for v in row])
    finally:
        if isinstance(dest, (str, Path)):
            fh.close()
    return buf.getvalue() if buf is not None else None
