"""Grid and feature-map values plus CSV / PGM file I/O.

A *grid* is a 2D ``float64`` numpy array indexed ``[row, col]`` (``row = y``,
``col = x``).  A *feature map* is a 3D ``float64`` array ``[channel, row, col]``.
Nothing in this package mutates its inputs; every operation returns a new
array.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

import numpy as np

PathLike = str | os.PathLike


class GridFormatError(ValueError):
    """Raised when a grid file cannot be parsed."""


def as_grid(data, name: str = "grid") -> np.ndarray:
    """Validate and convert ``data`` to a finite 2D float64 array."""
    g = np.asarray(data, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2D array, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError(f"{name} contains non-finite values")
    return g


def as_feature_map(data, name: str = "feature map") -> np.ndarray:
    """Validate and convert ``data`` to a finite 3D float64 array ``(C, H, W)``."""
    f = np.asarray(data, dtype=np.float64)
    if f.ndim == 2:
        f = f[np.newaxis]
    if f.ndim != 3 or min(f.shape) < 1:
        raise ValueError(f"{name} must be a non-empty (C, H, W) array, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError(f"{name} contains non-finite values")
    return f


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def grid_from_csv(path: PathLike) -> np.ndarray:
    """Read a comma-separated grid, one row per line.

    Errors name the offending 1-based row and column.
    """
    text = Path(path).read_text()
    rows = []
    width = None
    for r, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise GridFormatError(
                f"{path}: ragged rows: row {r} has {len(cells)} columns, expected {width}"
            )
        row = []
        for c, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise GridFormatError(
                    f"{path}: non-numeric cell {cell.strip()!r} at row {r}, column {c}"
                ) from None
            if not np.isfinite(value):
                raise GridFormatError(f"{path}: non-finite cell at row {r}, column {c}")
            row.append(value)
        rows.append(row)
    if not rows:
        raise GridFormatError(f"{path}: empty grid file")
    return np.array(rows, dtype=np.float64)


def grid_to_csv(g, path: PathLike) -> None:
    """Write a grid as CSV using shortest round-trip float formatting."""
    g = as_grid(g)
    lines = [",".join(repr(float(v)) for v in row) for row in g]
    Path(path).write_text("\n".join(lines) + "\n")


def matrix_from_csv(path: PathLike) -> np.ndarray:
    """Read a CSV matrix (used for projection and layer weights)."""
    return grid_from_csv(path)


# ---------------------------------------------------------------------------
# PGM
# ---------------------------------------------------------------------------

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    while len(tokens) < count:
        m = _TOKEN.match(data, pos)
        if m is None:
            raise GridFormatError("malformed header")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def read_pgm(path: PathLike) -> tuple[np.ndarray, str, int]:
    """Read a P2 or P5 PGM file.

    :return: ``(grid, magic, maxval)`` where ``magic`` is ``"P2"`` or ``"P5"``.
    """
    data = Path(path).read_bytes()
    try:
        (magic, w, h, maxval), pos = _header_tokens(data, 4)
        width, height, maxval = int(w), int(h), int(maxval)
    except (GridFormatError, ValueError):
        raise GridFormatError(f"{path}: malformed header") from None
    magic = magic.decode("ascii", "replace")
    if magic not in ("P2", "P5") or width < 1 or height < 1 or not 0 < maxval < 65536:
        raise GridFormatError(f"{path}: malformed header")
    n = width * height

    if magic == "P2":
        tokens = data[pos:].split()
        if len(tokens) != n:
            raise GridFormatError(
                f"{path}: truncated payload: expected {n} samples, found {len(tokens)}"
            )
        try:
            values = np.array([int(t) for t in tokens], dtype=np.float64)
        except ValueError:
            raise GridFormatError(f"{path}: non-integer sample in payload") from None
    else:
        if maxval > 255:
            raise GridFormatError(f"{path}: P5 with maxval > 255 is not supported")
        payload = data[pos + 1:]  # single whitespace byte after maxval
        if len(payload) < n:
            raise GridFormatError(
                f"{path}: truncated payload: expected {n} bytes, found {len(payload)}"
            )
        values = np.frombuffer(payload[:n], dtype=np.uint8).astype(np.float64)
    if np.any(values > maxval):
        raise GridFormatError(f"{path}: sample exceeds maxval {maxval}")
    return values.reshape(height, width), magic, maxval


def grid_from_pgm(path: PathLike) -> np.ndarray:
    """Read a P2 (ASCII) or P5 (binary) PGM image as a float grid."""
    return read_pgm(path)[0]


def grid_to_pgm(g, path: PathLike, normalize: bool = False, binary: bool = False,
                maxval: int = 255) -> None:
    """Write a grid as PGM.

    With ``normalize`` the range ``[min, max]`` is mapped affinely onto
    ``[0, maxval]`` (a constant grid maps to 0).  Otherwise values must already
    lie in ``[0, maxval]``; they are rounded to the nearest integer.
    """
    g = as_grid(g)
    if normalize:
        lo, hi = g.min(), g.max()
        if hi > lo:
            # clip absorbs the last-ulp overshoot of the affine map
            g = np.clip((g - lo) * (maxval / (hi - lo)), 0, maxval)
        else:
            g = np.zeros_like(g)
    if g.min() < 0 or g.max() > maxval:
        raise ValueError(f"values outside [0, {maxval}]; pass normalize=True")
    samples = np.rint(g).astype(np.int64)
    height, width = samples.shape
    if binary:
        if maxval > 255:
            raise ValueError("binary PGM output supports maxval <= 255 only")
        header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
        Path(path).write_bytes(header + samples.astype(np.uint8).tobytes())
    else:
        body = "\n".join(" ".join(str(v) for v in row) for row in samples)
        Path(path).write_text(f"P2\n{width} {height}\n{maxval}\n{body}\n")


def read_grid(path: PathLike, fmt: str | None = None) -> np.ndarray:
    """Read a grid, picking the format from ``fmt`` or the file suffix."""
    fmt = fmt or guess_format(path)
    if fmt == "csv":
        return grid_from_csv(path)
    if fmt == "pgm":
        return grid_from_pgm(path)
    raise ValueError(f"unknown grid format {fmt!r}")


def guess_format(path: PathLike) -> str:
    suffix = Path(path).suffix.lower()
    return "pgm" if suffix in (".pgm", ".pnm") else "csv"
