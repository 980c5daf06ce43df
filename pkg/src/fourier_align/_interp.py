import numpy as np

# Sample coordinates this close to an integer are treated as exact lattice
# points, so quarter-turn rotations stay pure permutations.
SNAP_TOL = 1e-9


def bilinear(g: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Bilinearly sample ``g`` at fractional ``(rows, cols)``.

    Neighbours outside the grid read as zero.  ``rows`` and ``cols`` must
    broadcast to a common shape, which is the shape of the result.
    """
    rows, cols = np.broadcast_arrays(np.asarray(rows, float), np.asarray(cols, float))
    rows = _snap(rows)
    cols = _snap(cols)
    h, w = g.shape
    r0 = np.floor(rows).astype(np.int64)
    c0 = np.floor(cols).astype(np.int64)
    fr = rows - r0
    fc = cols - c0

    out = np.zeros(rows.shape, dtype=np.float64)
    for dr, wr in ((0, 1.0 - fr), (1, fr)):
        for dc, wc in ((0, 1.0 - fc), (1, fc)):
            rr = r0 + dr
            cc = c0 + dc
            ok = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
            weight = wr * wc
            vals = np.zeros(rows.shape, dtype=np.float64)
            vals[ok] = g[rr[ok], cc[ok]]
            # zero weights must not touch the sum, even for neighbours
            # that would be out of range
            use = ok & (weight != 0)
            out[use] += weight[use] * vals[use]
    return out


def _snap(x: np.ndarray) -> np.ndarray:
    nearest = np.rint(x)
    return np.where(np.abs(x - nearest) < SNAP_TOL, nearest, x)
