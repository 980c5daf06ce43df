"""Spatial resampling: rotation, angle alignment, 2x upsampling, unfold/fold."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._interp import bilinear
from .grid import as_feature_map, as_grid
from .spectral import AngleEstimate, FaeConfig, fae, wrap_half_turn


def rotate(g, angle: float, center: tuple[float, float] | None = None) -> np.ndarray:
    """Rotate a grid counterclockwise by ``angle`` radians about its centre.

    Counterclockwise is taken in the ``(x, y) = (col, row)`` frame.  Inverse
    mapping with bilinear interpolation; samples from outside the grid are 0.
    The default centre ``((H-1)/2, (W-1)/2)`` makes quarter turns of a square
    grid exact permutations.
    """
    g = as_grid(g)
    if not np.isfinite(angle):
        raise ValueError("rotation angle must be finite")
    h, w = g.shape
    cy, cx = center if center is not None else ((h - 1) / 2, (w - 1) / 2)
    if angle == 0:
        return g.copy()
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    dx, dy = xs - cx, ys - cy
    c, s = np.cos(angle), np.sin(angle)
    # source = R(-angle) @ (dx, dy)
    src_x = c * dx + s * dy + cx
    src_y = -s * dx + c * dy + cy
    return bilinear(g, src_y, src_x)


def rotate_channels(f, angle: float) -> np.ndarray:
    f = as_feature_map(f)
    return np.stack([rotate(ch, angle) for ch in f])


def faa_align(g, theta0: float = 0.0, cfg: FaeConfig = FaeConfig()) -> tuple[np.ndarray, AngleEstimate]:
    """Rotate ``g`` so its dominant spectral direction lands on ``theta0``.

    The rotation is ``theta0 - theta_hat`` reduced to ``[-pi/2, pi/2)``;
    orientations are only defined modulo a half turn, so the shorter of the
    two equivalent rotations is used.  A degenerate estimate returns a copy of
    ``g``.
    """
    g = as_grid(g)
    est = fae(g, cfg)
    if est.degenerate:
        return g.copy(), est
    return rotate(g, alignment_angle(theta0, est)), est


def alignment_angle(theta0: float, est: AngleEstimate) -> float:
    """Rotation that moves ``est`` onto ``theta0`` (0 for degenerate estimates)."""
    if est.degenerate:
        return 0.0
    return wrap_half_turn(theta0 - est.theta_hat)


def upsample2x(f) -> np.ndarray:
    """Bilinear 2x upsampling per channel (half-pixel centres, edge clamped)."""
    f = as_feature_map(f)
    _, h, w = f.shape
    sy = np.clip((np.arange(2 * h) + 0.5) / 2 - 0.5, 0, h - 1)
    sx = np.clip((np.arange(2 * w) + 0.5) / 2 - 0.5, 0, w - 1)
    y0 = np.floor(sy).astype(int)
    x0 = np.floor(sx).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (sy - y0)[:, None]
    wx = (sx - x0)[None, :]
    top = f[:, y0][:, :, x0] * (1 - wx) + f[:, y0][:, :, x1] * wx
    bottom = f[:, y1][:, :, x0] * (1 - wx) + f[:, y1][:, :, x1] * wx
    return top * (1 - wy) + bottom * wy


@dataclass(frozen=True)
class PatchSpec:
    """Patch extraction settings.

    ``padding="same"`` with ``stride=1`` gives one patch per pixel; for even
    kernels the extra pad row/column goes to the bottom/right.
    """

    kernel: int = 8
    stride: int | None = None
    padding: int | str = 0
    normalize_fold: bool = True

    def __post_init__(self):
        if self.kernel < 1:
            raise ValueError("kernel must be positive")
        if self.stride is not None and self.stride < 1:
            raise ValueError("stride must be positive")
        if self.padding == "same":
            if self.step != 1:
                raise ValueError('padding="same" requires stride 1')
        elif not isinstance(self.padding, (int, np.integer)) or self.padding < 0:
            raise ValueError("padding must be a non-negative integer or 'same'")

    @classmethod
    def dense(cls, kernel: int, normalize_fold: bool = True) -> "PatchSpec":
        return cls(kernel=kernel, stride=1, padding="same", normalize_fold=normalize_fold)

    @property
    def step(self) -> int:
        return self.kernel if self.stride is None else self.stride

    @property
    def tiled(self) -> bool:
        return self.step == self.kernel and self.padding == 0

    def pads(self) -> tuple[int, int]:
        """Leading and trailing padding along each axis."""
        if self.padding == "same":
            lead = (self.kernel - 1) // 2
            return lead, self.kernel - 1 - lead
        return self.padding, self.padding

    def grid_positions(self, h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
        """Top-left corners (in unpadded coordinates) of all patches."""
        if self.tiled and (h % self.kernel or w % self.kernel):
            raise ValueError(
                f"tiled unfold needs sizes divisible by {self.kernel}, got {h}x{w}"
            )
        lead, trail = self.pads()
        k, s = self.kernel, self.step
        nr = (h + lead + trail - k) // s + 1
        nc = (w + lead + trail - k) // s + 1
        if nr < 1 or nc < 1:
            raise ValueError(f"kernel {k} does not fit a {h}x{w} canvas")
        return np.arange(nr) * s - lead, np.arange(nc) * s - lead


@dataclass(frozen=True)
class PatchSet:
    """``patches[n]`` is the ``C x k x k`` patch whose top-left corner is ``positions[n]``."""

    patches: np.ndarray
    positions: np.ndarray
    shape: tuple[int, int, int]

    def __len__(self) -> int:
        return self.patches.shape[0]

    def replace(self, patches: np.ndarray) -> "PatchSet":
        return PatchSet(np.asarray(patches, dtype=np.float64), self.positions, self.shape)


def unfold(f, spec: PatchSpec = PatchSpec()) -> PatchSet:
    f = as_feature_map(f)
    c, h, w = f.shape
    rows, cols = spec.grid_positions(h, w)
    lead, trail = spec.pads()
    k = spec.kernel
    padded = np.pad(f, ((0, 0), (lead, trail + k), (lead, trail + k)))
    patches = np.empty((rows.size * cols.size, c, k, k))
    positions = np.empty((rows.size * cols.size, 2), dtype=np.int64)
    n = 0
    for r in rows:
        for q in cols:
            patches[n] = padded[:, r + lead:r + lead + k, q + lead:q + lead + k]
            positions[n] = (r, q)
            n += 1
    return PatchSet(patches, positions, (c, h, w))


def fold(p: PatchSet, spec: PatchSpec = PatchSpec(), out_shape=None) -> np.ndarray:
    """Overlap-add patches back onto a canvas.

    With ``spec.normalize_fold`` each pixel is divided by the number of
    patches covering it, so ``fold(unfold(f)) == f``.
    """
    out_shape = tuple(out_shape or p.shape)
    c, h, w = out_shape
    k = spec.kernel
    rows, cols = spec.grid_positions(h, w)
    if len(p) != rows.size * cols.size or p.patches.shape[1:] != (c, k, k):
        raise ValueError("patch set does not match the patch layout and output shape")
    expected = np.stack(np.meshgrid(rows, cols, indexing="ij"), -1).reshape(-1, 2)
    if not np.array_equal(p.positions, expected):
        raise ValueError("patch positions do not match the patch layout")
    lead, trail = spec.pads()
    acc = np.zeros((c, h + lead + trail + k, w + lead + trail + k))
    count = np.zeros(acc.shape[1:])
    for patch, (r, q) in zip(p.patches, p.positions):
        acc[:, r + lead:r + lead + k, q + lead:q + lead + k] += patch
        count[r + lead:r + lead + k, q + lead:q + lead + k] += 1
    acc = acc[:, lead:lead + h, lead:lead + w]
    count = count[lead:lead + h, lead:lead + w]
    if spec.normalize_fold:
        if np.any(count == 0):
            raise ValueError("some output pixels are not covered by any patch")
        acc = acc / count
    return acc


def contribution_count(shape, spec: PatchSpec) -> np.ndarray:
    """How many patches cover each pixel of a ``(H, W)`` canvas."""
    h, w = shape
    ones = unfold(np.ones((1, h, w)), spec)
    raw = PatchSpec(spec.kernel, spec.stride, spec.padding, normalize_fold=False)
    return fold(ones.replace(np.ones_like(ones.patches)), raw, (1, h, w))[0]
