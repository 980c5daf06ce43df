"""Orientation-aligned cross-scale fusion for one FPN lateral merge.

The high-level map is upsampled, both maps are projected to ``c_mid``
channels and cut into patches.  Every high patch is rotated so that its own
dominant direction matches the dominant direction of the low patch at the
same position; the rotated patches are folded back, projected to ``C``
channels and added to the low map and the upsampled high map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import PatchSpec, alignment_angle, fold, rotate_channels, unfold, upsample2x
from .grid import as_feature_map, matrix_from_csv
from .spectral import FaeConfig, fae

IDENTITY_TRUNCATE = "identity_truncate"
AVERAGE_GROUPS = "average_groups"
EXPLICIT_MATRIX = "explicit_matrix"


@dataclass(frozen=True)
class ProjectionSpec:
    """Per-pixel linear channel map standing in for a 1x1 convolution.

    ``out_channels=None`` keeps the input channel count (identity).
    ``explicit_matrix`` takes a ``(out, in)`` matrix, e.g. exported conv
    weights.
    """

    kind: str = IDENTITY_TRUNCATE
    out_channels: int | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in (IDENTITY_TRUNCATE, AVERAGE_GROUPS, EXPLICIT_MATRIX):
            raise ValueError(f"unknown projection kind {self.kind!r}")
        if self.kind == EXPLICIT_MATRIX:
            if self.matrix is None:
                raise ValueError("explicit_matrix projection needs a matrix")
            m = np.asarray(self.matrix, dtype=np.float64)
            if m.ndim != 2:
                raise ValueError("projection matrix must be 2D")
            object.__setattr__(self, "matrix", m)
            object.__setattr__(self, "out_channels", m.shape[0])

    @classmethod
    def from_csv(cls, path) -> "ProjectionSpec":
        return cls(EXPLICIT_MATRIX, matrix=matrix_from_csv(path))

    def as_matrix(self, in_channels: int) -> np.ndarray:
        out = self.out_channels or in_channels
        if self.kind == EXPLICIT_MATRIX:
            if self.matrix.shape[1] != in_channels:
                raise ValueError(
                    f"projection expects {self.matrix.shape[1]} channels, got {in_channels}"
                )
            return self.matrix
        if self.kind == IDENTITY_TRUNCATE:
            if out > in_channels:
                raise ValueError(f"identity_truncate cannot widen {in_channels} -> {out}")
            return np.eye(out, in_channels)
        if in_channels % out:
            raise ValueError(f"average_groups needs {in_channels} divisible by {out}")
        group = in_channels // out
        return np.kron(np.eye(out), np.full((1, group), 1.0 / group))


def project_channels(f, p: ProjectionSpec = ProjectionSpec()) -> np.ndarray:
    """``out[c'] = sum_c M[c', c] * f[c]`` at every pixel."""
    f = as_feature_map(f)
    c = f.shape[0]
    if p.kind == IDENTITY_TRUNCATE:
        out = p.out_channels or c
        if out > c:
            raise ValueError(f"identity_truncate cannot widen {c} -> {out}")
        return f[:out].copy()
    m = p.as_matrix(c)
    return np.einsum("oc,chw->ohw", m, f)


@dataclass(frozen=True)
class FusionConfig:
    """Settings for :func:`faafusion`.

    ``c_mid=None`` means no channel reduction.  Projections left as ``None``
    default to identity truncation onto ``c_mid`` (low, high) and identity
    (out).
    """

    c_mid: int | None = None
    patch: PatchSpec = PatchSpec(kernel=8)
    fae: FaeConfig = FaeConfig()
    proj_low: ProjectionSpec | None = None
    proj_high: ProjectionSpec | None = None
    proj_out: ProjectionSpec | None = None

    def __post_init__(self):
        k = self.patch.kernel
        if k < 4 or k % 2:
            raise ValueError("fusion patches need an even kernel >= 4")
        if self.c_mid is not None and self.c_mid < 1:
            raise ValueError("c_mid must be positive")

    def projections(self, channels: int) -> tuple[ProjectionSpec, ProjectionSpec, ProjectionSpec]:
        c_mid = self.c_mid or channels
        if c_mid > channels:
            raise ValueError(f"c_mid={c_mid} exceeds the channel count {channels}")
        default = ProjectionSpec(IDENTITY_TRUNCATE, c_mid)
        return (self.proj_low or default, self.proj_high or default,
                self.proj_out or ProjectionSpec())


@dataclass(frozen=True)
class FusionTrace:
    """Intermediate results of one fusion call.

    Per-patch angles are ``nan`` where the estimate was degenerate;
    ``rotation`` is 0 wherever either side was degenerate.
    """

    output: np.ndarray
    upsampled: np.ndarray
    recon: np.ndarray
    theta_low: np.ndarray
    theta_high: np.ndarray
    rotation: np.ndarray
    positions: np.ndarray


def faafusion(low, high, cfg: FusionConfig = FusionConfig()) -> np.ndarray:
    """Fuse ``low`` (C x 2H x 2W) with ``high`` (C x H x W); returns C x 2H x 2W."""
    return faafusion_trace(low, high, cfg).output


def faafusion_trace(low, high, cfg: FusionConfig = FusionConfig()) -> FusionTrace:
    low = as_feature_map(low, "low")
    high = as_feature_map(high, "high")
    c, h2, w2 = low.shape
    if high.shape[0] != c:
        raise ValueError(f"channel mismatch: low has {c}, high has {high.shape[0]}")
    if (h2, w2) != (2 * high.shape[1], 2 * high.shape[2]):
        raise ValueError(f"low {low.shape} must be exactly twice high {high.shape} spatially")
    if high.shape[1] % 2 or high.shape[2] % 2:
        raise ValueError("high-level map needs even spatial dimensions")
    proj_low, proj_high, proj_out = cfg.projections(c)

    upsampled = upsample2x(high)
    patches_high = unfold(project_channels(upsampled, proj_high), cfg.patch)
    patches_low = unfold(project_channels(low, proj_low), cfg.patch)

    n = len(patches_high)
    theta_low = np.full(n, np.nan)
    theta_high = np.full(n, np.nan)
    rotation = np.zeros(n)
    rotated = np.empty_like(patches_high.patches)
    for i in range(n):
        est_low = fae(patches_low.patches[i].mean(axis=0), cfg.fae)
        est_high = fae(patches_high.patches[i].mean(axis=0), cfg.fae)
        if not est_low.degenerate:
            theta_low[i] = est_low.theta_hat
        if not est_high.degenerate:
            theta_high[i] = est_high.theta_hat
        if est_low.degenerate or est_high.degenerate:
            rotated[i] = patches_high.patches[i]
            continue
        rotation[i] = alignment_angle(est_low.theta_hat, est_high)
        rotated[i] = rotate_channels(patches_high.patches[i], rotation[i])

    folded = fold(patches_high.replace(rotated), cfg.patch)
    recon = project_channels(folded, proj_out)
    if recon.shape != low.shape:
        raise ValueError(f"output projection gives {recon.shape}, expected {low.shape}")
    # the residual is formed first so an offset on low passes through untouched
    return FusionTrace(
        output=low + (upsampled + recon),
        upsampled=upsampled,
        recon=recon,
        theta_low=theta_low,
        theta_high=theta_high,
        rotation=rotation,
        positions=patches_high.positions,
    )
