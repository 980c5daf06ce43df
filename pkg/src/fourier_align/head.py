"""RoI head: canonical-pose alignment with a residual, then an affine chain."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .geometry import alignment_angle, rotate_channels
from .grid import as_feature_map, grid_to_csv, matrix_from_csv
from .spectral import AngleEstimate, FaeConfig, fae

BOX_PARAMS = ("dx", "dy", "dw", "dh", "dtheta")


@dataclass(frozen=True)
class LinearWeights:
    """Affine layers ``y = w @ x + b``; matrices are ``(out, in)``."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w_cls: np.ndarray
    b_cls: np.ndarray
    w_reg: np.ndarray
    b_reg: np.ndarray

    def __post_init__(self):
        for f in fields(self):
            want = 2 if f.name.startswith("w") else 1
            arr = np.asarray(getattr(self, f.name), dtype=np.float64)
            if want == 1:
                arr = arr.reshape(-1)
            if arr.ndim != want:
                raise ValueError(f"{f.name} must be {want}D, got shape {arr.shape}")
            object.__setattr__(self, f.name, arr)
        chain = [("w1", "b1"), ("w2", "b2"), ("w_cls", "b_cls"), ("w_reg", "b_reg")]
        for w, b in chain:
            if getattr(self, w).shape[0] != getattr(self, b).shape[0]:
                raise ValueError(f"{w} and {b} disagree on output size")
        if self.w2.shape[1] != self.w1.shape[0]:
            raise ValueError("w2 input size must equal w1 output size")
        for w in ("w_cls", "w_reg"):
            if getattr(self, w).shape[1] != self.w2.shape[0]:
                raise ValueError(f"{w} input size must equal w2 output size")
        if self.w_reg.shape[0] != 5 * self.w_cls.shape[0]:
            raise ValueError("w_reg must produce 5 box deltas per class")

    @property
    def in_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def num_classes(self) -> int:
        return self.w_cls.shape[0]

    @classmethod
    def random(cls, in_dim: int, d1: int = 1280, d2: int = 1024, num_classes: int = 15,
               seed: int = 0, scale: float | None = None) -> "LinearWeights":
        """Seeded Gaussian weights (``scale`` defaults to ``1/sqrt(fan_in)``)."""
        rng = np.random.default_rng(seed)

        def layer(n_out, n_in):
            s = scale if scale is not None else 1.0 / np.sqrt(n_in)
            return rng.normal(0.0, s, (n_out, n_in)), rng.normal(0.0, s, n_out)

        w1, b1 = layer(d1, in_dim)
        w2, b2 = layer(d2, d1)
        w_cls, b_cls = layer(num_classes, d2)
        w_reg, b_reg = layer(5 * num_classes, d2)
        return cls(w1, b1, w2, b2, w_cls, b_cls, w_reg, b_reg)

    @classmethod
    def load(cls, manifest) -> "LinearWeights":
        """Load from a manifest of ``name=path`` lines (paths relative to it)."""
        manifest = Path(manifest)
        paths = {}
        for lineno, line in enumerate(manifest.read_text().splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in {f.name for f in fields(cls)}:
                raise ValueError(f"{manifest}:{lineno}: unknown weight entry {line!r}")
            paths[key] = manifest.parent / value.strip()
        missing = {f.name for f in fields(cls)} - paths.keys()
        if missing:
            raise ValueError(f"{manifest}: missing entries {sorted(missing)}")
        return cls(**{k: matrix_from_csv(p) for k, p in paths.items()})

    def save(self, directory) -> Path:
        """Write one CSV per component plus ``weights.manifest``; returns the manifest."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        lines = []
        for f in fields(self):
            arr = getattr(self, f.name)
            grid_to_csv(np.atleast_2d(arr), directory / f"{f.name}.csv")
            lines.append(f"{f.name}={f.name}.csv")
        manifest = directory / "weights.manifest"
        manifest.write_text("\n".join(lines) + "\n")
        return manifest


@dataclass(frozen=True)
class HeadConfig:
    fae: FaeConfig = FaeConfig()
    fc_dims: tuple[int, int] = (1024 + 256, 1024)
    num_classes: int = 15
    weights: LinearWeights | None = None

    def __post_init__(self):
        w = self.weights
        if w is None:
            return
        if (w.w1.shape[0], w.w2.shape[0]) != tuple(self.fc_dims):
            raise ValueError(f"weights have fc dims {(w.w1.shape[0], w.w2.shape[0])}, "
                             f"config says {tuple(self.fc_dims)}")
        if w.num_classes != self.num_classes:
            raise ValueError("weights and config disagree on num_classes")


def _check_roi(roi) -> np.ndarray:
    roi = as_feature_map(roi, "roi")
    _, h, w = roi.shape
    if h != w:
        raise ValueError(f"RoI must be square, got {h}x{w}")
    if h < 4 or h % 2:
        raise ValueError(f"RoI side must be even and >= 4, got {h}")
    return roi


def canonical_features(roi, cfg: HeadConfig = HeadConfig()) -> tuple[np.ndarray, AngleEstimate]:
    """Rotate every channel of ``roi`` to the 0 rad pose with one shared angle.

    The angle is estimated on the channel-mean grid.  Degenerate estimates
    leave the RoI unrotated.
    """
    roi = _check_roi(roi)
    est = fae(roi.mean(axis=0), cfg.fae)
    if est.degenerate:
        return roi.copy(), est
    return rotate_channels(roi, alignment_angle(0.0, est)), est


def faa_head_features(roi, cfg: HeadConfig = HeadConfig()) -> np.ndarray:
    """Aligned features plus the original RoI as a residual."""
    roi = _check_roi(roi)
    aligned, _ = canonical_features(roi, cfg)
    return aligned + roi


def head_forward(roi, cfg: HeadConfig) -> tuple[np.ndarray, np.ndarray]:
    """Class scores (``num_classes``) and box deltas (``5 * num_classes``).

    Deltas are laid out per class as ``(dx, dy, dw, dh, dtheta)``.
    """
    w = cfg.weights
    if w is None:
        raise ValueError("head_forward needs weights")
    x = faa_head_features(roi, cfg).reshape(-1)
    if x.size != w.in_dim:
        raise ValueError(f"flattened RoI has {x.size} values, weights expect {w.in_dim}")
    hidden = np.maximum(w.w1 @ x + w.b1, 0.0)
    z = w.w2 @ hidden + w.b2
    return w.w_cls @ z + w.b_cls, w.w_reg @ z + w.b_reg
