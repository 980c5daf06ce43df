"""Synthetic inputs, independent oracles and benchmark sweeps.

Angle conventions: a rectangle at pose ``phi`` has its major axis at ``phi``
(counterclockwise from the x axis in the ``(col, row)`` frame).  Its spectral
energy concentrates perpendicular to that axis, so the expected estimate is
``(phi + pi/2) mod pi``.  All errors are circular distances modulo ``pi``.
"""

from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .geometry import rotate
from .grid import as_grid
from .spectral import FaeConfig, angular_energy, centered_dft2, fae, polar_resample, power_spectrum

_SUPERSAMPLE = 4


@dataclass(frozen=True)
class RectSpec:
    """Filled rectangle ``|x'| <= a, |y'| <= b`` rotated by ``phi``.

    The rectangle is centred on the lattice point ``(H/2, H/2)``, the same
    point the centred spectrum uses as its origin, so hard-edged rectangles
    with integer ``a, b`` cover exactly ``(2a+1) x (2b+1)`` pixels.
    """

    H: int
    a: float
    b: float
    phi: float = 0.0
    amplitude: float = 1.0
    antialias: bool = True

    def __post_init__(self):
        if self.H < 4 or self.H % 2:
            raise ValueError("H must be an even integer >= 4")
        if not 0 < self.b <= self.a < self.H / 2 - 2:
            raise ValueError("need 0 < b <= a < H/2 - 2")


def _clean_trig(phi: float) -> tuple[float, float]:
    c, s = np.cos(phi), np.sin(phi)
    c = 0.0 if abs(c) < 1e-15 else c
    s = 0.0 if abs(s) < 1e-15 else s
    return c, s


def make_rectangle(spec: RectSpec) -> np.ndarray:
    """Render a rectangle; antialiased mode stores 4x4 supersampled coverage."""
    h = spec.H
    centre = h / 2
    c, s = _clean_trig(spec.phi % np.pi)
    if spec.antialias:
        offsets = (np.arange(_SUPERSAMPLE) + 0.5) / _SUPERSAMPLE - 0.5
    else:
        offsets = np.zeros(1)
    coords = np.arange(h)
    dx = (coords[None, :, None, None] + offsets[None, None, None, :]) - centre
    dy = (coords[:, None, None, None] + offsets[None, None, :, None]) - centre
    along = c * dx + s * dy
    across = -s * dx + c * dy
    inside = (np.abs(along) <= spec.a) & (np.abs(across) <= spec.b)
    return spec.amplitude * inside.mean(axis=(2, 3))


def expected_spectral_angle(phi: float) -> float:
    return float((phi + np.pi / 2) % np.pi)


def circular_error(a: float, b: float, period: float = np.pi) -> float:
    """Distance between two orientations modulo ``period`` (radians)."""
    d = (a - b) % period
    return float(min(d, period - d))


def band_limited_image(H: int = 64, seed: int = 0, n_waves: int = 4,
                       band: tuple[float, float] = (0.2, 0.35)) -> np.ndarray:
    """Smooth random test image: a few plane waves under a disk taper.

    Each wave has a random direction, a frequency drawn from ``band``
    (cycles per pixel, below Nyquist) and half the amplitude of the previous
    one, so the spectrum has one dominant, compact peak pair.  The raised
    cosine taper vanishes beyond radius ``H/2 - 2`` so rotations about the
    centre never crop the content.  The result is scaled to unit peak
    magnitude.
    """
    rng = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:H, 0:H] - (H - 1) / 2
    g = np.zeros((H, H))
    for k in range(n_waves):
        direction = rng.uniform(0, np.pi)
        freq = rng.uniform(*band)
        phase = rng.uniform(0, 2 * np.pi)
        proj = np.cos(direction) * xs + np.sin(direction) * ys
        g += 0.5 ** k * np.cos(2 * np.pi * freq * proj + phase)
    r = np.hypot(xs, ys) / (H / 2 - 2)
    taper = np.where(r < 1, np.cos(np.pi / 2 * np.clip(r, 0, 1)) ** 2, 0.0)
    g = g * taper
    return g / np.abs(g).max()


def dirichlet_rect_spectrum(H: int, a_px: int, b_px: int) -> np.ndarray:
    """Closed-form centred power spectrum of a hard ``(2a+1) x (2b+1)`` box.

    The DFT of a centred binary pulse of width ``n`` is the Dirichlet kernel
    ``D_n(k) = sin(pi n k / H) / sin(pi k / H)`` (``n`` at ``k = 0``), and a box
    is separable, so its power is ``(D_{2a+1}(u) D_{2b+1}(v))**2``.  The
    result is indexed ``[v + H/2, u + H/2]`` like a centred spectrum.
    """
    na, nb = 2 * a_px + 1, 2 * b_px + 1
    if a_px < 0 or b_px < 0 or na > H or nb > H:
        raise ValueError(f"box extents {na}x{nb} do not fit in H={H}")
    k = np.arange(H) - H // 2
    du = _dirichlet(na, k, H)
    dv = _dirichlet(nb, k, H)
    return np.outer(dv, du) ** 2


def _dirichlet(n: int, k: np.ndarray, H: int) -> np.ndarray:
    out = np.full(k.shape, float(n))
    nz = k != 0
    out[nz] = np.sin(np.pi * n * k[nz] / H) / np.sin(np.pi * k[nz] / H)
    return out


def oracle_angle_dense(g, step_deg: float = 0.25) -> float:
    """Brute-force dominant angle in ``[0, pi)``; 0 for a flat spectrum.

    Uses ``fftshift`` for centring and no polar resampling: for every
    candidate angle, the radially weighted power of every spectrum pixel is
    summed with a tent weight ``max(0, 1 - d)`` on its distance ``d`` to the
    line through DC at that angle.  The pixel angle comes from ``atan2`` and
    ``d = rho * |sin(alpha - theta)|``.  Pixels beyond radius ``H/2 - 1`` and DC
    are ignored, matching the estimator's radial range.
    """
    g = as_grid(g)
    H = g.shape[0]
    power = np.abs(np.fft.fftshift(np.fft.fft2(g))) ** 2
    k = np.arange(H) - H // 2
    dv, du = np.meshgrid(k, k, indexing="ij")
    rho = np.hypot(du, dv)
    keep = (rho > 0) & (rho <= H // 2 - 1)
    rho, alpha, weight = rho[keep], np.arctan2(dv[keep], du[keep]), (rho * power)[keep]
    candidates = np.radians(np.arange(0.0, 180.0, step_deg))
    energy = np.empty(candidates.size)
    for i, theta in enumerate(candidates):
        dist = rho * np.abs(np.sin(alpha - theta))
        energy[i] = (weight * np.clip(1.0 - dist, 0.0, None)).sum()
    if not energy.max() > 0:
        return 0.0
    return float(candidates[int(np.argmax(energy))])


@dataclass
class BenchReport:
    suite: str
    rows: list[dict]
    summary: dict
    config: dict
    runtime_ms: float = field(default=0.0, compare=False)

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = asdict(self)
        if not include_runtime:
            d.pop("runtime_ms")
        return d

    def to_json(self, path, include_runtime: bool = True) -> None:
        Path(path).write_text(json.dumps(self.to_dict(include_runtime), indent=2) + "\n")

    def to_csv(self, path) -> None:
        fields = list(self.rows[0]) if self.rows else []
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(self.rows)


def _summary(errors: list[float], key: str = "error_deg") -> dict:
    if not errors:
        return {f"median_{key}": None, f"p90_{key}": None, f"max_{key}": None, "count": 0}
    return {
        f"median_{key}": float(statistics.median(errors)),
        f"p90_{key}": float(np.percentile(errors, 90)),
        f"max_{key}": float(max(errors)),
        "count": len(errors),
    }


def bench_angle_sweep(H: int = 64, a: float = 20, b: float = 6, angles=None,
                      cfg: FaeConfig = FaeConfig(), antialias: bool = True,
                      oracle_step_deg: float | None = None) -> BenchReport:
    """Estimate the angle of a rectangle at each pose in ``angles`` (radians).

    Rows list the pose, the estimate, the expected perpendicular angle and the
    circular error, all in degrees.  A square (``a == b``) has no major axis;
    its rows carry ``expected_deg=None``.  With ``oracle_step_deg`` each row
    also records the brute-force oracle angle.
    """
    if angles is None:
        angles = np.radians(np.arange(0, 180, 5))
    start = time.perf_counter()
    rows, errors = [], []
    square = a == b
    for phi in angles:
        g = make_rectangle(RectSpec(H, a, b, float(phi), antialias=antialias))
        est = fae(g, cfg)
        row = {
            "phi_deg": float(np.degrees(phi)),
            "theta_hat_deg": est.theta_hat_deg,
            "degenerate": est.degenerate,
            "orientation_degenerate": square,
            "expected_deg": None,
            "abs_error_deg": None,
        }
        if not square:
            expected = expected_spectral_angle(phi)
            err = np.degrees(circular_error(est.theta_hat, expected))
            row["expected_deg"] = float(np.degrees(expected))
            row["abs_error_deg"] = float(err)
            errors.append(float(err))
        if oracle_step_deg:
            oracle = oracle_angle_dense(g, oracle_step_deg)
            row["oracle_deg"] = float(np.degrees(oracle))
            row["oracle_gap_deg"] = float(np.degrees(circular_error(oracle, est.theta_hat)))
        rows.append(row)
    summary = _summary(errors)
    if oracle_step_deg and rows:
        summary["max_oracle_gap_deg"] = max(r["oracle_gap_deg"] for r in rows)
    config = {"H": H, "a": a, "b": b, "antialias": antialias, **asdict(cfg)}
    return BenchReport("angles", rows, summary, config,
                       (time.perf_counter() - start) * 1000)


def bench_equivariance(g, angles, cfg: FaeConfig = FaeConfig()) -> BenchReport:
    """Track the histogram peak of ``rotate(g, phi)`` against the shifted peak of ``g``.

    A rotation by ``phi`` should move the peak by ``phi / bin_width`` bins;
    the reported displacement is the circular distance, in bins, between the
    observed peak and that prediction.
    """
    g = as_grid(g)
    start = time.perf_counter()
    n = cfg.n_bins
    base = int(np.argmax(fae(g, cfg).histogram))
    rows = []
    for phi in angles:
        rotated = rotate(g, float(phi))
        peak = int(np.argmax(fae(rotated, cfg).histogram))
        shift = int(round(phi / cfg.bin_width))
        predicted = (base + shift) % n
        d = (peak - predicted) % n
        rows.append({
            "phi_deg": float(np.degrees(phi)),
            "peak_bin": peak,
            "predicted_bin": predicted,
            "displacement_bins": int(min(d, n - d)),
        })
    disp = [r["displacement_bins"] for r in rows]
    summary = {"base_peak_bin": base,
               "max_displacement_bins": max(disp) if disp else None,
               "count": len(rows)}
    return BenchReport("equivariance", rows, summary, {"H": g.shape[0], **asdict(cfg)},
                       (time.perf_counter() - start) * 1000)
