"""Fourier angle estimation.

The chain is: optional window, centring by ``(-1)**(x + y)``, 2D DFT, power
spectrum, bilinear polar resampling, radially weighted angular energy, and
an argmax restricted to ``[0, pi)``.

Frequency conventions: ``u`` pairs with ``x`` (columns) and ``v`` with ``y``
(rows), so a spectrum array is indexed ``[v, u]`` just like a grid is indexed
``[y, x]``.  Angles are measured from the ``u`` axis towards the ``v`` axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._interp import bilinear
from .grid import as_grid

HALF_TURN = "half_turn"
FULL_TURN = "full_turn"


@dataclass(frozen=True)
class Spectrum:
    """Complex ``H x H`` spectrum; ``centered`` puts DC at ``(H//2, H//2)``."""

    data: np.ndarray
    centered: bool = False

    @property
    def size(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class PowerSpectrum:
    """Squared magnitudes of a :class:`Spectrum`, keeping its centring flag."""

    data: np.ndarray
    centered: bool = False


@dataclass(frozen=True)
class FaeConfig:
    """Discretisation of the angle estimator.

    ``n_rho=None`` means ``H//2 - 1`` radial samples for an ``H x H`` input.
    ``n_theta`` counts bins over the full turn; the folded histogram has
    ``n_theta // 2`` bins over ``[0, pi)``.
    """

    n_theta: int = 360
    n_rho: int | None = None
    energy_floor: float = 1e-8
    window: str = "none"

    def __post_init__(self):
        if self.n_theta < 4:
            raise ValueError("n_theta must be >= 4")
        if self.n_theta % 2:
            raise ValueError("n_theta must be even so the histogram can be folded")
        if self.n_rho is not None and self.n_rho < 1:
            raise ValueError("n_rho must be >= 1")
        if self.energy_floor < 0:
            raise ValueError("energy_floor must be >= 0")
        if self.window not in ("none", "hann"):
            raise ValueError(f"unknown window {self.window!r}")

    @property
    def n_bins(self) -> int:
        """Number of folded bins over ``[0, pi)``."""
        return self.n_theta // 2

    @property
    def bin_width(self) -> float:
        return np.pi / self.n_bins


@dataclass(frozen=True)
class PolarEnergy:
    """Power samples ``data[i, j]`` at radius ``rho[i]`` and angle ``theta[j]``."""

    data: np.ndarray
    rho_max: float
    theta_span: str = FULL_TURN

    @property
    def n_rho(self) -> int:
        return self.data.shape[0]

    @property
    def n_theta(self) -> int:
        return self.data.shape[1]

    @property
    def rho(self) -> np.ndarray:
        return np.arange(1, self.n_rho + 1) * (self.rho_max / self.n_rho)

    @property
    def theta(self) -> np.ndarray:
        span = 2 * np.pi if self.theta_span == FULL_TURN else np.pi
        return np.arange(self.n_theta) * (span / self.n_theta)


@dataclass(frozen=True)
class AngleEstimate:
    theta_hat: float
    histogram: np.ndarray = field(repr=False)
    degenerate: bool
    total_energy: float

    @property
    def theta_hat_deg(self) -> float:
        return float(np.degrees(self.theta_hat))


def _square(g, name="grid") -> np.ndarray:
    g = as_grid(g, name)
    if g.shape[0] != g.shape[1]:
        raise ValueError(f"{name} must be square, got shape {g.shape}")
    return g


def dft2(g) -> Spectrum:
    """Uncentred 2D DFT ``F[v, u] = sum g[y, x] exp(-2 pi i (u x + v y) / H)``."""
    g = _square(g)
    return Spectrum(np.fft.fft2(g), centered=False)


def center_spectrum(g) -> np.ndarray:
    """Multiply by ``(-1)**(x + y)`` so the DFT has DC at ``(H//2, H//2)``.

    Works on any grid; it is its own inverse.
    """
    g = as_grid(g)
    h, w = g.shape
    sign = np.where((np.add.outer(np.arange(h), np.arange(w)) % 2) == 0, 1.0, -1.0)
    return g * sign


def centered_dft2(g) -> Spectrum:
    """DFT of the centred grid, flagged ``centered=True``."""
    return Spectrum(dft2(center_spectrum(g)).data, centered=True)


def power_spectrum(s: Spectrum) -> PowerSpectrum:
    d = s.data
    return PowerSpectrum(d.real ** 2 + d.imag ** 2, centered=s.centered)


def hann_window(h: int) -> np.ndarray:
    """Separable symmetric Hann window of size ``h x h``."""
    w = np.hanning(h)
    return np.outer(w, w)


def polar_resample(p, cfg: FaeConfig = FaeConfig()) -> PolarEnergy:
    """Sample a centred power grid on a polar lattice around ``(H/2, H/2)``.

    Radii are ``rho_i = (i + 1) * rho_max / n_rho`` with ``rho_max = H//2 - 1``
    and angles ``theta_j = 2 pi j / n_theta``.  The sample for ``(rho, theta)``
    is taken at column ``H/2 + rho cos(theta)`` and row ``H/2 + rho sin(theta)``;
    samples outside ``[0, H-1]^2`` are 0.  The DC pixel is zeroed first so it
    cannot leak into the innermost ring through interpolation.
    """
    if isinstance(p, PowerSpectrum):
        if not p.centered:
            raise ValueError("polar_resample needs a centred power spectrum")
        p = p.data
    p = _square(p, "power grid")
    h = p.shape[0]
    c = h // 2
    rho_max = float(h // 2 - 1)
    if rho_max < 1:
        raise ValueError("power grid too small for polar resampling (need H >= 4)")
    n_rho = cfg.n_rho or (h // 2 - 1)

    p = p.copy()
    p[c, c] = 0.0

    rho = np.arange(1, n_rho + 1) * (rho_max / n_rho)
    theta = np.arange(cfg.n_theta) * (2 * np.pi / cfg.n_theta)
    cols = h / 2 + rho[:, None] * np.cos(theta)[None, :]
    rows = h / 2 + rho[:, None] * np.sin(theta)[None, :]
    inside = (cols >= 0) & (cols <= h - 1) & (rows >= 0) & (rows <= h - 1)
    data = np.where(inside, bilinear(p, rows, cols), 0.0)
    return PolarEnergy(np.maximum(data, 0.0), rho_max=rho_max, theta_span=FULL_TURN)


def angular_energy(pe: PolarEnergy) -> np.ndarray:
    """Radially weighted angular energy folded onto ``[0, pi)``.

    ``h[j] = sum_i rho_i E[i, j]`` over the full turn, then bins ``j`` and
    ``j + n_theta/2`` are summed.
    """
    if pe.n_theta % 2:
        raise ValueError("angular_energy needs an even n_theta to fold")
    full = pe.rho @ pe.data
    half = pe.n_theta // 2
    return full[:half] + full[half:]


def estimate_angle(h, cfg: FaeConfig = FaeConfig(), total_energy: float = 0.0) -> AngleEstimate:
    """Pick the dominant angle from a folded histogram.

    Bin ``j`` of ``n`` folded bins stands for the angle ``j * pi / n`` (the
    angle it was sampled at).  Ties go to the smallest index.  When the
    histogram holds no more than ``energy_floor`` of the total spectral
    energy the estimate is flagged degenerate and the angle is 0.
    """
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 1 or h.size < 2:
        raise ValueError("histogram must be a 1D array with at least 2 bins")
    floor = cfg.energy_floor * max(float(total_energy), np.finfo(float).eps)
    if h.sum() <= floor:
        return AngleEstimate(0.0, h, True, float(total_energy))
    j = int(np.argmax(h))  # first maximum wins
    return AngleEstimate(j * np.pi / h.size, h, False, float(total_energy))


def fae(g, cfg: FaeConfig = FaeConfig()) -> AngleEstimate:
    """Estimate the dominant spectral orientation of a square, even-sized grid.

    The returned angle lies in ``[0, pi)`` and points along the direction of
    strongest spectral energy, which for an elongated object is perpendicular
    to its major axis.
    """
    g = _square(g)
    h = g.shape[0]
    if h < 4:
        raise ValueError(f"grid must be at least 4x4, got {g.shape}")
    if h % 2:
        raise ValueError(f"grid size must be even, got {h}")
    if cfg.window == "hann":
        g = g * hann_window(h)
    spec = centered_dft2(g)
    power = power_spectrum(spec)
    total = float(power.data.sum())
    hist = angular_energy(polar_resample(power, cfg))
    return estimate_angle(hist, cfg, total)


def wrap_half_turn(angle: float) -> float:
    """Reduce an orientation difference to ``[-pi/2, pi/2)``."""
    return float((angle + np.pi / 2) % np.pi - np.pi / 2)
