"""Fourier angle estimation and alignment for 2D feature grids."""

from .fusion import FusionConfig, ProjectionSpec, faafusion, faafusion_trace, project_channels
from .geometry import PatchSet, PatchSpec, faa_align, fold, rotate, unfold, upsample2x
from .grid import (grid_from_csv, grid_from_pgm, grid_to_csv, grid_to_pgm, read_grid)
from .head import HeadConfig, LinearWeights, canonical_features, faa_head_features, head_forward
from .spectral import (AngleEstimate, FaeConfig, PolarEnergy, Spectrum, angular_energy,
                       center_spectrum, dft2, estimate_angle, fae, polar_resample,
                       power_spectrum)
from .synthbench import (BenchReport, RectSpec, band_limited_image, bench_angle_sweep,
                         bench_equivariance, make_rectangle)

__version__ = "0.1.0"

__all__ = [
    "AngleEstimate", "BenchReport", "FaeConfig", "FusionConfig", "HeadConfig", "LinearWeights",
    "PatchSet", "PatchSpec", "PolarEnergy", "ProjectionSpec", "RectSpec", "Spectrum",
    "angular_energy", "band_limited_image", "bench_angle_sweep", "bench_equivariance",
    "canonical_features", "center_spectrum", "dft2", "estimate_angle",
    "faa_align", "faa_head_features", "faafusion", "faafusion_trace", "fae", "fold",
    "grid_from_csv", "grid_from_pgm", "grid_to_csv", "grid_to_pgm", "head_forward",
    "make_rectangle", "polar_resample", "power_spectrum", "project_channels", "read_grid", "rotate",
    "unfold", "upsample2x",
]
