import numpy as np
import pytest

from fourier_align.fusion import (AVERAGE_GROUPS, EXPLICIT_MATRIX, IDENTITY_TRUNCATE, FusionConfig,
                                  ProjectionSpec, faafusion, faafusion_trace, project_channels)
from fourier_align.geometry import PatchSpec
from fourier_align.spectral import fae
from fourier_align.synthbench import RectSpec, band_limited_image, make_rectangle

from oracles import channel_matmul_oracle

RNG = np.random.default_rng(11)


def circular_deg(a, b):
    d = (a - b) % 180
    return min(d, 180 - d)


# -- projections ---------------------------------------------------------------

def test_identity_truncate_full_is_identical():
    f = RNG.standard_normal((4, 5, 5))
    out = project_channels(f, ProjectionSpec(IDENTITY_TRUNCATE, 4))
    assert out.tobytes() == f.tobytes()


def test_identity_truncate_keeps_first_channels():
    f = RNG.standard_normal((4, 3, 3))
    np.testing.assert_array_equal(project_channels(f, ProjectionSpec(IDENTITY_TRUNCATE, 2)), f[:2])


def test_average_groups():
    f = np.stack([np.full((2, 2), v) for v in (1.0, 2.0, 3.0, 4.0)])
    out = project_channels(f, ProjectionSpec(AVERAGE_GROUPS, 2))
    assert np.all(out[0] == 1.5) and np.all(out[1] == 3.5)


def test_explicit_matrix_matches_loop_oracle():
    m = RNG.standard_normal((2, 3))
    f = RNG.standard_normal((3, 4, 4))
    out = project_channels(f, ProjectionSpec(EXPLICIT_MATRIX, matrix=m))
    assert np.abs(out - channel_matmul_oracle(m.tolist(), f)).max() < 1e-12


def test_projection_from_csv(tmp_path):
    (tmp_path / "m.csv").write_text("1,0,0\n0,0.5,0.5\n")
    p = ProjectionSpec.from_csv(tmp_path / "m.csv")
    assert p.out_channels == 2
    f = np.stack([np.full((1, 1), v) for v in (2.0, 4.0, 6.0)])
    np.testing.assert_array_equal(project_channels(f, p).ravel(), [2.0, 5.0])


@pytest.mark.parametrize("spec, channels", [
    (ProjectionSpec(IDENTITY_TRUNCATE, 5), 4),
    (ProjectionSpec(AVERAGE_GROUPS, 3), 4),
    (ProjectionSpec(EXPLICIT_MATRIX, matrix=np.ones((2, 3))), 4),
])
def test_projection_dimension_errors(spec, channels):
    with pytest.raises(ValueError):
        project_channels(np.zeros((channels, 2, 2)), spec)


def test_unknown_projection_kind():
    with pytest.raises(ValueError):
        ProjectionSpec("conv3x3")


# -- fusion contracts ----------------------------------------------------------

def test_zero_high_returns_low_exactly():
    low = RNG.standard_normal((3, 32, 32))
    out = faafusion(low, np.zeros((3, 16, 16)))
    assert np.array_equal(out, low)


def test_shape_contract():
    out = faafusion(RNG.standard_normal((2, 16, 24)), RNG.standard_normal((2, 8, 12)))
    assert out.shape == (2, 16, 24)


@pytest.mark.parametrize("low_shape, high_shape", [
    ((2, 16, 16), (3, 8, 8)),
    ((2, 16, 16), (2, 16, 16)),
    ((1, 20, 20), (1, 10, 10)),  # high side not even
])
def test_shape_errors(low_shape, high_shape):
    with pytest.raises(ValueError):
        faafusion(np.zeros(low_shape), np.zeros(high_shape))


def test_constant_high_adds_twice_the_constant():
    low = RNG.standard_normal((2, 32, 32))
    c = 0.75
    out = faafusion(low, np.full((2, 16, 16), c))
    # constant patches are degenerate, so nothing rotates; only rounding remains
    assert np.abs(out - (low + 2 * c)).max() < 1e-12


def test_constant_offset_in_low_passes_straight_through():
    low = np.stack([band_limited_image(32, seed=s) for s in (1, 2)])
    high = np.stack([band_limited_image(16, seed=s, band=(0.05, 0.2)) for s in (3, 4)])
    d = 2.5
    a = faafusion_trace(low, high)
    b = faafusion_trace(low + d, high)
    assert np.array_equal(a.theta_low, b.theta_low, equal_nan=True)
    assert np.array_equal(a.rotation, b.rotation)
    assert np.array_equal(a.recon, b.recon)
    assert np.array_equal(b.output, (low + d) + (a.upsampled + a.recon))
    assert np.abs((b.output - a.output) - d).max() < 1e-12


def test_fusion_is_deterministic():
    low = RNG.standard_normal((2, 32, 32))
    high = RNG.standard_normal((2, 16, 16))
    assert faafusion(low, high).tobytes() == faafusion(low, high).tobytes()


def test_fusion_does_not_mutate_inputs():
    low = RNG.standard_normal((1, 16, 16))
    high = RNG.standard_normal((1, 8, 8))
    keep = low.copy(), high.copy()
    faafusion(low, high)
    assert np.array_equal(low, keep[0]) and np.array_equal(high, keep[1])


def test_degenerate_patches_are_not_rotated():
    low = np.zeros((1, 32, 32))
    low[0, :16, :16] = make_rectangle(RectSpec(16, 5, 2, 0.4))
    high = RNG.standard_normal((1, 16, 16))
    tr = faafusion_trace(low, high, FusionConfig(patch=PatchSpec(16)))
    assert np.isnan(tr.theta_low[1:]).all()
    assert tr.rotation[0] != 0 and np.all(tr.rotation[1:] == 0)


def test_reduced_channels_with_explicit_output_projection():
    low = RNG.standard_normal((4, 16, 16))
    high = RNG.standard_normal((4, 8, 8))
    cfg = FusionConfig(c_mid=2, proj_out=ProjectionSpec(EXPLICIT_MATRIX, matrix=np.ones((4, 2))))
    assert faafusion(low, high, cfg).shape == (4, 16, 16)
    with pytest.raises(ValueError, match="output projection"):
        faafusion(low, high, FusionConfig(c_mid=2))


def test_dense_mode_runs():
    low = np.stack([band_limited_image(16, seed=5)])
    high = np.stack([band_limited_image(8, seed=6, band=(0.05, 0.2))])
    tr = faafusion_trace(low, high, FusionConfig(patch=PatchSpec.dense(4)))
    assert tr.positions.shape == (16 * 16, 2)
    assert tr.output.shape == low.shape


def test_config_rejects_odd_or_small_kernel():
    with pytest.raises(ValueError):
        FusionConfig(patch=PatchSpec(kernel=5))
    with pytest.raises(ValueError):
        FusionConfig(patch=PatchSpec(kernel=2))


# -- cross-scale orientation consistency --------------------------------------

def rectangle_pair(phi_low, phi_high):
    """Low: 64-px rectangle in the centre tile of a 3x3 grid of 128-px tiles.

    High: the same rectangle at half size, centred in the half-size map.
    """
    low = np.zeros((1, 384, 384))
    low[0, 128:256, 128:256] = make_rectangle(RectSpec(128, 40, 12, np.radians(phi_low)))
    high = np.zeros((1, 192, 192))
    high[0, 64:128, 64:128] = make_rectangle(RectSpec(64, 20, 6, np.radians(phi_high)))
    return low, high


@pytest.mark.parametrize("phi_low, phi_high", [(20, 70), (0, 45), (100, 10), (135, 60), (80, 5)])
def test_high_patch_is_aligned_to_low_orientation(phi_low, phi_high):
    low, high = rectangle_pair(phi_low, phi_high)
    tr = faafusion_trace(low, high, FusionConfig(patch=PatchSpec(128)))
    centre = (0, slice(128, 256), slice(128, 256))
    theta_low = fae(low[centre]).theta_hat_deg
    assert circular_deg(theta_low, phi_low + 90) <= 1
    assert circular_deg(fae(tr.recon[centre]).theta_hat_deg, theta_low) <= 3
    assert circular_deg(fae(tr.upsampled[centre]).theta_hat_deg, phi_high + 90) <= 3
