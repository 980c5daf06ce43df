"""
Fusing two pyramid levels
=========================

The coarse map is upsampled 2x and cut into patches.  Each patch is rotated
so its orientation agrees with the matching patch of the fine map, then the
patches are folded back and added as a residual.
"""

import numpy as np

from fourier_align import FusionConfig, PatchSpec, RectSpec, faafusion_trace, fae, make_rectangle

# fine level: a rectangle at 20 degrees in the middle tile of a 3x3 layout
low = np.zeros((1, 384, 384))
low[0, 128:256, 128:256] = make_rectangle(RectSpec(128, 40, 12, np.radians(20)))

# coarse level: the same object at half size but posed at 70 degrees
high = np.zeros((1, 192, 192))
high[0, 64:128, 64:128] = make_rectangle(RectSpec(64, 20, 6, np.radians(70)))

trace = faafusion_trace(low, high, FusionConfig(patch=PatchSpec(128)))
centre = (0, slice(128, 256), slice(128, 256))
print("fine orientation     :", fae(low[centre]).theta_hat_deg)
print("upsampled coarse     :", fae(trace.upsampled[centre]).theta_hat_deg)
print("rotated coarse patch :", fae(trace.recon[centre]).theta_hat_deg)
print("patch rotations (deg):", np.round(np.degrees(trace.rotation), 1))

# an empty coarse level leaves the fine level untouched
print("zero high is identity:", np.array_equal(faafusion_trace(low, 0 * high).output, low))
