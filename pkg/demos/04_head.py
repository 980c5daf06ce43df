"""
A rotation-aware RoI head
=========================

Every RoI is rotated to a canonical pose and added back to itself before
the two fully connected layers.  Canonical features vary less with pose.
"""

import itertools

import numpy as np

from fourier_align import HeadConfig, LinearWeights, RectSpec, canonical_features, head_forward, make_rectangle


def roi(deg):
    phi = np.radians(deg)
    return np.stack([make_rectangle(RectSpec(32, 10, 3, phi)),
                     0.5 * make_rectangle(RectSpec(32, 6, 2, phi))])


def ncc(a, b):
    a, b = a.ravel() - a.mean(), b.ravel() - b.mean()
    return a @ b / np.sqrt((a @ a) * (b @ b))


def pose_agreement(maps):
    # compare modulo the half-turn ambiguity
    return np.mean([max(ncc(x, y), ncc(x, y[..., ::-1, ::-1]))
                    for x, y in itertools.combinations(maps, 2)])


rois = [roi(d) for d in range(0, 180, 30)]
print("raw RoI agreement      :", round(pose_agreement(rois), 3))
print("canonical agreement    :", round(pose_agreement([canonical_features(r)[0] for r in rois]), 3))

# small random weights stand in for a trained head
weights = LinearWeights.random(in_dim=2 * 32 * 32, d1=64, d2=32, num_classes=15, seed=0)
cfg = HeadConfig(fc_dims=(64, 32), num_classes=15, weights=weights)
scores, deltas = head_forward(rois[1], cfg)
print("scores", scores.shape, "box deltas", deltas.reshape(15, 5).shape)
