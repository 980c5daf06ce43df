"""Slow, direct reference implementations used only by the tests.

Each one is written from the defining formula with explicit loops and shares
no code with the package.
"""

import cmath
import math

import numpy as np


def naive_dft2(g):
    """F[v, u] = sum_{y, x} g[y, x] exp(-2 pi i (u x + v y) / H), O(H^4)."""
    h = len(g)
    out = np.zeros((h, h), dtype=complex)
    for v in range(h):
        for u in range(h):
            acc = 0j
            for y in range(h):
                for x in range(h):
                    acc += g[y][x] * cmath.exp(-2j * math.pi * (u * x + v * y) / h)
            out[v, u] = acc
    return out


def bilinear_at(g, row, col):
    """Bilinear sample at one point; neighbours outside the grid read as 0."""
    h, w = len(g), len(g[0])
    r0, c0 = math.floor(row), math.floor(col)
    fr, fc = row - r0, col - c0

    def px(r, c):
        return g[r][c] if 0 <= r < h and 0 <= c < w else 0.0

    return ((1 - fr) * (1 - fc) * px(r0, c0) + (1 - fr) * fc * px(r0, c0 + 1)
            + fr * (1 - fc) * px(r0 + 1, c0) + fr * fc * px(r0 + 1, c0 + 1))


def polar_sample_oracle(p, n_rho, n_theta):
    """Polar samples of a centred power grid, DC zeroed, one point at a time."""
    h = len(p)
    q = [list(map(float, row)) for row in p]
    q[h // 2][h // 2] = 0.0
    rho_max = h // 2 - 1
    out = np.zeros((n_rho, n_theta))
    for i in range(n_rho):
        rho = (i + 1) * rho_max / n_rho
        for j in range(n_theta):
            theta = 2 * math.pi * j / n_theta
            col = h / 2 + rho * math.cos(theta)
            row = h / 2 + rho * math.sin(theta)
            if 0 <= col <= h - 1 and 0 <= row <= h - 1:
                out[i, j] = bilinear_at(q, row, col)
    return out


def rotate_oracle(g, angle):
    """Inverse-mapped bilinear rotation about ((H-1)/2, (W-1)/2), pixel by pixel."""
    h, w = len(g), len(g[0])
    cy, cx = (h - 1) / 2, (w - 1) / 2
    c, s = math.cos(angle), math.sin(angle)
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            dx, dy = x - cx, y - cy
            out[y, x] = bilinear_at(g, -s * dx + c * dy + cy, c * dx + s * dy + cx)
    return out


def upsample_oracle(f):
    """2x bilinear upsampling, half-pixel centres, edge clamped; per pixel."""
    c, h, w = f.shape
    out = np.zeros((c, 2 * h, 2 * w))
    for ch in range(c):
        for y in range(2 * h):
            for x in range(2 * w):
                sy = min(max((y + 0.5) / 2 - 0.5, 0.0), h - 1)
                sx = min(max((x + 0.5) / 2 - 0.5, 0.0), w - 1)
                y0, x0 = int(math.floor(sy)), int(math.floor(sx))
                y1, x1 = min(y0 + 1, h - 1), min(x0 + 1, w - 1)
                ty, tx = sy - y0, sx - x0
                out[ch, y, x] = ((1 - ty) * ((1 - tx) * f[ch, y0, x0] + tx * f[ch, y0, x1])
                                 + ty * ((1 - tx) * f[ch, y1, x0] + tx * f[ch, y1, x1]))
    return out


def channel_matmul_oracle(m, f):
    c_out = len(m)
    _, h, w = f.shape
    out = np.zeros((c_out, h, w))
    for o in range(c_out):
        for y in range(h):
            for x in range(w):
                out[o, y, x] = sum(m[o][c] * f[c, y, x] for c in range(f.shape[0]))
    return out


def affine_chain_oracle(x, w):
    """Two shared affine layers with ReLU between, then the two branches."""

    def affine(mat, bias, vec):
        return [sum(mat[i][j] * vec[j] for j in range(len(vec))) + bias[i]
                for i in range(len(mat))]

    hidden = [max(v, 0.0) for v in affine(w.w1, w.b1, x)]
    z = affine(w.w2, w.b2, hidden)
    return np.array(affine(w.w_cls, w.b_cls, z)), np.array(affine(w.w_reg, w.b_reg, z))


def rectangle_pixel_count(H, a, b):
    """Lattice points with |x - H/2| <= a and |y - H/2| <= b."""
    return sum(1 for y in range(H) for x in range(H)
               if abs(x - H / 2) <= a and abs(y - H / 2) <= b)


def ncc(a, b, mask=None):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if mask is not None:
        a, b = a[..., mask], b[..., mask]
    a = a.ravel() - a.mean()
    b = b.ravel() - b.mean()
    return float(a @ b / math.sqrt((a @ a) * (b @ b)))


def half_turn_ncc(a, b, mask=None):
    """NCC modulo the 180 degree pose ambiguity."""
    return max(ncc(a, b, mask), ncc(a, np.asarray(b)[..., ::-1, ::-1], mask))


def central_disk(h, margin=2):
    ys, xs = np.mgrid[0:h, 0:h] - (h - 1) / 2
    return np.hypot(xs, ys) < h / 2 - margin
