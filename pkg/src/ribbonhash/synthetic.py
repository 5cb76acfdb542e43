"""Deterministic sample images for tests and demos.

Each image mixes a smooth color gradient, two octaves of blurred noise, and a
handful of solid shapes, so it carries enough texture, corners, and color
variation to exercise every feature extractor while staying smooth enough to
survive content-preserving attacks.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .imaging import RgbImage


def desk_image(index: int, side: int = 512, seed: int = 20260809) -> RgbImage:
    """One reproducible test image; (index, side, seed) fully determine it."""
    rng = np.random.Generator(np.random.PCG64([seed, index, side]))
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64) / side

    def pick_color():
        # natural scenes carry big near-white and near-black regions (sky,
        # shadow, paper); those are what modulate per-ribbon split counts
        roll = rng.random()
        if roll < 0.22:
            return rng.uniform(228.0, 255.0) - rng.uniform(0.0, 12.0, size=3)
        if roll < 0.36:
            return rng.uniform(0.0, 25.0) + rng.uniform(0.0, 14.0, size=3)
        return rng.uniform(20.0, 235.0, size=3)

    c_lo, c_hi, c_tint = pick_color(), pick_color(), pick_color()
    ang = rng.uniform(0.0, 2.0 * np.pi)
    ramp = np.cos(ang) * xx + np.sin(ang) * yy
    ramp = (ramp - ramp.min()) / max(np.ptp(ramp), 1e-9)
    img = c_lo + ramp[:, :, None] * (c_hi - c_lo)

    cx, cy = rng.uniform(0.2, 0.8, size=2)
    radial = np.clip(1.0 - 2.0 * np.hypot(xx - cx, yy - cy), 0.0, 1.0)
    img += radial[:, :, None] * (c_tint - img) * rng.uniform(0.3, 0.7)

    # per-image busyness: some images are flat, others heavily textured, so a
    # corpus spans a wide range of per-ribbon split counts
    busy = rng.uniform(0.15, 1.0)

    for sigma_frac in (rng.uniform(1 / 20, 1 / 10), rng.uniform(1 / 90, 1 / 36)):
        amp = busy * rng.uniform(15.0, 55.0)
        noise = rng.standard_normal((side, side, 3))
        noise = ndimage.gaussian_filter(noise, sigma=(side * sigma_frac, side * sigma_frac, 0))
        peak = np.abs(noise).max()
        if peak > 0:
            img += noise * (amp / peak)

    for _ in range(int(rng.integers(10, 20 + int(70 * busy)))):
        color = pick_color()
        alpha = rng.uniform(0.6, 1.0)
        cx, cy = rng.uniform(0.05, 0.95, size=2) * side
        half_w = rng.uniform(0.008, 0.10) * side
        half_h = rng.uniform(0.008, 0.10) * side
        if rng.random() < 0.55:
            r0, r1 = int(max(cy - half_h, 0)), int(min(cy + half_h, side))
            c0, c1 = int(max(cx - half_w, 0)), int(min(cx + half_w, side))
            region = img[r0:r1, c0:c1]
            region += alpha * (color - region)
        else:
            dy = (np.arange(side) - cy)[:, None] / max(half_h, 1.0)
            dx = (np.arange(side) - cx)[None, :] / max(half_w, 1.0)
            inside = dy * dy + dx * dx <= 1.0
            img[inside] += alpha * (color - img[inside])

    # checkered patches: dense fine texture that drives quadtree splits and
    # keeps corner detectors busy
    for _ in range(int(rng.integers(2, 4 + int(8 * busy)))):
        ca, cb = pick_color(), pick_color()
        cell = max(2, int(rng.integers(8, 26)) * side // 512)
        ph, pw = (rng.uniform(0.08, 0.26, size=2) * side).astype(int)
        r0 = int(rng.uniform(0.0, side - ph))
        c0 = int(rng.uniform(0.0, side - pw))
        ry = (np.arange(r0, r0 + ph) // cell)[:, None]
        cxs = (np.arange(c0, c0 + pw) // cell)[None, :]
        checker = ((ry + cxs) % 2).astype(np.float64)[:, :, None]
        patch = img[r0 : r0 + ph, c0 : c0 + pw]
        patch += rng.uniform(0.5, 0.9) * (ca + checker * (cb - ca) - patch)

    img = ndimage.gaussian_filter(img, sigma=(0.6, 0.6, 0))
    return RgbImage(np.clip(img, 0.0, 255.0))


def desk_corpus(count: int, side: int = 512, seed: int = 20260809) -> list[RgbImage]:
    """A list of distinct reproducible test images."""
    return [desk_image(i, side=side, seed=seed) for i in range(count)]
