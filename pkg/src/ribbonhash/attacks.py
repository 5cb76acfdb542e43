"""Native implementations of the eight content-preserving manipulations.

These generate the similar-image pairs for robustness evaluation.  Everything
is seeded and deterministic; right-angle rotations are exact pixel
permutations, all other resampling is bilinear with white fill.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import InvalidImageError, ParameterError
from .imaging import RgbImage, gaussian_mask, to_uint8

ROTATION_FILL = 255.0
LARGE_ROTATION_CROP = 361

SCALING_RATIOS = tuple(round(0.80 + 0.05 * i, 2) for i in range(10))
NOISE_DENSITIES = tuple(round(0.001 * i, 3) for i in range(1, 11))
JPEG_QUALITIES = tuple(range(55, 101, 5))
GAUSSIAN_SIGMAS = tuple(round(0.1 * i, 1) for i in range(1, 11))
BLUR_RADII = tuple(round(0.2 + 0.1 * i, 1) for i in range(10))
MOTION_LENGTHS = tuple(range(1, 11))
ROTATE_CROP_ANGLES = (1.0, -1.0, 0.75, -0.75, 0.5, -0.5, 0.25, -0.25)
LARGE_ROTATE_ANGLES = (90, -90, 45, -45, 30, -30, 15, -15, 10, -10, 5, -5, 3, -3)

_PARAM_RANGES = {
    "scaling": (0.8, 1.25),
    "salt_pepper": (0.001, 0.01),
    "jpeg": (55, 100),
    "gaussian_filter": (0.1, 1.0),
    "circular_blur": (0.2, 1.1),
    "motion_blur": (1, 10),
    "rotate_crop": (-1.0, 1.0),
    "large_rotate": (-90.0, 90.0),
}

MANIPULATION_KINDS = tuple(_PARAM_RANGES)


@dataclass(frozen=True)
class ManipulationSpec:
    """One manipulation: its kind, the Table-style parameter, and a noise seed."""

    kind: str
    parameter: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _PARAM_RANGES:
            raise ParameterError(f"unknown manipulation kind {self.kind!r}")
        lo, hi = _PARAM_RANGES[self.kind]
        if not lo <= self.parameter <= hi:
            raise ParameterError(
                f"{self.kind} parameter {self.parameter} outside [{lo}, {hi}]"
            )

    def label(self) -> str:
        return f"{self.kind}__{self.parameter:g}"


def _convolve_rgb(pixels: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    out = np.empty_like(pixels)
    for c in range(3):
        out[:, :, c] = ndimage.correlate(pixels[:, :, c], kernel, mode="nearest")
    return np.clip(out, 0.0, 255.0)


def _resize_ratio(img: RgbImage, ratio: float) -> RgbImage:
    if ratio == 1.0:
        return RgbImage(img.pixels.copy())
    h = max(2, int(round(img.height * ratio)))
    w = max(2, int(round(img.width * ratio)))
    # reuse the pipeline's pixel-center bilinear kernel for both axes
    src = img.pixels
    out_axes = []
    for length, target in ((img.height, h), (img.width, w)):
        pos = (np.arange(target, dtype=np.float64) + 0.5) * (length / target) - 0.5
        pos = np.clip(pos, 0.0, length - 1.0)
        lo = np.floor(pos).astype(np.intp)
        hi = np.minimum(lo + 1, length - 1)
        out_axes.append((lo, hi, pos - lo))
    (r0, r1, fy), (c0, c1, fx) = out_axes
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    top = src[r0][:, c0] * (1.0 - fx) + src[r0][:, c1] * fx
    bot = src[r1][:, c0] * (1.0 - fx) + src[r1][:, c1] * fx
    return RgbImage(np.clip(top * (1.0 - fy) + bot * fy, 0.0, 255.0))


def _salt_pepper(img: RgbImage, density: float, seed: int) -> RgbImage:
    rng = np.random.Generator(np.random.PCG64(seed))
    hit = rng.random((img.height, img.width)) < density
    white = rng.random((img.height, img.width)) < 0.5
    out = img.pixels.copy()
    out[hit & white] = 255.0
    out[hit & ~white] = 0.0
    return RgbImage(out)


def _jpeg_roundtrip(img: RgbImage, quality: int) -> RgbImage:
    buf = io.BytesIO()
    Image.fromarray(to_uint8(img), mode="RGB").save(buf, format="JPEG", quality=quality)
    buf.seek(0)
    with Image.open(buf) as decoded:
        return RgbImage(np.asarray(decoded.convert("RGB"), dtype=np.float64))


def disk_kernel(radius: float, subsamples: int = 16) -> np.ndarray:
    """Pillbox kernel: per-pixel coverage of a disk, estimated by supersampling."""
    if radius <= 0.0:
        raise ParameterError("disk radius must be positive")
    half = int(math.ceil(radius))
    side = 2 * half + 1
    offs = (np.arange(subsamples) + 0.5) / subsamples - 0.5
    centers = np.arange(side, dtype=np.float64) - half
    # distance^2 of every subsample point of every kernel cell
    yy = np.repeat(centers, subsamples) + np.tile(offs, side)
    d2 = yy[:, None] ** 2 + yy[None, :] ** 2
    inside = (d2 <= radius * radius).astype(np.float64)
    kernel = inside.reshape(side, subsamples, side, subsamples).sum(axis=(1, 3))
    total = kernel.sum()
    if total == 0.0:
        raise ParameterError(f"disk radius {radius} covers no subsamples")
    return kernel / total


def motion_kernel(length: int) -> np.ndarray:
    if length < 1:
        raise ParameterError("motion length must be >= 1")
    return np.full((1, length), 1.0 / length)


def rotate_image(img: RgbImage, angle_deg: float, *, expand: bool) -> RgbImage:
    """Rotate counterclockwise about the image center, white fill.

    Multiples of 90 degrees are exact pixel permutations; other angles use
    bilinear resampling.  With expand=True the canvas grows to hold the whole
    rotated frame, otherwise the original frame is kept (corners get fill).
    """
    angle = float(angle_deg) % 360.0
    if angle == 0.0:
        return RgbImage(img.pixels.copy())
    if angle % 90.0 == 0.0:
        k = int(angle // 90) % 4
        if expand or img.width == img.height or k % 2 == 0:
            return RgbImage(np.rot90(img.pixels, k).copy())

    rad = math.radians(angle_deg)
    cos, sin = math.cos(rad), math.sin(rad)
    h, w = img.height, img.width
    if expand:
        out_w = int(math.ceil(abs(w * cos) + abs(h * sin)))
        out_h = int(math.ceil(abs(h * cos) + abs(w * sin)))
    else:
        out_w, out_h = w, h
    # inverse map output pixel centers back into source coordinates
    oy = np.arange(out_h, dtype=np.float64) - (out_h - 1) / 2.0
    ox = np.arange(out_w, dtype=np.float64) - (out_w - 1) / 2.0
    gy = oy[:, None]
    gx = ox[None, :]
    # screen y grows downward, so a CCW rotation in image terms uses the
    # clockwise matrix in array indices
    src_x = cos * gx - sin * gy + (w - 1) / 2.0
    src_y = sin * gx + cos * gy + (h - 1) / 2.0

    padded = np.pad(
        img.pixels, ((1, 1), (1, 1), (0, 0)), mode="constant", constant_values=ROTATION_FILL
    )
    px = np.clip(src_x + 1.0, 0.0, w + 1.0)
    py = np.clip(src_y + 1.0, 0.0, h + 1.0)
    x0 = np.floor(px).astype(np.intp)
    y0 = np.floor(py).astype(np.intp)
    x1 = np.minimum(x0 + 1, w + 1)
    y1 = np.minimum(y0 + 1, h + 1)
    fx = (px - x0)[:, :, None]
    fy = (py - y0)[:, :, None]
    top = padded[y0, x0] * (1.0 - fx) + padded[y0, x1] * fx
    bot = padded[y1, x0] * (1.0 - fx) + padded[y1, x1] * fx
    out = top * (1.0 - fy) + bot * fy
    outside = (src_x < -1.0) | (src_x > w) | (src_y < -1.0) | (src_y > h)
    out[outside] = ROTATION_FILL
    return RgbImage(np.clip(out, 0.0, 255.0))


def apply_manipulation(img: RgbImage, spec: ManipulationSpec) -> RgbImage:
    if spec.kind == "scaling":
        return _resize_ratio(img, spec.parameter)
    if spec.kind == "salt_pepper":
        return _salt_pepper(img, spec.parameter, spec.seed)
    if spec.kind == "jpeg":
        return _jpeg_roundtrip(img, int(spec.parameter))
    if spec.kind == "gaussian_filter":
        mask = gaussian_mask(3, spec.parameter)
        return RgbImage(_convolve_rgb(img.pixels, mask.weights))
    if spec.kind == "circular_blur":
        return RgbImage(_convolve_rgb(img.pixels, disk_kernel(spec.parameter)))
    if spec.kind == "motion_blur":
        return RgbImage(_convolve_rgb(img.pixels, motion_kernel(int(spec.parameter))))
    if spec.kind == "rotate_crop":
        return rotate_image(img, spec.parameter, expand=False)
    if spec.kind == "large_rotate":
        return rotate_image(img, spec.parameter, expand=True)
    raise ParameterError(f"unknown manipulation kind {spec.kind!r}")


def central_crop_for_large_rotation(img: RgbImage, side: int = LARGE_ROTATION_CROP) -> RgbImage:
    """Centered side x side crop used for both members of a large-rotation pair."""
    if img.height < side or img.width < side:
        raise InvalidImageError(
            f"image {img.width}x{img.height} too small for a {side}x{side} central crop"
        )
    r0 = (img.height - side) // 2
    c0 = (img.width - side) // 2
    return RgbImage(img.pixels[r0 : r0 + side, c0 : c0 + side].copy())


def attack_specs(base_seed: int = 0) -> list[ManipulationSpec]:
    """The 82 manipulations of the standard robustness matrix."""
    specs = []
    for ratio in SCALING_RATIOS:
        specs.append(ManipulationSpec("scaling", ratio))
    for i, density in enumerate(NOISE_DENSITIES):
        specs.append(ManipulationSpec("salt_pepper", density, seed=base_seed * 1000 + i))
    for quality in JPEG_QUALITIES:
        specs.append(ManipulationSpec("jpeg", quality))
    for sd in GAUSSIAN_SIGMAS:
        specs.append(ManipulationSpec("gaussian_filter", sd))
    for radius in BLUR_RADII:
        specs.append(ManipulationSpec("circular_blur", radius))
    for length in MOTION_LENGTHS:
        specs.append(ManipulationSpec("motion_blur", length))
    for angle in ROTATE_CROP_ANGLES:
        specs.append(ManipulationSpec("rotate_crop", angle))
    for angle in LARGE_ROTATE_ANGLES:
        specs.append(ManipulationSpec("large_rotate", angle))
    return specs


def full_attack_matrix(img: RgbImage, base_seed: int = 0):
    """Yield (spec, manipulated image) for all 82 standard manipulations."""
    for spec in attack_specs(base_seed):
        yield spec, apply_manipulation(img, spec)
