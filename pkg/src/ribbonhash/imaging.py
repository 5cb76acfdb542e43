"""Image containers, bilinear resizing, Gaussian smoothing, and YCbCr conversion.

Pixel values are kept as float64 in [0, 255] through the whole pipeline;
quantization to 8-bit happens only when an image is exported to disk.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import InvalidImageError, ParameterError

# Resized + smoothed images must be at least this large to be hashable.
MIN_HASHABLE_SIDE = 8


@dataclass(frozen=True)
class RgbImage:
    """Dense RGB raster, row-major (height, width, 3), channels in [0, 255]."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise InvalidImageError(f"expected (H, W, 3) raster, got shape {px.shape}")
        if not np.isfinite(px).all() or px.min() < 0.0 or px.max() > 255.0:
            raise InvalidImageError("channel values must be finite and within [0, 255]")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class LumaImage:
    """Single-channel raster, row-major (height, width), values in [0, 255]."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise InvalidImageError(f"expected (H, W) raster, got shape {px.shape}")
        if not np.isfinite(px).all() or px.min() < 0.0 or px.max() > 255.0:
            raise InvalidImageError("values must be finite and within [0, 255]")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class GaussianMask:
    """Normalized isotropic Gaussian convolution mask of odd side length."""

    size: int
    sigma: float
    weights: np.ndarray


def gaussian_mask(size: int, sigma: float) -> GaussianMask:
    """Build the unit-sum Gaussian mask with weights exp(-(u^2+v^2)/(2 sigma^2)).

    Coordinates (u, v) are measured from the mask center.
    """
    if size < 1 or size % 2 == 0:
        raise ParameterError(f"mask size must be a positive odd integer, got {size}")
    if not sigma > 0.0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    half = size // 2
    coords = np.arange(-half, half + 1, dtype=np.float64)
    uu, vv = np.meshgrid(coords, coords, indexing="ij")
    raw = np.exp(-(uu * uu + vv * vv) / (2.0 * sigma * sigma))
    return GaussianMask(size=size, sigma=float(sigma), weights=raw / raw.sum())


def resize_bilinear(img: RgbImage, side: int) -> RgbImage:
    """Resize to side x side with bilinear interpolation (pixel-center alignment)."""
    if side < 1:
        raise ParameterError(f"target side must be >= 1, got {side}")
    if img.width < 2 or img.height < 2:
        raise InvalidImageError("cannot interpolate an image narrower than 2 pixels")
    if img.width == side and img.height == side:
        return RgbImage(img.pixels.copy())
    src = img.pixels
    out = np.empty((side, side, 3), dtype=np.float64)
    for axis, length in ((0, img.height), (1, img.width)):
        # sample positions in source coordinates, clamped so the 4-point
        # neighborhood stays inside the raster
        pos = (np.arange(side, dtype=np.float64) + 0.5) * (length / side) - 0.5
        pos = np.clip(pos, 0.0, length - 1.0)
        lo = np.floor(pos).astype(np.intp)
        hi = np.minimum(lo + 1, length - 1)
        frac = pos - lo
        if axis == 0:
            rows = (lo, hi, frac)
        else:
            cols = (lo, hi, frac)
    r0, r1, fy = rows
    c0, c1, fx = cols
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    top = src[r0][:, c0] * (1.0 - fx) + src[r0][:, c1] * fx
    bot = src[r1][:, c0] * (1.0 - fx) + src[r1][:, c1] * fx
    out = top * (1.0 - fy) + bot * fy
    return RgbImage(np.clip(out, 0.0, 255.0))


def gaussian_filter(img: RgbImage, mask: GaussianMask) -> RgbImage:
    """Convolve each channel with the mask, replicating border pixels."""
    if mask.size > min(img.width, img.height):
        raise ParameterError("image must be at least as large as the mask")
    out = np.empty_like(img.pixels)
    for c in range(3):
        # mask is symmetric, so correlation equals convolution
        out[:, :, c] = ndimage.correlate(img.pixels[:, :, c], mask.weights, mode="nearest")
    return RgbImage(np.clip(out, 0.0, 255.0))


def filter_luma(lum: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Correlate a single float plane with replicate borders (no range clamp)."""
    return ndimage.correlate(np.asarray(lum, dtype=np.float64), weights, mode="nearest")


# BT.601 full-range RGB -> YCbCr transform rows (Y, Cb, Cr).
YCBCR_MATRIX = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.1687, -0.3313, 0.5],
        [0.5, -0.4187, -0.0813],
    ],
    dtype=np.float64,
)
YCBCR_OFFSET = np.array([0.0, 128.0, 128.0], dtype=np.float64)


def rgb_to_ycbcr(img: RgbImage) -> tuple[LumaImage, LumaImage, LumaImage]:
    """Split an RGB image into Y, Cb, Cr planes, each clamped to [0, 255]."""
    ycc = img.pixels @ YCBCR_MATRIX.T + YCBCR_OFFSET
    np.clip(ycc, 0.0, 255.0, out=ycc)
    return (
        LumaImage(ycc[:, :, 0]),
        LumaImage(ycc[:, :, 1]),
        LumaImage(ycc[:, :, 2]),
    )


def luminance(img: RgbImage) -> LumaImage:
    """Y plane only (cheaper than a full YCbCr split)."""
    y = img.pixels @ YCBCR_MATRIX[0]
    return LumaImage(np.clip(y, 0.0, 255.0))


def preprocess(img: RgbImage, side: int, mask_size: int = 3, sigma: float = 1.0) -> RgbImage:
    """Resize to side x side, then Gaussian-smooth: the working image for hashing."""
    if side < MIN_HASHABLE_SIDE:
        raise ParameterError(f"target side must be >= {MIN_HASHABLE_SIDE}, got {side}")
    if img.width < MIN_HASHABLE_SIDE or img.height < MIN_HASHABLE_SIDE:
        raise InvalidImageError(
            f"input must be at least {MIN_HASHABLE_SIDE}x{MIN_HASHABLE_SIDE}, "
            f"got {img.width}x{img.height}"
        )
    return gaussian_filter(resize_bilinear(img, side), gaussian_mask(mask_size, sigma))


def load_image(path: str | Path) -> RgbImage:
    """Decode a PNG/JPEG/BMP file into an RgbImage."""
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            return RgbImage(np.asarray(rgb, dtype=np.float64))
    except (OSError, ValueError) as exc:
        raise InvalidImageError(f"cannot read image {path}: {exc}") from exc


def to_uint8(img: RgbImage) -> np.ndarray:
    """Quantize to 8-bit for export."""
    return np.clip(np.rint(img.pixels), 0, 255).astype(np.uint8)


def save_png(img: RgbImage, path: str | Path) -> None:
    Image.fromarray(to_uint8(img), mode="RGB").save(path, format="PNG")
