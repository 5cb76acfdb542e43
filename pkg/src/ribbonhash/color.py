"""Color features: corner-point color vector angles and global color moments.

The local color feature of a ribbon is the variance of the color-vector-angle
sines between the image's mean color and the strongest Harris corners sitting
on the ribbon's outer boundary band.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ParameterError
from .imaging import LumaImage, RgbImage
from .rings import RibbonMap

# Harris detector settings (standard values).
HARRIS_KAPPA = 0.04
HARRIS_SIGMA = 1.0
HARRIS_NMS_RADIUS = 3
HARRIS_RESPONSE_FLOOR = 1e-6

# Width of the outer-boundary band (r_k - width, r_k] used to pick corners.
BOUNDARY_BAND_WIDTH = 2.0


@dataclass(frozen=True)
class CornerPoint:
    """A selected Harris corner: raster position, response, owning ribbon."""

    row: int
    col: int
    response: float
    ribbon: int


@dataclass(frozen=True)
class ReferenceColor:
    """Per-channel mean color of the secondary image."""

    r: float
    g: float
    b: float

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=np.float64)


def harris_corners(lum: LumaImage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Detect Harris corners on a luminance plane.

    Returns (rows, cols, responses) of all local maxima of the corner response
    R = det(M) - kappa * trace(M)^2 above a relative floor, where M is the
    Gaussian-weighted structure tensor.  May be empty (e.g. constant images).
    """
    plane = lum.pixels
    gy = ndimage.sobel(plane, axis=0, mode="nearest")
    gx = ndimage.sobel(plane, axis=1, mode="nearest")
    sxx = ndimage.gaussian_filter(gx * gx, HARRIS_SIGMA, mode="nearest")
    syy = ndimage.gaussian_filter(gy * gy, HARRIS_SIGMA, mode="nearest")
    sxy = ndimage.gaussian_filter(gx * gy, HARRIS_SIGMA, mode="nearest")
    resp = sxx * syy - sxy * sxy - HARRIS_KAPPA * (sxx + syy) ** 2
    peak = float(resp.max(initial=0.0))
    if peak <= 0.0:
        empty = np.empty(0, dtype=np.intp)
        return empty, empty, np.empty(0, dtype=np.float64)
    window = 2 * HARRIS_NMS_RADIUS + 1
    local_max = resp == ndimage.maximum_filter(resp, size=window, mode="nearest")
    keep = local_max & (resp >= HARRIS_RESPONSE_FLOOR * peak)
    rows, cols = np.nonzero(keep)
    return rows, cols, resp[rows, cols]


def _tie_break(key: int, row: int, col: int) -> int:
    """Stable keyed order among equal-response corners."""
    payload = struct.pack("<qqq", key, row, col)
    return int.from_bytes(hashlib.blake2s(payload, digest_size=8).digest(), "big")


def select_boundary_corners(
    corners: tuple[np.ndarray, np.ndarray, np.ndarray],
    ribbons: RibbonMap,
    tau: float,
    key: int = 0,
) -> list[list[CornerPoint]]:
    """Keep the strongest fraction tau of corners on each ribbon's outer band.

    A corner belongs to ribbon k's band when its center distance d satisfies
    r_k - 2 < d <= r_k.  Of the z_b corners in a band, the ceil(z_b * tau)
    largest responses are retained (so at least one survives whenever the band
    is non-empty); equal responses are ordered by a key-dependent tie-break.
    """
    if not 0.0 < tau <= 1.0:
        raise ParameterError(f"tau must lie in (0, 1], got {tau}")
    rows, cols, resp = corners
    dist = ribbons.dist[rows, cols] if len(rows) else np.empty(0)
    selected: list[list[CornerPoint]] = []
    for k in range(1, ribbons.n_ribbons + 1):
        r_k = ribbons.radii[k - 1]
        in_band = (dist > r_k - BOUNDARY_BAND_WIDTH) & (dist <= r_k)
        idx = np.nonzero(in_band)[0]
        if len(idx) == 0:
            selected.append([])
            continue
        order = sorted(
            idx,
            key=lambda i: (-resp[i], _tie_break(key, int(rows[i]), int(cols[i]))),
        )
        keep = math.ceil(len(idx) * tau)
        selected.append(
            [
                CornerPoint(row=int(rows[i]), col=int(cols[i]), response=float(resp[i]), ribbon=k)
                for i in order[:keep]
            ]
        )
    return selected


def cva_sin(f1, f2) -> float:
    """Sine of the color vector angle between two RGB triples, in [0, 1].

    Computed as |f1 x f2| / (|f1| |f2|), which equals
    sqrt(1 - (f1.f2)^2 / ((f1.f1)(f2.f2))) but stays accurate for
    near-parallel vectors.  An all-zero vector has angle 0 by convention.
    """
    a = np.asarray(f1, dtype=np.float64)
    b = np.asarray(f2, dtype=np.float64)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    cross = np.linalg.norm(np.cross(a, b))
    return float(min(cross / (na * nb), 1.0))


def cva_sin_many(points: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Vectorized cva_sin of each row of points against one reference color."""
    pts = np.asarray(points, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    cross = np.linalg.norm(np.cross(pts, ref[None, :]), axis=1)
    norms = np.linalg.norm(pts, axis=1) * np.linalg.norm(ref)
    out = np.zeros(len(pts), dtype=np.float64)
    ok = norms > 0.0
    out[ok] = np.minimum(cross[ok] / norms[ok], 1.0)
    return out


def color_vector_distance(f1, f2) -> float:
    """Plain Euclidean distance between two colors.

    Not used by the pipeline: unlike the vector angle it is not invariant to
    intensity scaling, which is exactly why the angle replaces it.
    """
    a = np.asarray(f1, dtype=np.float64)
    b = np.asarray(f2, dtype=np.float64)
    return float(np.linalg.norm(a - b))


def reference_color(secondary: RgbImage) -> ReferenceColor:
    means = secondary.pixels.reshape(-1, 3).mean(axis=0)
    return ReferenceColor(r=float(means[0]), g=float(means[1]), b=float(means[2]))


def local_color_vector(
    secondary: RgbImage,
    selected: list[list[CornerPoint]],
    ref: ReferenceColor,
) -> np.ndarray:
    """Per-ribbon population variance of corner color-vector-angle sines.

    Ribbons whose selection holds fewer than two corners contribute 0.
    """
    ref_vec = ref.as_array()
    out = np.zeros(len(selected), dtype=np.float64)
    for k, pts in enumerate(selected):
        if len(pts) < 2:
            continue
        colors = np.array(
            [secondary.pixels[p.row, p.col] for p in pts], dtype=np.float64
        )
        sines = cva_sin_many(colors, ref_vec)
        out[k] = float(np.mean((sines - sines.mean()) ** 2))
    return out


def color_moments(secondary: RgbImage) -> np.ndarray:
    """Global color description: channel-averaged low-order moments.

    Per channel: mean, root mean squared deviation, and the signed cube root
    of the mean cubed deviation; each moment is then averaged over R, G, B to
    give three values.
    """
    flat = secondary.pixels.reshape(-1, 3)
    means = flat.mean(axis=0)
    dev = flat - means
    dev2 = dev * dev
    second = np.sqrt(np.mean(dev2, axis=0))
    third = np.cbrt(np.mean(dev2 * dev, axis=0))
    return np.array([means.mean(), second.mean(), third.mean()], dtype=np.float64)
