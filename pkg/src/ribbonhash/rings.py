"""Equal-area concentric ring-ribbon partition of an image's inscribed circle.

Each of the N ribbons covers the same area, so the pixel membership of every
ribbon is (nearly) unchanged when the image is rotated about its center; this
is what makes the per-ribbon features rotation-robust.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class RibbonMap:
    """Per-pixel ribbon labels for an L x L raster.

    labels[i, j] is 1..N inside the inscribed circle (1 = innermost disk) and
    0 outside it.  dist[i, j] is the distance from pixel center (i+1, j+1) to
    the image center.
    """

    side: int
    n_ribbons: int
    radii: np.ndarray
    labels: np.ndarray
    dist: np.ndarray
    center: tuple[float, float]

    def pixel_counts(self) -> np.ndarray:
        """Number of pixels per ribbon, index 0 = ribbon 1."""
        return np.bincount(self.labels.ravel(), minlength=self.n_ribbons + 1)[1:]


def ribbon_radii(side: int, n_ribbons: int) -> np.ndarray:
    """Outer-boundary radii of N equal-area ribbons: r_k = floor(L/2) * sqrt(k/N)."""
    if n_ribbons < 1:
        raise ParameterError(f"ribbon count must be >= 1, got {n_ribbons}")
    r_outer = side // 2
    if math.pi * r_outer * r_outer / n_ribbons < 1.0:
        raise ParameterError(
            f"{n_ribbons} ribbons leave less than one pixel of area each at side {side}"
        )
    k = np.arange(1, n_ribbons + 1, dtype=np.float64)
    return r_outer * np.sqrt(k / n_ribbons)


def assign_ribbons(side: int, radii: np.ndarray) -> RibbonMap:
    """Label every pixel with its ribbon index (0 outside the inscribed circle).

    Pixel coordinates run 1..L; the center sits at ((L+1)/2, (L+1)/2) for odd
    and even L alike.  A pixel whose distance equals r_k exactly belongs to
    ribbon k (the inner side of the boundary).
    """
    radii = np.asarray(radii, dtype=np.float64)
    n = len(radii)
    center = (side + 1) / 2.0
    coords = np.arange(1, side + 1, dtype=np.float64) - center
    dy = coords[:, None]
    dx = coords[None, :]
    dist = np.sqrt(dy * dy + dx * dx)
    labels = np.searchsorted(radii, dist, side="left").astype(np.int32) + 1
    labels[dist > radii[-1]] = 0
    return RibbonMap(
        side=side,
        n_ribbons=n,
        radii=radii,
        labels=labels,
        dist=dist,
        center=(center, center),
    )


@functools.lru_cache(maxsize=8)
def ribbon_map(side: int, n_ribbons: int) -> RibbonMap:
    """Cached partition for a given image side and ribbon count."""
    return assign_ribbons(side, ribbon_radii(side, n_ribbons))
