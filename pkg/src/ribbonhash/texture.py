"""Texture features: per-ribbon quadtree split counts and GLCM scalars.

The quadtree feature for a ribbon is the number of blocks that get split when
the luminance plane (everything outside the ribbon replaced by a constant
fill) is decomposed recursively: a block splits while its population variance
exceeds the threshold and its side stays above the minimum block size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyGlcmError, ParameterError
from .imaging import LumaImage, RgbImage, luminance
from .rings import RibbonMap

GLCM_DIRECTIONS = (0, 45, 90, 135)

# Ordered (row, col) offset of one scan direction per angle; the symmetric
# counterpart is counted by transposition.
_GLCM_OFFSETS = {0: (0, 1), 45: (1, -1), 90: (1, 0), 135: (1, 1)}


@dataclass(frozen=True)
class QuadtreeParams:
    """Decomposition settings: split while block variance > variance_threshold."""

    variance_threshold: float
    min_block: int = 2
    fill_value: float = 255.0

    def __post_init__(self):
        if self.variance_threshold < 0.0:
            raise ParameterError("variance threshold must be >= 0")
        m = self.min_block
        if m < 2 or m & (m - 1):
            raise ParameterError(f"min_block must be a power of two >= 2, got {m}")


@dataclass(frozen=True)
class Glcm:
    """Normalized gray-level co-occurrence matrix (symmetric pair counting)."""

    g_max: int
    d: int
    theta: int
    matrix: np.ndarray


def _next_pow2(n: int) -> int:
    return 1 << max(n - 1, 0).bit_length() if n > 1 else 1


def _block_sums(plane: np.ndarray, block: int) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // block, block, w // block, block).sum(axis=(1, 3))


def _combine_quads(x: np.ndarray) -> np.ndarray:
    n, h, w = x.shape
    return x.reshape(n, h // 2, 2, w // 2, 2).sum(axis=(2, 4))


def _count_splits(sum0: np.ndarray, sq0: np.ndarray, base_block: int, v_c: float) -> np.ndarray:
    """Split counts from block sums of fill-relative values.

    sum0/sq0 are (regions, g, g) stacks of per-block sums of (value - fill)
    and (value - fill)^2 at the finest splittable block size (twice the
    minimum block: blocks at the minimum size are always leaves, so their
    level is never materialized).  Variance is translation-invariant, so the
    fill never appears explicitly.  Returns one split count per region.
    """
    levels = [(sum0, sq0, base_block)]
    s, sq = sum0, sq0
    b = base_block
    while s.shape[1] > 1:
        s = _combine_quads(s)
        sq = _combine_quads(sq)
        b *= 2
        levels.append((s, sq, b))

    counts = np.zeros(sum0.shape[0], dtype=np.int64)
    parent_split = None
    for s, sq, b in reversed(levels):
        n = float(b * b)
        mean = s / n
        var = np.maximum(sq / n - mean * mean, 0.0)
        split = var > v_c
        if parent_split is not None:
            split &= np.repeat(np.repeat(parent_split, 2, axis=1), 2, axis=2)
        counts += split.sum(axis=(1, 2))
        parent_split = split
    return counts


def quadtree_count(lum: LumaImage, region_mask: np.ndarray, params: QuadtreeParams) -> int:
    """Number of split events when decomposing the masked luminance plane.

    Pixels where region_mask is false are replaced by the fill value; the
    raster is padded with fill to the next power of two before decomposition
    (constant padding adds no splits by itself).
    """
    plane = lum.pixels
    mask = np.asarray(region_mask, dtype=bool)
    if mask.shape != plane.shape:
        raise ParameterError("region mask shape must match the luminance plane")
    side = _next_pow2(max(plane.shape))
    side = max(side, params.min_block)
    base = 2 * params.min_block
    if side < base:
        return 0  # the whole padded raster is a single unsplittable leaf
    delta = np.zeros((side, side), dtype=np.float64)
    h, w = plane.shape
    delta[:h, :w] = np.where(mask, plane - params.fill_value, 0.0)
    sum0 = _block_sums(delta, base)[None]
    sq0 = _block_sums(delta * delta, base)[None]
    return int(_count_splits(sum0, sq0, base, params.variance_threshold)[0])


def local_texture_vector(
    secondary: RgbImage, ribbons: RibbonMap, params: QuadtreeParams
) -> np.ndarray:
    """Quadtree split counts for every ribbon of the secondary image's Y plane.

    Equivalent to calling quadtree_count once per ribbon with the ribbon's
    label mask, but the finest-level block sums for all ribbons are gathered
    in one pass.
    """
    if ribbons.side != secondary.height or ribbons.side != secondary.width:
        raise ParameterError("ribbon map was built for a different image size")
    plane = luminance(secondary).pixels
    side = max(_next_pow2(ribbons.side), params.min_block)
    base = 2 * params.min_block
    if side < base:
        return np.zeros(ribbons.n_ribbons, dtype=np.float64)
    bw = side // base

    rows, cols = np.indices(plane.shape, sparse=True)
    block_id = (rows // base) * bw + (cols // base)
    keys = (ribbons.labels.astype(np.int64) * (bw * bw) + block_id).ravel()
    delta = (plane - params.fill_value).ravel()
    total = (ribbons.n_ribbons + 1) * bw * bw
    sum0 = np.bincount(keys, weights=delta, minlength=total)
    sq0 = np.bincount(keys, weights=delta * delta, minlength=total)
    sum0 = sum0.reshape(ribbons.n_ribbons + 1, bw, bw)[1:]
    sq0 = sq0.reshape(ribbons.n_ribbons + 1, bw, bw)[1:]
    counts = _count_splits(sum0, sq0, base, params.variance_threshold)
    return counts.astype(np.float64)


def quantize_levels(lum: LumaImage, g_max: int) -> np.ndarray:
    """Uniform quantization of [0, 255] into integer levels 1..g_max."""
    if g_max < 1:
        raise ParameterError(f"g_max must be >= 1, got {g_max}")
    lv = np.floor(lum.pixels * (g_max / 256.0)).astype(np.int64) + 1
    return np.clip(lv, 1, g_max)


def glcm(levels: np.ndarray, d: int, theta: int, g_max: int) -> Glcm:
    """Co-occurrence probabilities of level pairs at offset distance d.

    Every adjacent pair is counted in both orders, so the matrix is symmetric
    and its entries sum to 1.
    """
    levels = np.asarray(levels)
    if d < 1:
        raise ParameterError(f"offset distance must be >= 1, got {d}")
    if theta not in _GLCM_OFFSETS:
        raise ParameterError(f"direction must be one of {GLCM_DIRECTIONS}, got {theta}")
    if levels.min() < 1 or levels.max() > g_max:
        raise ParameterError("levels must lie in 1..g_max")
    dr, dc = _GLCM_OFFSETS[theta]
    dr, dc = dr * d, dc * d
    h, w = levels.shape
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r1 <= r0 or c1 <= c0:
        raise EmptyGlcmError(f"image {h}x{w} has no point pairs at d={d}, theta={theta}")
    a = levels[r0:r1, c0:c1].ravel()
    b = levels[r0 + dr : r1 + dr, c0 + dc : c1 + dc].ravel()
    counts = np.bincount((a - 1) * g_max + (b - 1), minlength=g_max * g_max)
    counts = counts.reshape(g_max, g_max)
    sym = counts + counts.T
    return Glcm(g_max=g_max, d=d, theta=theta, matrix=sym / sym.sum())


def glcm_of_luma(lum: LumaImage, d: int, theta: int, g_max: int) -> Glcm:
    """Quantize a luminance plane and build its GLCM."""
    return glcm(quantize_levels(lum, g_max), d, theta, g_max)


def glcm_scalars(g: Glcm) -> np.ndarray:
    """Correlation, contrast and entropy of a normalized GLCM.

    Correlation of a degenerate matrix (a zero marginal deviation) is defined
    as 0; entropy uses base-10 logarithms with 0*lg 0 = 0.
    """
    mat = g.matrix
    idx = np.arange(1, g.g_max + 1, dtype=np.float64)
    px = mat.sum(axis=1)
    py = mat.sum(axis=0)
    mx = float(idx @ px)
    my = float(idx @ py)
    sx = float(np.sqrt((idx - mx) ** 2 @ px))
    sy = float(np.sqrt((idx - my) ** 2 @ py))
    if sx == 0.0 or sy == 0.0:
        cor = 0.0
    else:
        cor = float((idx - mx) @ mat @ (idx - my) / (sx * sy))
    diff = idx[:, None] - idx[None, :]
    con = float((diff * diff * mat).sum())
    nz = mat[mat > 0]
    ent = float(-(nz * np.log10(nz)).sum())
    return np.array([cor, con, ent], dtype=np.float64)
