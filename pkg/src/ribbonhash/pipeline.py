"""End-to-end hash generation: feature extraction, fusion, keyed scrambling.

Scrambling applies a Fisher-Yates shuffle driven by numpy's PCG64 bit
generator seeded with the hash-stage key (scramble format "pcg64-fy-v1");
the feature-stage key only breaks ties between equal-response corners, so the
feature values themselves stay attack-robust.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .cca import CcaModel, cca_fuse
from .color import (
    color_moments,
    harris_corners,
    local_color_vector,
    reference_color,
    select_boundary_corners,
)
from .config import Config
from .errors import ConfigError, ParameterError
from .imaging import RgbImage, luminance, preprocess
from .rings import ribbon_map
from .texture import QuadtreeParams, glcm_of_luma, glcm_scalars, local_texture_vector

SCRAMBLE_FORMAT = "pcg64-fy-v1"
HASH_PRECISION = 9  # significant digits kept when a hash is serialized


@dataclass(frozen=True)
class SecretKeys:
    """Feature-stage key k1 and hash-stage key k2 (64-bit integers)."""

    k1: int
    k2: int

    def fingerprint(self) -> str:
        """One-way short id of the key pair; safe to persist."""
        payload = f"ribbonhash-keys-v1:{self.k1}:{self.k2}".encode()
        return hashlib.sha256(payload).hexdigest()[:12]


@dataclass(frozen=True)
class FeatureBundle:
    """The four feature vectors extracted from one image."""

    h_q: np.ndarray  # per-ribbon quadtree split counts, length N
    z_g: np.ndarray  # GLCM correlation/contrast/entropy, length 3
    h_c: np.ndarray  # per-ribbon CVA variances, length N
    c_g: np.ndarray  # channel-averaged color moments, length 3

    def __post_init__(self):
        n = len(self.h_q)
        if len(self.h_c) != n or len(self.z_g) != 3 or len(self.c_g) != 3:
            raise ParameterError("bundle vector lengths must be (N, 3, N, 3)")

    @property
    def n_ribbons(self) -> int:
        return len(self.h_q)

    def texture_view(self) -> np.ndarray:
        """First fusion input: [h_q, z_g]."""
        return np.concatenate([self.h_q, self.z_g])

    def color_view(self) -> np.ndarray:
        """Second fusion input: [h_c, c_g]."""
        return np.concatenate([self.h_c, self.c_g])


@dataclass(frozen=True)
class Hash:
    """Fixed-length real-valued hash plus the metadata needed to compare it."""

    values: np.ndarray
    scheme: str
    key_fingerprint: str
    config_digest: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if not np.isfinite(vals).all():
            raise ParameterError("hash values must all be finite")
        object.__setattr__(self, "values", vals)

    @property
    def length(self) -> int:
        return len(self.values)


def permutation(n: int, key: int) -> np.ndarray:
    """Deterministic keyed permutation of range(n) (Fisher-Yates over PCG64)."""
    rng = np.random.Generator(np.random.PCG64(key))
    perm = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def scramble(values: np.ndarray, key: int) -> np.ndarray:
    values = np.asarray(values)
    return values[permutation(len(values), key)]


def unscramble(values: np.ndarray, key: int) -> np.ndarray:
    values = np.asarray(values)
    return values[np.argsort(permutation(len(values), key))]


def concat_hash(bundle: FeatureBundle, keys: SecretKeys, config_digest: str = "") -> Hash:
    """Directly concatenated hash [h_q, z_g, h_c, c_g], scrambled with k2."""
    flat = np.concatenate([bundle.h_q, bundle.z_g, bundle.h_c, bundle.c_g])
    return Hash(
        values=scramble(flat, keys.k2),
        scheme="concat",
        key_fingerprint=keys.fingerprint(),
        config_digest=config_digest,
    )


def extract_bundle(image: RgbImage, config: Config, k1: int = 0) -> FeatureBundle:
    """Run preprocessing and all four feature extractors on one image."""
    secondary = preprocess(image, config.side, config.mask_size, config.sigma)
    ribbons = ribbon_map(config.side, config.n_ribbons)
    lum = luminance(secondary)

    qt = QuadtreeParams(
        variance_threshold=config.variance_threshold, min_block=config.min_block
    )
    h_q = local_texture_vector(secondary, ribbons, qt)
    z_g = glcm_scalars(glcm_of_luma(lum, config.glcm_d, config.glcm_theta, config.g_max))

    corners = harris_corners(lum)
    selected = select_boundary_corners(corners, ribbons, config.tau, key=k1)
    h_c = local_color_vector(secondary, selected, reference_color(secondary))
    c_g = color_moments(secondary)
    return FeatureBundle(h_q=h_q, z_g=z_g, h_c=h_c, c_g=c_g)


def generate_hash(
    image: RgbImage,
    config: Config,
    keys: SecretKeys,
    model: CcaModel | None = None,
) -> Hash:
    """Hash one image under the given configuration and secret keys."""
    digest = config.digest()
    if config.scheme == "cca":
        if model is None:
            raise ConfigError("cca scheme requires a fitted CCA model")
        if model.config_digest and model.config_digest != digest:
            raise ConfigError(
                f"model was fitted under config {model.config_digest}, not {digest}"
            )
        if model.dim != config.dim:
            raise ConfigError(f"model dimension {model.dim} != config dimension {config.dim}")
    bundle = extract_bundle(image, config, k1=keys.k1)
    if config.scheme == "concat":
        return concat_hash(bundle, keys, config_digest=digest)
    fused = cca_fuse(model, bundle.texture_view(), bundle.color_view())
    return Hash(
        values=scramble(fused, keys.k2),
        scheme="cca",
        key_fingerprint=keys.fingerprint(),
        config_digest=digest,
    )


def format_hash(h: Hash) -> str:
    """Serialize to fixed-precision text, stable across platforms."""
    vals = " ".join(f"{v:.{HASH_PRECISION}g}" for v in h.values)
    return f"scheme={h.scheme} keyfp={h.key_fingerprint} config={h.config_digest} n={h.length} {vals}"


def parse_hash(text: str) -> Hash:
    parts = text.split()
    meta = {}
    vals_start = 0
    for i, tok in enumerate(parts):
        if "=" in tok:
            k, v = tok.split("=", 1)
            meta[k] = v
            vals_start = i + 1
        else:
            break
    try:
        values = np.array([float(t) for t in parts[vals_start:]], dtype=np.float64)
        n = int(meta["n"])
        if len(values) != n:
            raise ValueError(f"expected {n} values, found {len(values)}")
        return Hash(
            values=values,
            scheme=meta["scheme"],
            key_fingerprint=meta["keyfp"],
            config_digest=meta.get("config", ""),
        )
    except (KeyError, ValueError) as exc:
        raise ParameterError(f"malformed hash line: {exc}") from exc
