"""Hashing configuration, named presets, and the flat key-value config file."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError, ParameterError

SCHEMES = ("concat", "cca")

# Bump when any fixed algorithm constant (Harris settings, band width,
# scrambling generator) changes meaning; it is folded into the digest.
ALGORITHM_VERSION = "v1"


@dataclass(frozen=True)
class Config:
    """All knobs that shape a hash.

    components and ridge apply to the cca scheme only; components defaults to
    the full feature dimension (n_ribbons + 3) and ridge to a data-driven
    value chosen at fit time.  xi is the decision threshold and does not
    affect hash values.
    """

    scheme: str = "concat"
    side: int = 256
    n_ribbons: int = 32
    tau: float = 0.4
    variance_threshold: float = 40.0
    mask_size: int = 3
    sigma: float = 1.0
    g_max: int = 16
    glcm_d: int = 1
    glcm_theta: int = 0
    min_block: int = 2
    components: int | None = None
    ridge: float | None = None
    xi: float = 740.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.side < 8:
            raise ConfigError(f"side must be >= 8, got {self.side}")
        if self.n_ribbons < 1:
            raise ConfigError("n_ribbons must be >= 1")
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError(f"tau must lie in (0, 1], got {self.tau}")
        if self.variance_threshold < 0.0:
            raise ConfigError("variance_threshold must be >= 0")
        if self.mask_size < 1 or self.mask_size % 2 == 0:
            raise ConfigError("mask_size must be a positive odd integer")
        if self.sigma <= 0.0:
            raise ConfigError("sigma must be positive")
        if self.g_max < 2:
            raise ConfigError("g_max must be >= 2")
        if self.glcm_d < 1:
            raise ConfigError("glcm_d must be >= 1")
        if self.glcm_theta not in (0, 45, 90, 135):
            raise ConfigError("glcm_theta must be one of 0, 45, 90, 135")
        if self.min_block < 2 or self.min_block & (self.min_block - 1):
            raise ConfigError("min_block must be a power of two >= 2")
        if self.components is not None and not 1 <= self.components <= self.dim:
            raise ConfigError(f"components must lie in 1..{self.dim}")
        if self.ridge is not None and self.ridge < 0.0:
            raise ConfigError("ridge must be >= 0")
        if self.xi <= 0.0:
            raise ConfigError("xi must be positive")

    @property
    def dim(self) -> int:
        """Length of each CCA input view: n_ribbons local values + 3 global."""
        return self.n_ribbons + 3

    @property
    def hash_length(self) -> int:
        if self.scheme == "concat":
            return 2 * self.n_ribbons + 6
        return self.components if self.components is not None else self.dim

    def digest(self) -> str:
        """Short fingerprint of every hashing-relevant parameter."""
        parts = [f"ribbonhash-config-{ALGORITHM_VERSION}"]
        for f in fields(self):
            if f.name == "xi":
                continue
            parts.append(f"{f.name}={getattr(self, f.name)!r}")
        return hashlib.sha256("|".join(parts).encode()).hexdigest()[:12]


PRESETS = {
    "concat-default": Config(
        scheme="concat", side=256, n_ribbons=32, tau=0.4, variance_threshold=40.0
    ),
    "cca-default": Config(
        scheme="cca", side=512, n_ribbons=67, tau=0.4, variance_threshold=14.0
    ),
}


def preset(name: str) -> Config:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(name: str, raw: str):
    raw = raw.strip()
    if name in ("components", "ridge"):
        if raw.lower() in ("none", ""):
            return None
        return int(raw) if name == "components" else float(raw)
    if name == "scheme":
        return raw
    if name in ("side", "n_ribbons", "mask_size", "g_max", "glcm_d", "glcm_theta", "min_block"):
        return int(raw)
    return float(raw)


def read_config(path: str | Path, base: Config | None = None) -> Config:
    """Parse a flat `key = value` file; unknown keys are rejected."""
    cfg = base if base is not None else Config()
    overrides = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        name, raw = (s.strip() for s in line.split("=", 1))
        if name not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown config key {name!r}")
        try:
            overrides[name] = _coerce(name, raw)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {name}: {exc}") from exc
    try:
        return replace(cfg, **overrides)
    except (ParameterError, ConfigError):
        raise
    except Exception as exc:  # dataclass/replace TypeErrors
        raise ConfigError(str(exc)) from exc


def write_config(cfg: Config, path: str | Path) -> None:
    lines = [f"{f.name} = {getattr(cfg, f.name)}" for f in fields(cfg)]
    Path(path).write_text("\n".join(lines) + "\n")
