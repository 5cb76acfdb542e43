"""Canonical correlation analysis: offline fitting and per-image fusion.

The hash pipeline feeds CCA one (texture, color) feature-vector pair per
image, so projection matrices must be estimated offline from a training
corpus of such pairs and then applied as fixed linear maps.  The fitted model
is part of the hasher's public parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg

from .errors import ConfigError, NumericalRankError, ParameterError

MODEL_FORMAT = "ribbonhash-cca-v1"

# Fraction of the mean covariance diagonal used as the default ridge when
# samples are plentiful.  With fewer samples than dimensions the empirical
# covariances are rank-deficient and a tiny ridge lets directions outside the
# training span blow up after inversion (out-of-sample perturbations then
# dwarf genuine between-image distances), so the default grows like dim/M.
DEFAULT_RIDGE_SCALE = 1e-3


@dataclass(frozen=True)
class CcaModel:
    """Fitted projections for two feature views of equal dimension.

    a and b are (dim, e) matrices whose columns satisfy a_i' S11 a_i = 1 and
    b_i' S22 b_i = 1 on the (standardized, ridge-regularized) training
    covariances; lambdas holds the canonical correlations in descending
    order.  mean/std are the training statistics used to standardize inputs.
    """

    dim: int
    e: int
    ridge: float
    sample_count: int
    config_digest: str
    mean1: np.ndarray
    std1: np.ndarray
    mean2: np.ndarray
    std2: np.ndarray
    a: np.ndarray
    b: np.ndarray
    lambdas: np.ndarray


# Lower bound on the per-feature standardization scale, relative to the
# feature's magnitude.  Features that are nearly constant across a small
# training corpus would otherwise get z-scores in the hundreds for ordinary
# attack-sized perturbations, drowning genuine between-image differences.
STD_FLOOR_FRACTION = 0.05


def _standardize_stats(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    floor = STD_FLOOR_FRACTION * np.maximum(1.0, np.abs(mean))
    return mean, np.maximum(std, floor)


def cca_fit(
    h1: np.ndarray,
    h2: np.ndarray,
    e: int | None = None,
    ridge: float | None = None,
    config_digest: str = "",
) -> CcaModel:
    """Fit CCA on M paired samples (rows of h1 and h2).

    Views are z-scored with their training statistics, covariances use the
    population normalization, and `ridge * I` is added to each view's
    covariance before inversion (the default ridge is a small fraction of the
    mean diagonal).  Solves S11^-1 S12 S22^-1 S21 a = lambda^2 a via a
    Cholesky-whitened symmetric eigenproblem; b follows as S22^-1 S21 a
    rescaled to unit generalized norm.
    """
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    if h1.ndim != 2 or h1.shape != h2.shape:
        raise ParameterError(f"paired sample matrices must share a shape, got {h1.shape} vs {h2.shape}")
    m, dim = h1.shape
    if m < 2:
        raise ParameterError(f"need at least 2 samples to estimate covariances, got {m}")
    if e is None:
        e = dim
    if not 1 <= e <= dim:
        raise ParameterError(f"components must lie in 1..{dim}, got {e}")
    if ridge is not None and ridge < 0.0:
        raise ParameterError("ridge must be >= 0")

    mean1, std1 = _standardize_stats(h1)
    mean2, std2 = _standardize_stats(h2)
    z1 = (h1 - mean1) / std1
    z2 = (h2 - mean2) / std2

    s11 = z1.T @ z1 / m
    s22 = z2.T @ z2 / m
    s12 = z1.T @ z2 / m
    if ridge is None:
        scale = max(DEFAULT_RIDGE_SCALE, dim / (m - 1))
        ridge = scale * 0.5 * (np.trace(s11) + np.trace(s22)) / dim
    s11r = s11 + ridge * np.eye(dim)
    s22r = s22 + ridge * np.eye(dim)

    try:
        l11 = np.linalg.cholesky(s11r)
        c22 = linalg.cho_factor(s22r, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalRankError(
            "covariance matrix is numerically singular; refit with a positive ridge"
        ) from exc

    s22inv_s21 = linalg.cho_solve(c22, s12.T)
    core = linalg.solve_triangular(l11, s12 @ s22inv_s21, lower=True)
    core = linalg.solve_triangular(l11, core.T, lower=True).T
    core = 0.5 * (core + core.T)
    eigvals, w = np.linalg.eigh(core)
    order = np.argsort(eigvals)[::-1][:e]
    lams = np.sqrt(np.clip(eigvals[order], 0.0, 1.0))
    a = linalg.solve_triangular(l11, w[:, order], lower=True, trans="T")

    b_raw = s22inv_s21 @ a
    b = np.zeros_like(b_raw)
    for i in range(e):
        scale = float(np.sqrt(max(b_raw[:, i] @ s22r @ b_raw[:, i], 0.0)))
        if scale > 0.0:
            b[:, i] = b_raw[:, i] / scale
        # eigenvector signs are arbitrary: pin the dominant entry of a positive
        j = int(np.argmax(np.abs(a[:, i])))
        if a[j, i] < 0.0:
            a[:, i] = -a[:, i]
            b[:, i] = -b[:, i]

    return CcaModel(
        dim=dim,
        e=e,
        ridge=float(ridge),
        sample_count=m,
        config_digest=config_digest,
        mean1=mean1,
        std1=std1,
        mean2=mean2,
        std2=std2,
        a=a,
        b=b,
        lambdas=lams,
    )


def cca_fuse(model: CcaModel, h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """Fused feature vector a' z1 + b' z2 of one (texture, color) pair."""
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    if h1.shape != (model.dim,) or h2.shape != (model.dim,):
        raise ParameterError(
            f"expected two vectors of length {model.dim}, got {h1.shape} and {h2.shape}"
        )
    z1 = (h1 - model.mean1) / model.std1
    z2 = (h2 - model.mean2) / model.std2
    return model.a.T @ z1 + model.b.T @ z2


def save_model(model: CcaModel, path: str | Path) -> None:
    """Write the model as deterministic, self-describing JSON."""
    doc = {
        "format": MODEL_FORMAT,
        "dim": model.dim,
        "e": model.e,
        "ridge": model.ridge,
        "sample_count": model.sample_count,
        "config_digest": model.config_digest,
        "mean1": model.mean1.tolist(),
        "std1": model.std1.tolist(),
        "mean2": model.mean2.tolist(),
        "std2": model.std2.tolist(),
        "a": model.a.tolist(),
        "b": model.b.tolist(),
        "lambdas": model.lambdas.tolist(),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")


def load_model(path: str | Path) -> CcaModel:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read CCA model {path}: {exc}") from exc
    if doc.get("format") != MODEL_FORMAT:
        raise ConfigError(f"{path}: not a {MODEL_FORMAT} file")
    arr = lambda k: np.asarray(doc[k], dtype=np.float64)
    return CcaModel(
        dim=int(doc["dim"]),
        e=int(doc["e"]),
        ridge=float(doc["ridge"]),
        sample_count=int(doc["sample_count"]),
        config_digest=str(doc["config_digest"]),
        mean1=arr("mean1"),
        std1=arr("std1"),
        mean2=arr("mean2"),
        std2=arr("std2"),
        a=arr("a"),
        b=arr("b"),
        lambdas=arr("lambdas"),
    )
