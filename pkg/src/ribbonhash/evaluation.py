"""Classification metrics over hash distances: TPR/FPR, ROC, group statistics."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cca import CcaModel
from .config import Config
from .errors import EvaluationError, ParameterError
from .imaging import RgbImage
from .pipeline import SecretKeys, generate_hash
from .similarity import euclidean_distance

DEFAULT_GRID_POINTS = 200


@dataclass(frozen=True)
class DistanceSample:
    """One measured pair distance with its class label."""

    pair_id: str
    kind: str  # "similar" | "different" | "wrong_key"
    distance: float
    tag: str | None = None  # manipulation label for similar pairs

    def __post_init__(self):
        if self.distance < 0.0:
            raise ParameterError("distances are non-negative")
        if self.kind not in ("similar", "different", "wrong_key"):
            raise ParameterError(f"unknown sample kind {self.kind!r}")


@dataclass(frozen=True)
class RocPoint:
    xi: float
    fpr: float
    tpr: float


def _split(samples) -> tuple[np.ndarray, np.ndarray]:
    sim = np.array([s.distance for s in samples if s.kind == "similar"])
    diff = np.array([s.distance for s in samples if s.kind == "different"])
    return sim, diff


def tpr_fpr(samples, xi: float) -> tuple[float, float]:
    """Fractions of similar / different pairs with distance <= xi."""
    sim, diff = _split(samples)
    if len(sim) == 0 or len(diff) == 0:
        raise EvaluationError("need at least one similar and one different pair")
    return float((sim <= xi).mean()), float((diff <= xi).mean())


def roc_curve(samples, grid=None) -> tuple[list[RocPoint], float]:
    """ROC points over a threshold grid plus the trapezoidal AUC.

    The default grid is 200 even thresholds spanning [0, max distance]; pass
    the sorted unique distances instead to get the exact step-function curve.
    The AUC integration pads the curve with (0, 0) and (1, 1).
    """
    sim, diff = _split(samples)
    if len(sim) == 0 or len(diff) == 0:
        raise EvaluationError("need at least one similar and one different pair")
    if grid is None:
        top = float(max(sim.max(), diff.max()))
        grid = np.linspace(0.0, top if top > 0 else 1.0, DEFAULT_GRID_POINTS)
    grid = np.sort(np.asarray(grid, dtype=np.float64))
    points = [
        RocPoint(xi=float(x), fpr=float((diff <= x).mean()), tpr=float((sim <= x).mean()))
        for x in grid
    ]
    fpr = np.concatenate([[0.0], [p.fpr for p in points], [1.0]])
    tpr = np.concatenate([[0.0], [p.tpr for p in points], [1.0]])
    auc = float(np.trapezoid(tpr, fpr))
    return points, auc


def distance_stats(samples) -> list[tuple[str, float, float, float]]:
    """(tag, mean, max, min) per manipulation group, in first-seen order."""
    groups: dict[str, list[float]] = {}
    for s in samples:
        tag = s.tag if s.tag is not None else s.kind
        groups.setdefault(tag, []).append(s.distance)
    out = []
    for tag, vals in groups.items():
        arr = np.asarray(vals)
        out.append((tag, float(arr.mean()), float(arr.max()), float(arr.min())))
    return out


def distance_histogram(samples, bins: int = 50, kind: str = "different"):
    """(bin_lo, bin_hi, count) rows over the distances of one sample class."""
    vals = np.array([s.distance for s in samples if s.kind == kind])
    if len(vals) == 0:
        raise EvaluationError(f"no {kind} samples to histogram")
    top = float(vals.max())
    counts, edges = np.histogram(vals, bins=bins, range=(0.0, top if top > 0 else 1.0))
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(len(counts))
    ]


def wrong_key_pairs(n: int, correct: SecretKeys, seed: int = 0) -> list[SecretKeys]:
    """n deterministic wrong key pairs, never colliding with the correct pair."""
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    while len(out) < n:
        cand = SecretKeys(int(rng.integers(0, 2**63)), int(rng.integers(0, 2**63)))
        if cand != correct:
            out.append(cand)
    return out


def key_security_sweep(
    image: RgbImage,
    correct: SecretKeys,
    wrong: list[SecretKeys],
    config: Config,
    model: CcaModel | None = None,
) -> np.ndarray:
    """Distance from the correct-key hash to each wrong-key hash, in order."""
    if len(wrong) < 1:
        raise ParameterError("need at least one wrong key")
    ref = generate_hash(image, config, correct, model)
    dists = np.empty(len(wrong), dtype=np.float64)
    for i, keys in enumerate(wrong):
        h = generate_hash(image, config, keys, model)
        dists[i] = euclidean_distance(ref, h, check_keys=False)
    return dists


def write_roc_csv(path: str | Path, points: list[RocPoint]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "fpr", "tpr"])
        for p in points:
            w.writerow([f"{p.xi:.9g}", f"{p.fpr:.9g}", f"{p.tpr:.9g}"])


def write_stats_csv(path: str | Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["manipulation", "mean", "max", "min"])
        for tag, mean, mx, mn in rows:
            w.writerow([tag, f"{mean:.9g}", f"{mx:.9g}", f"{mn:.9g}"])


def write_hist_csv(path: str | Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "count"])
        for lo, hi, count in rows:
            w.writerow([f"{lo:.9g}", f"{hi:.9g}", count])


def write_keys_csv(path: str | Path, distances) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["key_index", "distance"])
        for i, d in enumerate(distances):
            w.writerow([i, f"{d:.9g}"])
