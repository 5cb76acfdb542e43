"""Hash similarity: Euclidean distance (operative metric) and correlation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComparisonError, ParameterError
from .pipeline import Hash

# Tiny denominator guard for the correlation coefficient.
DEFAULT_DELTA_O = 1e-12


@dataclass(frozen=True)
class Verdict:
    distance: float
    threshold: float
    decision: str  # "similar" | "different"

    @property
    def similar(self) -> bool:
        return self.decision == "similar"


def _check_comparable(h1: Hash, h2: Hash, check_keys: bool) -> None:
    if h1.length != h2.length:
        raise ComparisonError(f"hash lengths differ: {h1.length} vs {h2.length}")
    if h1.scheme != h2.scheme:
        raise ComparisonError(f"hash schemes differ: {h1.scheme} vs {h2.scheme}")
    if check_keys and h1.key_fingerprint != h2.key_fingerprint:
        raise ComparisonError(
            "hashes were produced under different keys; such distances are meaningless"
        )


def euclidean_distance(h1: Hash, h2: Hash, *, check_keys: bool = True) -> float:
    """L2 distance between two comparable hashes.

    check_keys=False is reserved for key-security sweeps, which deliberately
    measure cross-key distances.
    """
    _check_comparable(h1, h2, check_keys)
    return float(np.linalg.norm(h1.values - h2.values))


def correlation_coefficient(h1: Hash, h2: Hash, delta_o: float = DEFAULT_DELTA_O) -> float:
    """Pearson correlation with a small additive guard in the denominator.

    Kept for comparison-study use; the pipeline's operative metric is the
    Euclidean distance.
    """
    _check_comparable(h1, h2, check_keys=True)
    if h1.length < 2:
        raise ComparisonError("correlation requires hashes of length >= 2")
    a = h1.values - h1.values.mean()
    b = h2.values - h2.values.mean()
    denom = np.sqrt((a @ a) * (b @ b)) + delta_o
    return float((a @ b) / denom)


def classify(distance: float, xi: float) -> Verdict:
    """Similar iff distance <= xi (ties are similar)."""
    if xi <= 0.0:
        raise ParameterError(f"threshold must be positive, got {xi}")
    decision = "similar" if distance <= xi else "different"
    return Verdict(distance=float(distance), threshold=float(xi), decision=decision)
