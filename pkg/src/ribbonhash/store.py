"""Append-only hash index for copy detection.

The file is line-delimited JSON: a header record pinning the scheme, config
digest, and key fingerprint, then one record per hash.  Writes take an
advisory lock so concurrent appends cannot interleave.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import IncompatibleIndexError
from .pipeline import HASH_PRECISION, Hash
from .similarity import euclidean_distance

INDEX_FORMAT = "ribbonhash-index-v1"

try:
    import fcntl

    def _lock(fh):
        fcntl.flock(fh, fcntl.LOCK_EX)

    def _unlock(fh):
        fcntl.flock(fh, fcntl.LOCK_UN)

except ImportError:  # non-POSIX fallback: no locking

    def _lock(fh):
        pass

    def _unlock(fh):
        pass


@dataclass(frozen=True)
class HashIndexEntry:
    entry_id: int
    label: str
    hash: Hash
    timestamp: str


@dataclass(frozen=True)
class QueryResult:
    entry: HashIndexEntry
    distance: float
    is_copy: bool


class HashIndex:
    """Linear-scan index over hashes sharing one config digest and key pair."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def _header(self) -> dict | None:
        if not self.path.exists():
            return None
        with open(self.path) as fh:
            line = fh.readline().strip()
        if not line:
            return None
        header = json.loads(line)
        if header.get("format") != INDEX_FORMAT:
            raise IncompatibleIndexError(f"{self.path}: not a {INDEX_FORMAT} file")
        return header

    def _check_compatible(self, h: Hash, header: dict) -> None:
        mismatches = []
        if header["scheme"] != h.scheme:
            mismatches.append(f"scheme {header['scheme']} != {h.scheme}")
        if header["config_digest"] != h.config_digest:
            mismatches.append(f"config digest {header['config_digest']} != {h.config_digest}")
        if header["key_fingerprint"] != h.key_fingerprint:
            mismatches.append("key fingerprint differs")
        if mismatches:
            raise IncompatibleIndexError(f"{self.path}: {'; '.join(mismatches)}")

    def add(self, h: Hash, label: str, timestamp: str | None = None) -> int:
        """Append one hash; creates the index (and header) on first use."""
        if timestamp is None:
            timestamp = datetime.now(timezone.utc).isoformat()
        with open(self.path, "a") as fh:
            _lock(fh)
            try:
                header = self._header()
                if header is None:
                    header = {
                        "format": INDEX_FORMAT,
                        "scheme": h.scheme,
                        "config_digest": h.config_digest,
                        "key_fingerprint": h.key_fingerprint,
                    }
                    fh.write(json.dumps(header, sort_keys=True) + "\n")
                    fh.flush()
                self._check_compatible(h, header)
                with open(self.path) as reader:
                    entry_id = sum(1 for _ in reader) - 1
                record = {
                    "id": entry_id,
                    "label": label,
                    "values": [f"{v:.{HASH_PRECISION}g}" for v in h.values],
                    "timestamp": timestamp,
                }
                fh.write(json.dumps(record, sort_keys=True) + "\n")
            finally:
                _unlock(fh)
        return entry_id

    def entries(self) -> list[HashIndexEntry]:
        header = self._header()
        if header is None:
            return []
        out = []
        with open(self.path) as fh:
            fh.readline()  # header
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                h = Hash(
                    values=np.array([float(v) for v in rec["values"]]),
                    scheme=header["scheme"],
                    key_fingerprint=header["key_fingerprint"],
                    config_digest=header["config_digest"],
                )
                out.append(
                    HashIndexEntry(
                        entry_id=int(rec["id"]),
                        label=rec["label"],
                        hash=h,
                        timestamp=rec["timestamp"],
                    )
                )
        return out

    def query(self, h: Hash, top_k: int = 5, xi: float = 740.0) -> list[QueryResult]:
        """Nearest entries by distance; matches within xi are flagged as copies.

        An empty index yields an empty result; an index built under another
        config or key raises IncompatibleIndexError.
        """
        header = self._header()
        if header is None:
            return []
        self._check_compatible(h, header)
        # compare in the index's fixed-precision domain so that querying with
        # an indexed image reproduces distance 0 exactly
        probe = Hash(
            values=np.array([float(f"{v:.{HASH_PRECISION}g}") for v in h.values]),
            scheme=h.scheme,
            key_fingerprint=h.key_fingerprint,
            config_digest=h.config_digest,
        )
        scored = []
        for entry in self.entries():
            d = euclidean_distance(probe, entry.hash)
            scored.append((d, entry.entry_id, entry))
        scored.sort(key=lambda t: (t[0], t[1]))
        return [
            QueryResult(entry=e, distance=d, is_copy=d <= xi) for d, _, e in scored[:top_k]
        ]
