"""The precomputed neighbor table and its on-disk artifact format.

The table lists every lattice point whose exact distance to the canonical
wedge is strictly below sqrt(8).  Any query canonicalized into the wedge
can only receive interpolation weight from (inverse images of) these
points, so one fixed table plus a per-query isometry gives constant-time
neighbor enumeration.

The table ships embedded in the package (``_table_data``); regeneration
from scratch and export to a binary artifact with a JSON sidecar are
build-time operations.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .lattice import DIM, SUPPORT_RADIUS_SQ, enumerate_box_points
from .polytope import certified_distance_sq

ARTIFACT_VERSION = 1
ARTIFACT_DTYPE = "<i4"
LATTICE_NAME = "2E8"
EXPECTED_COUNT = 232

# Candidates live within (sqrt(8) + 2)^2 < 24 of the origin, so their
# squared norms are in {0, 8, 16} and coordinates lie in [-4, 4].
_CANDIDATE_BOUND = 4
_CANDIDATE_NORM_SQ_MAX = 23


def table_checksum(points: np.ndarray) -> str:
    """SHA-256 of the table serialized in canonical (int32 LE, row-major) form."""
    payload = np.ascontiguousarray(points, dtype=ARTIFACT_DTYPE).tobytes()
    return hashlib.sha256(payload).hexdigest()


@dataclass(frozen=True)
class NeighborTable:
    """Lexicographically ordered wedge-neighbor points plus their checksum."""

    points: np.ndarray
    checksum: str

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    def validate(self) -> None:
        points = self.points
        if points.shape != (EXPECTED_COUNT, DIM):
            raise ValueError(f"table has shape {points.shape}, expected ({EXPECTED_COUNT}, {DIM})")
        if table_checksum(points) != self.checksum:
            raise ValueError("table checksum mismatch")
        if len({tuple(row) for row in points.tolist()}) != EXPECTED_COUNT:
            raise ValueError("table contains duplicate points")
        if not (points == np.zeros(DIM, dtype=points.dtype)).all(axis=1).any():
            raise ValueError("table must contain the origin")


def generate() -> NeighborTable:
    """Regenerate the table from scratch with exact distance arithmetic.

    Enumerates every lattice point that could possibly be within sqrt(8)
    of the wedge and keeps those whose certified squared distance is
    strictly below 8.
    """
    candidates = enumerate_box_points(_CANDIDATE_BOUND)
    norms = (candidates * candidates).sum(axis=1)
    candidates = candidates[norms <= _CANDIDATE_NORM_SQ_MAX]
    threshold = Fraction(int(SUPPORT_RADIUS_SQ))
    kept = [p for p in candidates if certified_distance_sq(p) < threshold]
    points = np.array(kept, dtype=np.int64)
    order = np.lexsort(points.T[::-1])
    points = points[order]
    table = NeighborTable(points=points, checksum=table_checksum(points))
    table.validate()
    return table


def load_embedded() -> NeighborTable:
    """The table shipped with the package, integrity-checked."""
    from ._table_data import CHECKSUM, POINTS

    points = np.array(POINTS, dtype=np.int64)
    table = NeighborTable(points=points, checksum=CHECKSUM)
    table.validate()
    return table


def artifact_paths(directory: Path) -> tuple[Path, Path]:
    directory = Path(directory)
    return directory / "neighbor_table.bin", directory / "neighbor_table.json"


def write_artifact(table: NeighborTable, directory) -> tuple[Path, Path]:
    """Write the flat-binary table plus its JSON sidecar; returns both paths."""
    bin_path, json_path = artifact_paths(Path(directory))
    bin_path.parent.mkdir(parents=True, exist_ok=True)
    payload = np.ascontiguousarray(table.points, dtype=ARTIFACT_DTYPE).tobytes()
    bin_path.write_bytes(payload)
    header = {
        "version": ARTIFACT_VERSION,
        "lattice": LATTICE_NAME,
        "radius_sq": int(SUPPORT_RADIUS_SQ),
        "count": table.count,
        "dtype": ARTIFACT_DTYPE,
        "ordering": "lexicographic",
        "checksum": table.checksum,
    }
    json_path.write_text(json.dumps(header, indent=2) + "\n")
    return bin_path, json_path


def read_artifact(directory) -> NeighborTable:
    """Load and integrity-check a previously written artifact."""
    bin_path, json_path = artifact_paths(Path(directory))
    header = json.loads(json_path.read_text())
    payload = bin_path.read_bytes()
    checksum = hashlib.sha256(payload).hexdigest()
    if checksum != header["checksum"]:
        raise ValueError("artifact payload does not match sidecar checksum")
    if header["lattice"] != LATTICE_NAME or header["radius_sq"] != int(SUPPORT_RADIUS_SQ):
        raise ValueError("artifact header describes a different table")
    points = np.frombuffer(payload, dtype=header["dtype"]).reshape(header["count"], DIM)
    table = NeighborTable(points=np.asarray(points, dtype=np.int64), checksum=checksum)
    table.validate()
    return table
