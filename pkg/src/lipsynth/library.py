"""Viseme library container and its JSON file format.

A library holds one duration-normalized trajectory per viseme; all
trajectories share a single ``sample_count``. The file format is a
self-describing JSON document carrying the format version, the grid size,
the ordered channel list and one sample matrix per viseme, so a library
remains loadable even if the producer used a permuted channel order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channels import CHANNELS, NUM_CHANNELS
from .errors import LibraryError
from .pinyin import VISEME_IDS
from .series import VisemeTrajectory

LIBRARY_VERSION = 1


@dataclass(frozen=True, eq=False)
class VisemeLibrary:
    """Mapping from viseme IDs to standardized trajectories."""

    sample_count: int
    visemes: dict[str, VisemeTrajectory]

    def __post_init__(self):
        if self.sample_count < 2:
            raise ValueError(f"sample_count must be >= 2, got {self.sample_count}")
        if not self.visemes:
            raise ValueError("library must contain at least one viseme")
        for vid, traj in self.visemes.items():
            if vid not in VISEME_IDS:
                raise ValueError(f"unknown viseme id {vid!r}")
            if traj.sample_count != self.sample_count:
                raise ValueError(
                    f"viseme {vid}: trajectory has {traj.sample_count} samples, "
                    f"library sample_count is {self.sample_count}"
                )

    def __eq__(self, other) -> bool:
        if not isinstance(other, VisemeLibrary):
            return NotImplemented
        return (
            self.sample_count == other.sample_count
            and self.visemes.keys() == other.visemes.keys()
            and all(self.visemes[k] == other.visemes[k] for k in self.visemes)
        )

    def get(self, viseme_id: str) -> VisemeTrajectory | None:
        return self.visemes.get(viseme_id)


def serialize_library(lib: VisemeLibrary) -> str:
    """Serialize to the deterministic JSON document format."""
    doc = {
        "version": LIBRARY_VERSION,
        "sample_count": lib.sample_count,
        "channels": list(CHANNELS),
        "visemes": {
            vid: [list(row) for row in traj.values]
            for vid, traj in sorted(lib.visemes.items())
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def deserialize_library(text: str) -> VisemeLibrary:
    """Load a library document, validating version, channels and grid size."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LibraryError(f"library file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise LibraryError("library file must contain a JSON object")

    version = doc.get("version")
    if version != LIBRARY_VERSION:
        raise LibraryError(
            f"unsupported library version {version!r}, expected {LIBRARY_VERSION}"
        )

    channels = doc.get("channels")
    if not isinstance(channels, list):
        raise LibraryError("library file lacks a channel list")
    missing = [name for name in CHANNELS if name not in channels]
    if missing:
        raise LibraryError(f"library channel list is missing: {', '.join(missing)}")
    extra = [name for name in channels if name not in CHANNELS]
    if extra:
        raise LibraryError(f"library channel list has unknown channel(s): {', '.join(extra)}")
    if len(channels) != NUM_CHANNELS:
        raise LibraryError(f"library channel list has {len(channels)} entries, expected {NUM_CHANNELS}")
    # Accept any permutation of the canonical set; reorder columns on load.
    perm = [channels.index(name) for name in CHANNELS]

    sample_count = doc.get("sample_count")
    if not isinstance(sample_count, int) or sample_count < 2:
        raise LibraryError(f"invalid sample_count {sample_count!r}")

    visemes_doc = doc.get("visemes")
    if not isinstance(visemes_doc, dict) or not visemes_doc:
        raise LibraryError("library file has no viseme trajectories")
    visemes: dict[str, VisemeTrajectory] = {}
    for vid, rows in visemes_doc.items():
        if vid not in VISEME_IDS:
            raise LibraryError(f"unknown viseme id {vid!r} in library file")
        arr = np.asarray(rows, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != NUM_CHANNELS:
            raise LibraryError(f"viseme {vid}: sample matrix must be (n, {NUM_CHANNELS})")
        if arr.shape[0] != sample_count:
            raise LibraryError(
                f"viseme {vid}: {arr.shape[0]} samples, file sample_count is {sample_count}"
            )
        visemes[vid] = VisemeTrajectory(arr[:, perm])
    return VisemeLibrary(sample_count=sample_count, visemes=visemes)


def load_library(path) -> VisemeLibrary:
    with open(path, "r", encoding="utf-8") as fh:
        return deserialize_library(fh.read())


def save_library(lib: VisemeLibrary, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_library(lib))
