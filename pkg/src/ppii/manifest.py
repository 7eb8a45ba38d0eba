"""Dataset manifests: deterministic directory ingestion with partial-failure reporting."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidInput, NoInputs
from .io import read_image

SPLITS = ("train", "val", "test")
SAMPLE_LABELS = ("id", "ood", "unknown")


@dataclass(frozen=True)
class ManifestEntry:
    path: str  # relative to the manifest root
    split: str = "train"
    sample_label: str = "unknown"

    def __post_init__(self):
        if self.split not in SPLITS:
            raise InvalidInput(f"split must be one of {SPLITS}, got {self.split!r}")
        if self.sample_label not in SAMPLE_LABELS:
            raise InvalidInput(
                f"sample_label must be one of {SAMPLE_LABELS}, got {self.sample_label!r}"
            )


@dataclass
class Manifest:
    root: Path
    entries: list[ManifestEntry] = field(default_factory=list)

    def __post_init__(self):
        self.root = Path(self.root)
        seen = set()
        for entry in self.entries:
            if entry.path in seen:
                raise InvalidInput(f"duplicate manifest path {entry.path!r}")
            seen.add(entry.path)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def absolute(self, entry: ManifestEntry) -> Path:
        return self.root / entry.path

    def paths(self) -> list[Path]:
        return [self.absolute(e) for e in self.entries]


@dataclass
class IngestReport:
    manifest: Manifest
    errors: list[tuple[str, str]] = field(default_factory=list)  # (relative path, message)

    @property
    def ok(self) -> bool:
        return not self.errors


def ingest(
    directory: str | os.PathLike,
    pattern: str = "*.png",
    split: str = "train",
    sample_label: str = "unknown",
) -> IngestReport:
    """Build a manifest from every file in `directory` matching `pattern`.

    Files are visited in lexicographic order of their relative paths.
    Files that fail to decode as grayscale images are left out of the
    manifest and reported in the error list; an empty match set raises
    NoInputs.
    """
    root = Path(directory)
    if not root.is_dir():
        raise InvalidInput(f"not a directory: {root}")
    matches = sorted(p for p in root.glob(pattern) if p.is_file())
    if not matches:
        raise NoInputs(f"no files matching {pattern!r} under {root}")
    entries = []
    errors = []
    for path in matches:
        rel = path.relative_to(root).as_posix()
        try:
            read_image(path)
        except InvalidInput as exc:
            errors.append((rel, str(exc)))
            continue
        entries.append(ManifestEntry(path=rel, split=split, sample_label=sample_label))
    return IngestReport(manifest=Manifest(root=root, entries=entries), errors=errors)
