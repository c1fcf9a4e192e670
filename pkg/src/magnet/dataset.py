"""Dataset loading from manifest/pairs TSV files."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

from .bundle import GraphBundle, build_bundle
from .errors import FormatError, MagnetError

CLONE_TYPES = ("T1", "T2", "VST3", "ST3", "MT3", "WT3T4")


@dataclass
class ClonePair:
    id1: str
    id2: str
    label: int  # 1 = clone, 0 = nonclone
    clone_type: str | None = None


@dataclass
class Dataset:
    fragments: dict[str, GraphBundle] = field(default_factory=dict)
    pairs: list[ClonePair] = field(default_factory=list)
    skipped_fragments: list[str] = field(default_factory=list)
    skipped_pairs: int = 0


def load_dataset(manifest_path: str | Path, pairs_path: str | Path,
                 warn=lambda msg: print(msg, file=sys.stderr)) -> Dataset:
    """Parse every fragment in the manifest and attach labeled pairs.

    Fragments that fail to parse are excluded with a warning; pairs referencing
    them are dropped. A pair id absent from the manifest is a FormatError.
    """
    manifest_path = Path(manifest_path)
    pairs_path = Path(pairs_path)
    ds = Dataset()
    known_ids: set[str] = set()

    for lineno, raw in enumerate(_read_lines(manifest_path), start=1):
        if not raw.strip():
            continue
        parts = raw.rstrip("\n").split("\t")
        if len(parts) != 2 or not parts[0]:
            raise FormatError(str(manifest_path), lineno, "expected 'id<TAB>path'")
        frag_id, rel_path = parts
        if frag_id in known_ids:
            raise FormatError(str(manifest_path), lineno, f"duplicate fragment id {frag_id!r}")
        known_ids.add(frag_id)
        source_path = manifest_path.parent / rel_path
        try:
            source = source_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise FormatError(str(manifest_path), lineno, f"cannot read {rel_path}: {exc}")
        try:
            ds.fragments[frag_id] = build_bundle(source, frag_id)
        except MagnetError as exc:
            ds.skipped_fragments.append(frag_id)
            warn(f"warning: fragment {frag_id} skipped ({source_path}: {exc})")

    if ds.skipped_fragments:
        warn(f"warning: {len(ds.skipped_fragments)} fragment(s) failed to parse and were excluded")

    skipped_ids = set(ds.skipped_fragments)
    for lineno, raw in enumerate(_read_lines(pairs_path), start=1):
        if not raw.strip():
            continue
        parts = raw.rstrip("\n").split("\t")
        if len(parts) not in (3, 4):
            raise FormatError(str(pairs_path), lineno,
                              "expected 'id1<TAB>id2<TAB>{0|1}[<TAB>clone_type]'")
        id1, id2, label_text = parts[0], parts[1], parts[2]
        for fid in (id1, id2):
            if fid not in known_ids:
                raise FormatError(str(pairs_path), lineno, f"unknown fragment id {fid!r}")
        if label_text not in ("0", "1"):
            raise FormatError(str(pairs_path), lineno, f"label must be 0 or 1, got {label_text!r}")
        clone_type = None
        if len(parts) == 4 and parts[3]:
            if parts[3] not in CLONE_TYPES:
                raise FormatError(str(pairs_path), lineno, f"unknown clone type {parts[3]!r}")
            clone_type = parts[3]
        if id1 in skipped_ids or id2 in skipped_ids:
            ds.skipped_pairs += 1
            continue
        ds.pairs.append(ClonePair(id1=id1, id2=id2, label=int(label_text), clone_type=clone_type))

    if ds.skipped_pairs:
        warn(f"warning: {ds.skipped_pairs} pair(s) dropped (reference excluded fragments)")
    return ds


def _read_lines(path: Path) -> list[str]:
    # OSError propagates: unreadable manifest/pairs files are an I/O failure,
    # not a format problem
    return path.read_text(encoding="utf-8").splitlines()
