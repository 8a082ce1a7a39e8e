"""File exchange for proposals produced outside the pipeline.

The wire format is JSON lines, one record per line, keys in fixed order
(image_id, tile_index, width, height, objectness, runs). tile_index is
omitted for whole-image records. objectness carries exactly six decimal
digits; record construction quantizes to the same precision, which makes
read/write a byte-stable round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .detector import Proposal
from .masks import BinaryMask

_REQUIRED_KEYS = ("image_id", "width", "height", "objectness", "runs")
_ALL_KEYS = frozenset(_REQUIRED_KEYS) | {"tile_index"}


class ExchangeFormatError(ValueError):
    """A proposal file that violates the exchange schema."""


@dataclass(eq=True)
class ProposalRecord:
    image_id: str
    width: int
    height: int
    objectness: float
    runs: tuple[int, ...]
    tile_index: int | None = None

    def __post_init__(self) -> None:
        self.objectness = round(float(self.objectness), 6)
        if not 0.0 <= self.objectness <= 1.0:
            raise ValueError(f"objectness {self.objectness} outside [0, 1]")
        # constructing the mask validates the runs against width x height
        self.runs = BinaryMask(self.width, self.height, tuple(self.runs)).runs

    def mask(self) -> BinaryMask:
        return BinaryMask(self.width, self.height, self.runs)


def record_from_proposal(image_id: str, proposal: Proposal) -> ProposalRecord:
    """Whole-image-coordinate record for a pipeline proposal."""
    m = proposal.mask
    return ProposalRecord(image_id, m.width, m.height, proposal.objectness, m.runs)


def format_record(record: ProposalRecord) -> str:
    """Canonical single-line serialization."""
    parts = [f'"image_id": {json.dumps(record.image_id)}']
    if record.tile_index is not None:
        parts.append(f'"tile_index": {record.tile_index}')
    parts.append(f'"width": {record.width}')
    parts.append(f'"height": {record.height}')
    parts.append(f'"objectness": {record.objectness:.6f}')
    parts.append('"runs": [' + ", ".join(str(r) for r in record.runs) + "]")
    return "{" + ", ".join(parts) + "}"


def write_proposals(records, path) -> None:
    """Write records in input order; identical inputs give identical bytes."""
    lines = [format_record(r) for r in records]
    payload = "\n".join(lines) + "\n" if lines else ""
    Path(path).write_bytes(payload.encode("ascii"))


def _parse_record(doc, path, lineno: int) -> ProposalRecord:
    if not isinstance(doc, dict):
        raise ExchangeFormatError(f"{path}: line {lineno}: record is not an object")
    keys = set(doc)
    missing = [k for k in _REQUIRED_KEYS if k not in keys]
    if missing:
        raise ExchangeFormatError(f"{path}: line {lineno}: missing fields {missing}")
    unknown = sorted(keys - _ALL_KEYS)
    if unknown:
        raise ExchangeFormatError(f"{path}: line {lineno}: unknown fields {unknown}")
    image_id = doc["image_id"]
    if not isinstance(image_id, str):
        raise ExchangeFormatError(f"{path}: line {lineno}: image_id must be a string")
    tile_index = doc.get("tile_index")
    for name in ("width", "height") + (("tile_index",) if tile_index is not None else ()):
        v = doc[name]
        if not isinstance(v, int) or isinstance(v, bool):
            raise ExchangeFormatError(f"{path}: line {lineno}: {name} must be an integer")
    objectness = doc["objectness"]
    if isinstance(objectness, bool) or not isinstance(objectness, (int, float)):
        raise ExchangeFormatError(f"{path}: line {lineno}: objectness must be a number")
    runs = doc["runs"]
    if not isinstance(runs, list) or any(isinstance(r, bool) or not isinstance(r, int) for r in runs):
        raise ExchangeFormatError(f"{path}: line {lineno}: runs must be a list of integers")
    try:
        return ProposalRecord(
            image_id, doc["width"], doc["height"], objectness, tuple(runs), tile_index
        )
    except ValueError as exc:
        raise ExchangeFormatError(f"{path}: line {lineno}: {exc}") from exc


def read_proposals(path) -> list[ProposalRecord]:
    """Parse a JSONL proposal file, preserving file order."""
    text = Path(path).read_text(encoding="ascii")
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ExchangeFormatError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
        out.append(_parse_record(doc, path, lineno))
    return out
