"""Reading, validating, and writing digitizer recordings and corpus manifests.

Sample file format: UTF-8 text, one sample per line, fields separated by
runs of spaces or tabs. Either seven columns ``x y t status azimuth altitude
pressure`` or four columns ``x y t status``; the column count is fixed per
file and detected from the first data row. ``status`` is 1 while the pen
touches the surface and 0 while it hovers. All values are integers in raw
device units; timestamps are unit-agnostic ticks.

Manifest format: CSV with the exact header ``path,database,task,subject,cohort``.
Relative paths are resolved against the manifest's own directory.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import NamedTuple

from .errors import (
    EmptyInputError,
    ManifestError,
    ParseError,
    TimestampOrderError,
)

MANIFEST_HEADER = ("path", "database", "task", "subject", "cohort")


class PenStatus(IntEnum):
    """Pen contact state as recorded in the status column."""

    IN_AIR = 0
    ON_SURFACE = 1


class ParseWarning(NamedTuple):
    line: int
    message: str


@dataclass(frozen=True, slots=True)
class Sample:
    """One digitizer sample; every field is a raw integer device unit."""

    x: int
    y: int
    t: int
    status: PenStatus
    azimuth: int = 0
    altitude: int = 0
    pressure: int = 0


@dataclass(frozen=True)
class SampleStream:
    """An ordered recording with strictly increasing timestamps."""

    samples: tuple[Sample, ...]
    source_id: str = "<stream>"
    warnings: tuple[ParseWarning, ...] = ()

    def __post_init__(self):
        if not self.samples:
            raise EmptyInputError(f"{self.source_id}: no samples")
        for prev, cur in zip(self.samples, self.samples[1:]):
            if cur.t <= prev.t:
                raise ValueError(
                    f"{self.source_id}: timestamps must strictly increase "
                    f"({prev.t} then {cur.t})"
                )

    @property
    def t_first(self) -> int:
        return self.samples[0].t

    @property
    def t_last(self) -> int:
        return self.samples[-1].t


@dataclass(frozen=True)
class ParseOptions:
    """Knobs for :func:`parse_session`.

    derive_status_from_pressure: ignore the status column and mark a sample
    on-surface exactly when its pressure is positive. Useful for recordings
    whose status column is unreliable.
    """

    derive_status_from_pressure: bool = False


def parse_session(
    text: str,
    options: ParseOptions | None = None,
    *,
    source_id: str = "<stream>",
) -> SampleStream:
    """Parse one recording from text.

    Rows that repeat the previous timestamp are dropped (the first row wins)
    and recorded in ``stream.warnings``. Blank lines are skipped. Raises
    ParseError for a malformed row or a column count that changes mid-file,
    TimestampOrderError when timestamps decrease, and EmptyInputError when no
    sample rows remain.
    """
    opts = options or ParseOptions()
    samples: list[Sample] = []
    warnings: list[ParseWarning] = []
    width: int | None = None
    last_t: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split()
        if not fields:
            continue
        if width is None:
            if len(fields) not in (4, 7):
                raise ParseError(f"expected 4 or 7 columns, got {len(fields)}", lineno)
            width = len(fields)
        elif len(fields) != width:
            raise ParseError(f"expected {width} columns, got {len(fields)}", lineno)
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise ParseError(f"non-integer field in {raw.strip()!r}", lineno) from None
        x, y, t, status_raw = values[:4]
        azimuth, altitude, pressure = values[4:] or (0, 0, 0)
        if status_raw not in (0, 1):
            raise ParseError(f"status must be 0 or 1, got {status_raw}", lineno)
        if pressure < 0:
            raise ParseError(f"negative pressure {pressure}", lineno)
        if opts.derive_status_from_pressure:
            status = PenStatus.ON_SURFACE if pressure > 0 else PenStatus.IN_AIR
        else:
            status = PenStatus(status_raw)
        if last_t is not None:
            if t < last_t:
                raise TimestampOrderError(
                    f"timestamp {t} after {last_t}", lineno
                )
            if t == last_t:
                warnings.append(ParseWarning(lineno, f"duplicate timestamp {t} dropped"))
                continue
        samples.append(Sample(x, y, t, status, azimuth, altitude, pressure))
        last_t = t
    if not samples:
        raise EmptyInputError(f"{source_id}: no samples")
    return SampleStream(tuple(samples), source_id, tuple(warnings))


def read_session(path: str | Path, options: ParseOptions | None = None) -> SampleStream:
    """Read and parse one recording file."""
    p = Path(path)
    text = p.read_text(encoding="utf-8-sig")
    return parse_session(text, options, source_id=str(p))


def serialize_session(stream: SampleStream) -> str:
    """Render a stream to seven-column text; parse -> serialize -> parse is identity."""
    lines = [
        f"{s.x} {s.y} {s.t} {int(s.status)} {s.azimuth} {s.altitude} {s.pressure}"
        for s in stream.samples
    ]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, slots=True)
class ManifestRecord:
    """One corpus file with its labels."""

    path: Path
    database: str
    task: str
    subject: str
    cohort: str


@dataclass(frozen=True)
class CorpusManifest:
    records: tuple[ManifestRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def load_manifest(text: str, base_dir: str | Path | None = None) -> CorpusManifest:
    """Parse a corpus manifest from CSV text.

    A header-only manifest is valid and empty. Raises ManifestError for a
    missing or misspelled header, a row with the wrong field count, an empty
    label, or a duplicate (database, task, subject, path) combination.
    """
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise ManifestError("missing manifest header")
    header = tuple(h.strip() for h in rows[0])
    if header != MANIFEST_HEADER:
        raise ManifestError(
            f"bad manifest header {','.join(rows[0])!r}; "
            f"expected {','.join(MANIFEST_HEADER)!r}"
        )
    base = Path(base_dir) if base_dir is not None else None
    records: list[ManifestRecord] = []
    seen: set[tuple[str, str, str, str]] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(MANIFEST_HEADER):
            raise ManifestError(f"row {lineno}: expected {len(MANIFEST_HEADER)} fields, got {len(row)}")
        path_str, database, task, subject, cohort = (f.strip() for f in row)
        for name, value in zip(MANIFEST_HEADER, (path_str, database, task, subject, cohort)):
            if not value:
                raise ManifestError(f"row {lineno}: empty {name}")
        key = (database, task, subject, path_str)
        if key in seen:
            raise ManifestError(f"row {lineno}: duplicate record {key}")
        seen.add(key)
        path = Path(path_str)
        if base is not None and not path.is_absolute():
            path = base / path
        records.append(ManifestRecord(path, database, task, subject, cohort))
    return CorpusManifest(tuple(records))


def read_manifest(path: str | Path) -> CorpusManifest:
    """Read a manifest file, resolving relative paths against its directory."""
    p = Path(path)
    return load_manifest(p.read_text(encoding="utf-8-sig"), base_dir=p.parent)


@dataclass(frozen=True)
class ValidationReport:
    """Quick-look statistics for a parsed recording."""

    source_id: str
    n_samples: int
    t_first: int
    t_last: int
    n_status_transitions: int
    pressure_min: int
    pressure_max: int
    n_warnings: int

    @property
    def span(self) -> int:
        return self.t_last - self.t_first


def validate_stream(stream: SampleStream) -> ValidationReport:
    samples = stream.samples
    transitions = sum(
        1 for a, b in zip(samples, samples[1:]) if a.status != b.status
    )
    pressures = [s.pressure for s in samples]
    return ValidationReport(
        source_id=stream.source_id,
        n_samples=len(samples),
        t_first=samples[0].t,
        t_last=samples[-1].t,
        n_status_transitions=transitions,
        pressure_min=min(pressures),
        pressure_max=max(pressures),
        n_warnings=len(stream.warnings),
    )
