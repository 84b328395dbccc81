"""Splitting a recording into on-surface, short in-air, and long in-air strokes.

A digitizer reports hover samples only while the pen stays within tracking
range of the surface. Once the pen moves beyond that range the device records
nothing, so a long in-air movement survives only as an oversized jump between
consecutive timestamps. Segmentation therefore works on inter-sample
intervals: a detected gap becomes a long in-air stroke, and every other
interval takes the class of its earlier sample. Maximal runs of same-class
intervals form strokes, which tile [t_first, t_last] exactly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from .errors import InsufficientDataError
from .ingest import PenStatus, Sample, SampleStream


class StrokeClass(Enum):
    ON_SURFACE = "on_surface"
    IN_AIR_SHORT = "in_air_short"
    IN_AIR_LONG = "in_air_long"

    @classmethod
    def from_status(cls, status: PenStatus) -> "StrokeClass":
        return cls.ON_SURFACE if status == PenStatus.ON_SURFACE else cls.IN_AIR_SHORT


class Gap(NamedTuple):
    """Oversized interval between samples ``index`` and ``index + 1``."""

    index: int
    start_t: int
    end_t: int


@dataclass(frozen=True)
class SegmentationConfig:
    """Gap detection knobs.

    An interval is a gap when it exceeds
    ``max(gap_factor * modal_period, min_gap_ticks)`` strictly.
    ``min_gap_ticks`` defaults to modal_period + 1, so at the default settings
    nothing under twice the sampling period can ever be a gap.
    """

    gap_factor: float | Fraction = 3.0
    min_gap_ticks: int | None = None

    def __post_init__(self):
        if not self.gap_factor > 1:
            raise ValueError(f"gap_factor must be > 1, got {self.gap_factor}")
        if self.min_gap_ticks is not None and self.min_gap_ticks < 1:
            raise ValueError("min_gap_ticks must be >= 1")

    def gap_threshold(self, period: int) -> float | Fraction:
        floor = self.min_gap_ticks if self.min_gap_ticks is not None else period + 1
        return max(self.gap_factor * period, floor)


@dataclass(frozen=True)
class Stroke:
    """A maximal same-class span. ``sample_range`` is a half-open index
    interval into the source stream; empty for IN_AIR_LONG strokes, which own
    no samples."""

    cls: StrokeClass
    start_t: int
    end_t: int
    sample_range: tuple[int, int]

    @property
    def duration(self) -> int:
        return self.end_t - self.start_t

    @property
    def n_samples(self) -> int:
        return self.sample_range[1] - self.sample_range[0]


@dataclass(frozen=True)
class SessionSegmentation:
    """Ordered strokes plus per-class totals; strokes tile the recording."""

    strokes: tuple[Stroke, ...]
    nominal_period: int
    class_times: dict[StrokeClass, int]
    class_counts: dict[StrokeClass, int]

    @property
    def total_time(self) -> int:
        return sum(self.class_times.values())


def nominal_period(stream: SampleStream) -> int:
    """Modal inter-sample difference; ties resolve to the smaller value."""
    if len(stream.samples) < 2:
        raise InsufficientDataError(
            f"{stream.source_id}: nominal period needs at least 2 samples"
        )
    counts = Counter(
        b.t - a.t for a, b in zip(stream.samples, stream.samples[1:])
    )
    best = max(counts.values())
    return min(d for d, c in counts.items() if c == best)


def detect_gaps(
    stream: SampleStream, config: SegmentationConfig | None = None
) -> tuple[Gap, ...]:
    """Ordered oversized intervals, each strictly above the gap threshold."""
    cfg = config or SegmentationConfig()
    threshold = cfg.gap_threshold(nominal_period(stream))
    samples = stream.samples
    return tuple(
        Gap(i, samples[i].t, samples[i + 1].t)
        for i in range(len(samples) - 1)
        if samples[i + 1].t - samples[i].t > threshold
    )


def _run_stroke(samples: tuple[Sample, ...], first: int, last: int, end_t: int) -> Stroke:
    # Run of same-status samples first..last; the caller fixes where the
    # stroke's time span ends (next run start, gap start, or last timestamp).
    return Stroke(
        StrokeClass.from_status(samples[first].status),
        samples[first].t,
        end_t,
        (first, last + 1),
    )


def segment(
    stream: SampleStream, config: SegmentationConfig | None = None
) -> SessionSegmentation:
    """Partition a recording into maximal same-class strokes.

    Every inter-sample interval belongs to exactly one stroke: a detected gap
    becomes an IN_AIR_LONG stroke, any other interval takes the class of its
    earlier sample. A gap splits a surrounding same-status run in two. A final
    sample whose status differs from the last interval's class yields one
    zero-duration stroke, as does a single-sample stream. Per-class times sum
    exactly to t_last - t_first.
    """
    cfg = config or SegmentationConfig()
    samples = stream.samples
    strokes: list[Stroke] = []
    if len(samples) == 1:
        only = samples[0]
        strokes.append(
            Stroke(StrokeClass.from_status(only.status), only.t, only.t, (0, 1))
        )
        period = 0
    else:
        period = nominal_period(stream)
        gap_at = {g.index for g in detect_gaps(stream, cfg)}
        run_start = 0
        for i in range(len(samples) - 1):
            if i in gap_at:
                strokes.append(_run_stroke(samples, run_start, i, samples[i].t))
                strokes.append(
                    Stroke(
                        StrokeClass.IN_AIR_LONG,
                        samples[i].t,
                        samples[i + 1].t,
                        (i + 1, i + 1),
                    )
                )
                run_start = i + 1
            elif samples[i + 1].status != samples[i].status:
                strokes.append(_run_stroke(samples, run_start, i, samples[i + 1].t))
                run_start = i + 1
        strokes.append(_run_stroke(samples, run_start, len(samples) - 1, samples[-1].t))
    times = {c: 0 for c in StrokeClass}
    counts = {c: 0 for c in StrokeClass}
    for s in strokes:
        times[s.cls] += s.duration
        counts[s.cls] += 1
    return SessionSegmentation(tuple(strokes), period, times, counts)
