"""Rendering: cohort time tables, p-value tables, and trajectory plots.

All renderers are pure functions of their inputs (no timestamps, no locale),
so identical inputs give byte-identical output.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar, Sequence
from xml.etree import ElementTree as ET

from .features import AnomalyPolicy, CohortSummary, Feature
from .ingest import SampleStream
from .segmentation import SegmentationConfig, SessionSegmentation, StrokeClass
from .stats import ALPHA, RankTestResult


class TableFormat:
    CSV = "csv"
    MARKDOWN = "md"


@dataclass(frozen=True)
class RunConfig:
    """Run-wide knobs shared by the CLI commands.

    The significance level is fixed; it is not a knob.
    """

    gap_factor: float | Fraction = 3.0
    min_gap_ticks: int | None = None
    anomaly_threshold: Fraction = Fraction(7, 10)
    exact_limit: int = 20
    table_format: str = TableFormat.CSV

    SIGNIFICANCE: ClassVar[Fraction] = ALPHA

    def __post_init__(self):
        # fail fast on bad flag values; constructors re-validate on use
        self.segmentation_config()
        self.anomaly_policy()
        if self.exact_limit < 2:
            raise ValueError(f"exact limit must be >= 2, got {self.exact_limit}")
        if self.table_format not in (TableFormat.CSV, TableFormat.MARKDOWN):
            raise ValueError(f"unknown table format {self.table_format!r}")

    def segmentation_config(self) -> SegmentationConfig:
        return SegmentationConfig(self.gap_factor, self.min_gap_ticks)

    def anomaly_policy(self) -> AnomalyPolicy:
        return AnomalyPolicy(self.anomaly_threshold)


TIME_TABLE_COLUMNS = (
    "database",
    "cohort",
    "task",
    "on_surface",
    "in_air_short",
    "in_air_long",
    "strokes_on_surface",
    "strokes_in_air_short",
    "strokes_in_air_long",
)

P_TABLE_COLUMNS = ("task",) + tuple(f"p_{f.value}" for f in Feature)


def _time_cell(mean_time, pct) -> str:
    return f"{float(mean_time):.1f} ({float(pct):.1f}%)"


def _strokes_cell(mean_strokes) -> str:
    return f"{float(mean_strokes):.2f}"


def _p_cell(result: RankTestResult) -> str:
    text = f"{float(result.p):.4f}"
    return text + "*" if result.significant else text


def _csv_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _md_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def format_table(header, rows, fmt: str) -> str:
    """Render a plain header+rows table in the requested format."""
    if fmt == TableFormat.MARKDOWN:
        return _md_table(header, rows)
    return _csv_table(header, rows)


def render_time_table(summaries: Sequence[CohortSummary], fmt: str = TableFormat.CSV) -> str:
    """One row per summary: three "time (pct%)" cells then three mean-stroke
    cells, times and percentages to one decimal, strokes to two."""
    rows = [
        (
            s.database,
            s.cohort,
            s.task,
            _time_cell(s.mean_time_on_surface, s.pct_on_surface),
            _time_cell(s.mean_time_in_air_short, s.pct_in_air_short),
            _time_cell(s.mean_time_in_air_long, s.pct_in_air_long),
            _strokes_cell(s.mean_strokes_on_surface),
            _strokes_cell(s.mean_strokes_in_air_short),
            _strokes_cell(s.mean_strokes_in_air_long),
        )
        for s in summaries
    ]
    return format_table(TIME_TABLE_COLUMNS, rows, fmt)


def render_p_table(results: Sequence[RankTestResult], fmt: str = TableFormat.CSV) -> str:
    """Wide per-task table: one p column per feature, four decimals, ``*``
    marking p < 0.05 (strict). Missing (task, feature) pairs render empty."""
    by_task: dict[str, dict[Feature, RankTestResult]] = {}
    for r in results:
        by_task.setdefault(r.task, {})[r.feature] = r
    rows = []
    for task, cells in by_task.items():
        row = [task]
        for f in Feature:
            row.append(_p_cell(cells[f]) if f in cells else "")
        rows.append(row)
    return format_table(P_TABLE_COLUMNS, rows, fmt)


# SVG layout constants; abstract user units
_SVG_W = 800
_PANEL_H = 300
_STRIP_H = 80
_PANEL_COLORS = {StrokeClass.ON_SURFACE: "#1f6feb", StrokeClass.IN_AIR_SHORT: "#d4a017"}


def _panel(stream: SampleStream, seg: SessionSegmentation, cls: StrokeClass,
           y_offset: int, label: str) -> ET.Element:
    xs = [s.x for s in stream.samples]
    ys = [s.y for s in stream.samples]
    min_x, max_x = min(xs), max(xs)
    min_y, max_y = min(ys), max(ys)
    # 5% margin around the data bounds; degenerate extents get a unit pad
    pad_x = (max_x - min_x) * 0.05 or 1.0
    pad_y = (max_y - min_y) * 0.05 or 1.0
    panel = ET.Element(
        "svg",
        {
            "x": "0",
            "y": str(y_offset),
            "width": str(_SVG_W),
            "height": str(_PANEL_H),
            "viewBox": f"{min_x - pad_x:g} {min_y - pad_y:g} "
                       f"{max_x - min_x + 2 * pad_x:g} {max_y - min_y + 2 * pad_y:g}",
            "preserveAspectRatio": "xMidYMid meet",
        },
    )
    for stroke in seg.strokes:
        if stroke.cls is not cls or stroke.n_samples == 0:
            continue
        lo, hi = stroke.sample_range
        points = " ".join(f"{s.x},{s.y}" for s in stream.samples[lo:hi])
        ET.SubElement(
            panel,
            "polyline",
            {
                "points": points,
                "fill": "none",
                "stroke": _PANEL_COLORS[cls],
                "stroke-width": "2",
                "vector-effect": "non-scaling-stroke",
            },
        )
    title = ET.SubElement(panel, "text", {
        "x": f"{min_x - pad_x:g}",
        "y": f"{min_y - pad_y:g}",
        "dy": "1em",
        "font-size": f"{2 * pad_y:g}",
        "fill": "#666666",
    })
    title.text = label
    return panel


def render_trajectories(stream: SampleStream, seg: SessionSegmentation) -> str:
    """Fixed two-panel figure: on-surface trajectories on top, short in-air
    trajectories below, and a timeline strip marking each long in-air stroke
    with a labeled tick. Returns a well-formed SVG document string."""
    total_h = 2 * _PANEL_H + _STRIP_H
    root = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": str(_SVG_W),
            "height": str(total_h),
            "viewBox": f"0 0 {_SVG_W} {total_h}",
        },
    )
    root.append(_panel(stream, seg, StrokeClass.ON_SURFACE, 0, "on-surface"))
    root.append(_panel(stream, seg, StrokeClass.IN_AIR_SHORT, _PANEL_H, "in-air short"))

    strip = ET.SubElement(root, "g")
    axis_y = 2 * _PANEL_H + _STRIP_H // 2
    left, right = 40, _SVG_W - 20
    ET.SubElement(strip, "line", {
        "x1": str(left), "y1": str(axis_y), "x2": str(right), "y2": str(axis_y),
        "stroke": "#444444", "stroke-width": "1",
    })
    t0, t1 = stream.t_first, stream.t_last
    span = t1 - t0

    def to_x(t: int) -> float:
        if span == 0:
            return float(left)
        return left + (right - left) * (t - t0) / span

    for stroke in seg.strokes:
        if stroke.cls is not StrokeClass.IN_AIR_LONG:
            continue
        x = to_x(stroke.start_t)
        ET.SubElement(strip, "line", {
            "x1": f"{x:g}", "y1": str(axis_y - 14),
            "x2": f"{x:g}", "y2": str(axis_y + 6),
            "stroke": "#c0392b", "stroke-width": "2",
        })
        label = ET.SubElement(strip, "text", {
            "x": f"{x:g}", "y": str(axis_y - 18),
            "font-size": "11", "text-anchor": "middle", "fill": "#c0392b",
        })
        label.text = str(stroke.duration)
    caption = ET.SubElement(strip, "text", {
        "x": str(left), "y": str(axis_y + 24), "font-size": "12", "fill": "#666666",
    })
    caption.text = "in-air long events on the session timeline"
    return ET.tostring(root, encoding="unicode") + "\n"
