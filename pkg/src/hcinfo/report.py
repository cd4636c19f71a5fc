"""Report model and its text / JSON / CSV renderings."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .errors import ValidationError

UNITS = ("bits", "bits/s", "s", "ratio", "Hz", "count", "text")
FORMATS = ("text", "json", "csv")


@dataclass(frozen=True)
class Row:
    label: str
    value: float | int | str | None
    unit: str

    def __post_init__(self):
        if self.unit not in UNITS:
            raise ValidationError(f"unknown unit {self.unit!r} for {self.label!r}")
        numeric = isinstance(self.value, (int, float)) and not isinstance(self.value, bool)
        if numeric and self.unit == "text":
            raise ValidationError(f"numeric value {self.label!r} needs a unit")


@dataclass(frozen=True)
class Section:
    title: str
    rows: tuple[Row, ...] = ()


@dataclass
class Report:
    sections: list[Section] = field(default_factory=list)

    def add(self, title: str, rows) -> Section:
        section = Section(title, tuple(Row(*r) if not isinstance(r, Row) else r for r in rows))
        self.sections.append(section)
        return section

    def section(self, title: str) -> Section:
        for s in self.sections:
            if s.title == title:
                return s
        raise KeyError(title)

    def value(self, title: str, label: str):
        for row in self.section(title).rows:
            if row.label == label:
                return row.value
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "sections": [
                {"title": s.title, "rows": [{"label": r.label, "value": r.value, "unit": r.unit} for r in s.rows]}
                for s in self.sections
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        report = cls()
        for s in data["sections"]:
            report.add(s["title"], [Row(r["label"], r["value"], r["unit"]) for r in s["rows"]])
        return report

    def render(self, fmt: str = "text") -> str:
        if fmt == "json":
            return to_json(self)
        if fmt == "csv":
            return to_csv(self)
        if fmt == "text":
            return to_text(self)
        raise ValueError(f"unknown report format {fmt!r}")


def format_number(value: float) -> str:
    """Three decimals; tiny non-zero values keep three significant digits instead."""
    if isinstance(value, int):
        return str(value)
    if not math.isfinite(value):
        return str(value)
    if value != 0 and abs(value) < 0.01:
        return f"{value:.3g}"
    return f"{value:.3f}"


def to_text(report: Report) -> str:
    lines = []
    for s in report.sections:
        lines.append(f"== {s.title} ==")
        for r in s.rows:
            if r.value is None:
                shown = "n/a"
            elif isinstance(r.value, str):
                shown = r.value
            else:
                shown = format_number(r.value)
            unit = "" if r.unit == "text" else f" {r.unit}"
            if r.unit == "ratio" and isinstance(r.value, float):
                unit += f" ({format_number(100 * r.value)}%)"
            lines.append(f"  {r.label}: {shown}{unit}")
    return "\n".join(lines) + "\n"


def to_json(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def from_json(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "label", "value", "unit"])
    for s in report.sections:
        for r in s.rows:
            w.writerow([s.title, r.label, "" if r.value is None else repr(r.value) if isinstance(r.value, float) else r.value, r.unit])
    return buf.getvalue()
