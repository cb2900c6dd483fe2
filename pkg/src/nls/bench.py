"""Both benchmark axes: design-effort metrics from session transcripts
(RDE) and resource-delta reporting from normalized synthesis reports.

Percentages are computed with exact integer arithmetic and rounded
half-away-from-zero to two decimals — the precision printed in the
comparison tables this feeds.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from nls.errors import NlsError
from nls.extract import HdlArtifact
from nls.session import NoInitialPromptError, SessionState


class UnknownResourceColumnError(NlsError):
    pass


class NonNumericValueError(NlsError):
    pass


class NoUtilizationTableError(NlsError):
    pass


class ZeroBaselineError(NlsError):
    pass


class NoComparableResourcesError(NlsError):
    pass


# -- RDE -----------------------------------------------------------------------

@dataclass(frozen=True)
class RdeMetrics:
    lop: int  # characters, initial prompt
    noa: int  # number of adjustments
    loa: int  # characters, all adjustments
    loc: int  # non-empty lines of generated code

    def __post_init__(self):
        if min(self.lop, self.noa, self.loa, self.loc) < 0:
            raise ValueError("RDE metrics are non-negative")
        if self.noa == 0 and self.loa != 0:
            raise ValueError("no adjustments implies zero adjustment length")

    def to_json(self) -> str:
        return json.dumps({"lop": self.lop, "noa": self.noa,
                           "loa": self.loa, "loc": self.loc}) + "\n"

    def to_csv_row(self) -> str:
        return f"{self.lop},{self.noa},{self.loa},{self.loc}\n"


def _trim_one_newline(text: str) -> str:
    return text[:-1] if text.endswith("\n") else text


def compute_rde(state: SessionState,
                artifacts: list[HdlArtifact] | None = None) -> RdeMetrics:
    """Effort figures for one session.

    LoP counts Unicode scalars of the initial prompt after trimming one
    trailing newline (prompt files routinely end with one). NoA counts
    adjustment entries; LoA sums their lengths. LoC counts non-empty
    lines across the final artifacts, comments included.
    """
    initial = state.initial_prompt
    if initial is None:
        raise NoInitialPromptError("session has no initial prompt")
    if artifacts is None:
        artifacts = state.final_artifacts()
    adjustments = state.adjustments()
    loc = sum(
        1
        for a in artifacts
        for line in a.text.splitlines()
        if line.strip()
    )
    return RdeMetrics(
        lop=len(_trim_one_newline(initial.content)),
        noa=len(adjustments),
        loa=sum(len(e.content) for e in adjustments),
        loc=loc,
    )


# -- resource reports --------------------------------------------------------------

RESOURCE_KEYS = ("LUTs", "LUTRAMs", "Registers", "DSPs", "F7Muxes",
                 "F8Muxes", "BRAM", "BUFGCTRL", "BUFG")

# CSV columns that carry watts rather than a resource count.
_POWER_COLUMNS = {"Power": "total", "DynamicPower": "dynamic"}

_ABSENT = {"", "N/A", "NA", "n/a", "-"}


@dataclass
class ResourceReport:
    design_name: str
    counts: dict[str, int] = field(default_factory=dict)
    power_watts: float | None = None
    power_kind: str = "unspecified"  # dynamic | total | unspecified
    # Timing is not ingested yet; the field is reserved so report files
    # can carry it without a schema break.
    fmax_mhz: float | None = None

    def __post_init__(self):
        unknown = set(self.counts) - set(RESOURCE_KEYS)
        if unknown:
            raise UnknownResourceColumnError(
                f"unknown resource keys: {sorted(unknown)}")
        if self.power_watts is not None and self.power_watts < 0:
            raise ValueError("power must be non-negative")


def _natural(raw: str, row_num: int) -> int:
    raw = raw.strip()
    if not re.fullmatch(r"\d+", raw):
        raise NonNumericValueError(
            f"row {row_num}: {raw!r} is not a natural number")
    return int(raw)


def _watts(raw: str, row_num: int) -> float:
    try:
        value = float(raw.strip())
    except ValueError:
        raise NonNumericValueError(
            f"row {row_num}: {raw!r} is not a number") from None
    if value < 0:
        raise NonNumericValueError(f"row {row_num}: power cannot be negative")
    return value


def parse_resource_csv(file: str | Path | io.TextIOBase) -> list[ResourceReport]:
    """Read resource reports from CSV.

    Long form has header `design,resource,value`; wide form has a
    `design` column plus known resource (and optional power) columns.
    Absent / N/A cells mean the resource was not reported — not zero.
    """
    if isinstance(file, (str, Path)):
        with open(file, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(file))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        return []
    header = [c.strip() for c in rows[0]]

    if [h.lower() for h in header[:3]] == ["design", "resource", "value"]:
        return _parse_long_form(rows[1:])
    if header and header[0].lower() == "design":
        return _parse_wide_form(header, rows[1:])
    raise UnknownResourceColumnError(
        f"unrecognized CSV header: {','.join(header)}")


def _parse_long_form(rows: list[list[str]]) -> list[ResourceReport]:
    order: list[str] = []
    reports: dict[str, ResourceReport] = {}
    for n, row in enumerate(rows, start=2):
        if len(row) < 3:
            raise NonNumericValueError(f"row {n}: expected design,resource,value")
        design, resource, value = (c.strip() for c in row[:3])
        if design not in reports:
            reports[design] = ResourceReport(design_name=design)
            order.append(design)
        rep = reports[design]
        if value in _ABSENT:
            continue
        if resource in _POWER_COLUMNS:
            rep.power_watts = _watts(value, n)
            rep.power_kind = _POWER_COLUMNS[resource]
        elif resource in RESOURCE_KEYS:
            rep.counts[resource] = _natural(value, n)
        else:
            raise UnknownResourceColumnError(
                f"row {n}: unknown resource {resource!r}")
    return [reports[d] for d in order]


def _parse_wide_form(header: list[str], rows: list[list[str]]) -> list[ResourceReport]:
    for col in header[1:]:
        if col not in RESOURCE_KEYS and col not in _POWER_COLUMNS:
            raise UnknownResourceColumnError(f"unknown resource column {col!r}")
    reports = []
    for n, row in enumerate(rows, start=2):
        rep = ResourceReport(design_name=row[0].strip())
        for col, raw in zip(header[1:], row[1:]):
            raw = raw.strip()
            if raw in _ABSENT:
                continue
            if col in _POWER_COLUMNS:
                rep.power_watts = _watts(raw, n)
                rep.power_kind = _POWER_COLUMNS[col]
            else:
                rep.counts[col] = _natural(raw, n)
        reports.append(rep)
    return reports


# Vendor report site types worth keeping, mapped to our resource names.
SITE_TYPE_MAP = {
    "Slice LUTs": "LUTs",
    "Slice Registers": "Registers",
    "DSPs": "DSPs",
    "Block RAM Tile": "BRAM",
    "F7 Muxes": "F7Muxes",
    "F8 Muxes": "F8Muxes",
    "BUFGCTRL": "BUFGCTRL",
}


def parse_vendor_utilization(text: str, design_name: str = "") -> ResourceReport:
    """Pull resource counts out of a pipe-delimited utilization table
    (`| Site Type | Used | ... |`). Rows with site types we do not track
    are ignored."""
    lines = text.splitlines()
    used_col: int | None = None
    report = ResourceReport(design_name=design_name)
    found_table = False
    for line in lines:
        if "|" not in line:
            continue
        cells = [c.strip() for c in line.strip().strip("|").split("|")]
        if "Site Type" in cells and "Used" in cells:
            used_col = cells.index("Used")
            found_table = True
            continue
        if used_col is None or len(cells) <= used_col:
            continue
        resource = SITE_TYPE_MAP.get(cells[0])
        if resource is None:
            continue
        raw = cells[used_col]
        try:
            value = float(raw)
        except ValueError:
            continue
        report.counts[resource] = int(round(value))
    if not found_table:
        raise NoUtilizationTableError("no utilization table in report text")
    return report


# -- percentage deltas ---------------------------------------------------------------

@dataclass(frozen=True)
class DeltaCell:
    candidate: int
    baseline: int
    delta_pct: float  # rounded to 2 decimals, half away from zero
    direction: str  # higher | lower | equal


def delta_pct(candidate: int, baseline: int) -> DeltaCell:
    """Percentage change of candidate relative to baseline.

    Exact integer arithmetic; ties round away from zero, matching the
    two-decimal figures in the printed comparison tables.
    """
    if baseline <= 0:
        raise ZeroBaselineError("baseline of 0 admits no percentage")
    diff = candidate - baseline
    scaled = Fraction(10000 * diff, baseline)  # pct * 100
    n, d = abs(scaled.numerator), scaled.denominator
    hundredths = (2 * n + d) // (2 * d)
    if scaled < 0:
        hundredths = -hundredths
    if diff > 0:
        direction = "higher"
    elif diff < 0:
        direction = "lower"
    else:
        direction = "equal"
    return DeltaCell(candidate=candidate, baseline=baseline,
                     delta_pct=hundredths / 100.0, direction=direction)


@dataclass(frozen=True)
class ComparisonRow:
    resource: str
    candidate: int
    baseline: int
    delta_pct: float | None  # None renders as N/A (zero baseline)
    direction: str | None


def compare_reports(candidate: ResourceReport,
                    baseline: ResourceReport) -> list[ComparisonRow]:
    """One row per resource present in both reports, in canonical
    resource order. Zero-baseline resources become N/A rows."""
    shared = [k for k in RESOURCE_KEYS
              if k in candidate.counts and k in baseline.counts]
    if not any(baseline.counts[k] > 0 for k in shared):
        raise NoComparableResourcesError(
            "reports share no resource with a usable baseline")
    rows = []
    for key in shared:
        c, b = candidate.counts[key], baseline.counts[key]
        if b > 0:
            cell = delta_pct(c, b)
            rows.append(ComparisonRow(key, c, b, cell.delta_pct, cell.direction))
        else:
            rows.append(ComparisonRow(key, c, b, None, None))
    return rows


def render_comparison_text(rows: list[ComparisonRow],
                           candidate: ResourceReport | None = None,
                           baseline: ResourceReport | None = None) -> str:
    headers = ("Resource", "Candidate", "Baseline", "Delta")
    table = [headers]
    for r in rows:
        delta = "N/A" if r.delta_pct is None else f"{r.delta_pct:+.2f}%"
        table.append((r.resource, str(r.candidate), str(r.baseline), delta))
    widths = [max(len(row[i]) for row in table) for i in range(4)]
    lines = []
    for row in table:
        lines.append("  ".join(
            row[0].ljust(widths[0]) if i == 0 else row[i].rjust(widths[i])
            for i in range(4)
        ).rstrip())
    # Power is reported side by side, never as a percentage: the sources
    # mix dynamic and total watts, so a delta would be misleading.
    if candidate is not None and baseline is not None and (
            candidate.power_watts is not None or baseline.power_watts is not None):
        fmt = lambda rep: ("N/A" if rep.power_watts is None
                           else f"{rep.power_watts:g} W ({rep.power_kind})")
        lines.append(f"Power: candidate {fmt(candidate)} vs baseline {fmt(baseline)}")
    return "\n".join(lines) + "\n"


def render_comparison_json(rows: list[ComparisonRow],
                           candidate: ResourceReport | None = None,
                           baseline: ResourceReport | None = None) -> str:
    doc: dict = {
        "cells": [
            {
                "resource": r.resource,
                "candidate": r.candidate,
                "baseline": r.baseline,
                "delta_pct": r.delta_pct,
            }
            for r in rows
        ],
    }
    if candidate is not None and baseline is not None:
        doc["power"] = {
            "candidate_watts": candidate.power_watts,
            "candidate_kind": candidate.power_kind,
            "baseline_watts": baseline.power_watts,
            "baseline_kind": baseline.power_kind,
        }
    return json.dumps(doc, indent=2) + "\n"
