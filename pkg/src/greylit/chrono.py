"""Normalization of time expressions to astronomical year ranges.

Years are signed integers: -2000 means 2000 BCE, there is no special year-0
handling.  ``normalize`` tries, in order: a thesaurus period-name lookup, a
single year with an era marker, a numeric range, and an ordinal century with
an optional start/end/mid modifier.  Bare numeric ranges without an era are
rejected on purpose: they are usually soil grain sizes, not dates.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

BP_PRESENT = 1950
HISTOGRAM_FLOOR = -10000

ENTITY_TYPES = ("ART", "CON", "LOC", "MAT", "PER", "SPE")


@dataclass(frozen=True, order=True)
class YearRange:
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"year range start {self.start} after end {self.end}")


_BCE = r"bce|bc|v\.?\s?chr\.?"
_CE = r"ce|ad|n\.?\s?chr\.?"
_ERA = rf"(?:{_BCE}|{_CE}|bp)"

_YEAR_ERA = re.compile(rf"^(\d+)\s*({_ERA})$")
_RANGE = re.compile(rf"^(\d+)\s*({_ERA})?\s*[-–—]\s*(\d+)\s*({_ERA})?$")
_CENTURY = re.compile(
    r"^(?:(start|begin|end|late|mid|middle|eind|einde|midden)\s+(?:of\s+|van\s+)?)?"
    r"(?:the\s+|de\s+|het\s+)?"
    rf"(\d+)(?:st|nd|rd|th|e)\s+(?:century|eeuw)(?:\s+({_ERA}))?$"
)

_FIRST_QUARTER = ("start", "begin")
_LAST_QUARTER = ("end", "late", "eind", "einde")
_MIDDLE_HALF = ("mid", "middle", "midden")


def _era_kind(marker: Optional[str]) -> str:
    if marker is None:
        return "ce"
    if marker == "bp":
        return "bp"
    if re.fullmatch(_BCE, marker):
        return "bce"
    return "ce"


def _year(value: int, era: str) -> int:
    if era == "bce":
        return -value
    if era == "bp":
        return BP_PRESENT - value
    return value


def _apply_modifier(modifier: Optional[str], start: int, end: int) -> YearRange:
    width = end - start
    if modifier in _FIRST_QUARTER:
        return YearRange(start, int(round(start + width / 4)))
    if modifier in _LAST_QUARTER:
        return YearRange(int(round(end - width / 4)), end)
    if modifier in _MIDDLE_HALF:
        return YearRange(int(round(start + width / 4)), int(round(end - width / 4)))
    return YearRange(start, end)


def normalize(text: str, thesaurus=None) -> Optional[YearRange]:
    """Convert a time-period surface form to a year range, or None."""
    s = " ".join(text.lower().split())
    if not s:
        return None

    if thesaurus is not None:
        hit = thesaurus.period_range(s)
        if hit is not None:
            return hit

    m = _YEAR_ERA.match(s)
    if m:
        year = _year(int(m.group(1)), _era_kind(m.group(2)))
        return YearRange(year, year)

    m = _RANGE.match(s)
    if m:
        a, era_a, b, era_b = m.group(1), m.group(2), m.group(3), m.group(4)
        if era_a is None and era_b is None:
            return None  # bare number pair: grain sizes, not dates
        era_a = era_a if era_a is not None else era_b
        era_b = era_b if era_b is not None else era_a
        years = sorted((_year(int(a), _era_kind(era_a)), _year(int(b), _era_kind(era_b))))
        return YearRange(years[0], years[1])

    m = _CENTURY.match(s)
    if m:
        modifier, k, era = m.group(1), int(m.group(2)), _era_kind(m.group(3))
        if k < 1 or era == "bp":
            return None
        if era == "bce":
            start, end = -100 * k, -100 * (k - 1)
        else:
            start, end = 100 * (k - 1), 100 * k
        return _apply_modifier(modifier, start, end)

    return None


@dataclass
class YearHistogram:
    counts: dict = field(default_factory=dict)
    floor_year: int = HISTOGRAM_FLOOR

    def total_mass(self) -> int:
        return sum(self.counts.values())

    def to_csv(self) -> str:
        lines = ["year,count"]
        lines += [f"{year},{self.counts[year]}" for year in sorted(self.counts)]
        return "\n".join(lines) + "\n"


def year_histogram(ranges: Iterable[YearRange], floor_year: int = HISTOGRAM_FLOOR) -> YearHistogram:
    """Count, for every year inside every range, how often it is covered."""
    counts = Counter()
    for r in ranges:
        start = max(r.start, floor_year)
        if r.end < floor_year:
            continue
        for year in range(start, r.end + 1):
            counts[year] += 1
    return YearHistogram(dict(counts), floor_year)


@dataclass
class EntityTypeStats:
    total: int
    unique: int
    top: list


def entity_stats(spans) -> dict:
    """Per-type totals, distinct-surface counts and top-5 surfaces."""
    by_type = {etype: Counter() for etype in ENTITY_TYPES}
    for span in spans:
        by_type[span.etype][span.surface] += 1
    stats = {}
    for etype, counter in by_type.items():
        top = sorted(counter, key=lambda surf: (-counter[surf], surf))[:5]
        stats[etype] = EntityTypeStats(sum(counter.values()), len(counter), top)
    return stats


def entity_stats_csv(stats: dict) -> str:
    lines = ["entity_type,total,unique,top_5"]
    for etype in ENTITY_TYPES:
        s = stats[etype]
        lines.append(f'{etype},{s.total},{s.unique},"{"; ".join(s.top)}"')
    total = sum(stats[e].total for e in ENTITY_TYPES)
    unique = sum(stats[e].unique for e in ENTITY_TYPES)
    lines.append(f"Total,{total},{unique},")
    return "\n".join(lines) + "\n"
