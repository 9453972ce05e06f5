"""Domain thesaurus loading and n-gram membership features.

The thesaurus holds three phrase lists (PERIOD, ARTEFACT, MATERIAL); PERIOD
phrases may carry a year range used by time normalization.  Membership is
token-level: a token is positive for a list iff it sits inside a full,
contiguous, case-insensitive occurrence of one of that list's phrases.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .chrono import YearRange

LIST_NAMES = ("PERIOD", "ARTEFACT", "MATERIAL")


class ThesaurusError(ValueError):
    pass


@dataclass
class Thesaurus:
    lists: dict = field(default_factory=lambda: {name: set() for name in LIST_NAMES})
    period_ranges: dict = field(default_factory=dict)

    def max_phrase_len(self) -> int:
        lengths = [len(p) for phrases in self.lists.values() for p in phrases]
        return max(lengths, default=0)

    def period_range(self, surface: str) -> Optional[YearRange]:
        return self.period_ranges.get(" ".join(surface.lower().split()))


def load_thesaurus(stream) -> Thesaurus:
    """Parse TSV lines ``LIST<TAB>phrase`` (PERIOD rows may add start/end years)."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    thesaurus = Thesaurus()
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        list_name = fields[0].strip().upper()
        if list_name not in LIST_NAMES:
            raise ThesaurusError(f"unknown list {fields[0]!r} at line {line_no}")
        if len(fields) < 2 or not fields[1].strip():
            raise ThesaurusError(f"missing phrase at line {line_no}")
        phrase = tuple(fields[1].lower().split())
        thesaurus.lists[list_name].add(phrase)
        if len(fields) >= 4:
            if list_name != "PERIOD":
                raise ThesaurusError(f"year range on non-PERIOD row at line {line_no}")
            try:
                start, end = int(fields[2]), int(fields[3])
            except ValueError:
                raise ThesaurusError(f"bad year range at line {line_no}") from None
            thesaurus.period_ranges[" ".join(phrase)] = YearRange(start, end)
    return thesaurus


def membership_features(thesaurus: Thesaurus, surfaces: Sequence[str]) -> list:
    """Per-token {list_name: bool} flags for phrase-occurrence membership.

    Token i is positive for a list iff some phrase of that list matches a
    contiguous lowercased n-gram covering position i.  All n-grams are
    scanned; overlapping matches all count.
    """
    lowered = [s.lower() for s in surfaces]
    flags = [{name: False for name in LIST_NAMES} for _ in surfaces]
    for name in LIST_NAMES:
        for phrase in thesaurus.lists[name]:
            n = len(phrase)
            for start in range(len(lowered) - n + 1):
                if tuple(lowered[start:start + n]) == phrase:
                    for i in range(start, start + n):
                        flags[i][name] = True
    return flags
