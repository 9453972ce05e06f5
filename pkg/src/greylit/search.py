"""Page-level entity-aware inverted index with TF-IDF ranking and
entity/date/facet/geo filtering.

The retrieval unit is a page.  A query ANDs together: per-type entity terms
(exact match against the page's normalized entity lists), a year-range filter
(contain or overlap against the page's ranges), facet filters on document
type and subject, a point-in-polygon test on the page coordinate, and full
text (every query term must occur on the page).  Survivors are ranked by

    score = sum_t sqrt(tf(t)) * idf(t)^2 / sqrt(|page|),
    idf(t) = 1 + ln(N / (df(t) + 1))

over the distinct query terms present, i.e. classic TF-IDF with a
field-length norm: the shorter the page, the higher the relevance.
"""

from __future__ import annotations

import json
import math
import pathlib
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .chrono import YearRange

ENTITY_TYPES = ("ART", "CON", "LOC", "MAT", "PER", "SPE")
FACET_FIELDS = ("doc_type", "subject")
INDEX_FORMAT = "page-index/1"
SNIPPET_WIDTH = 160

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class SearchError(ValueError):
    """Malformed page record or index state."""


class QueryError(ValueError):
    """Invalid query; carries a stable error code."""

    def __init__(self, message: str, code: str = "invalid_query"):
        super().__init__(message)
        self.code = code


def tokenize(text: str) -> list:
    """Lowercase terms split on non-alphanumeric characters (and '_')."""
    return _TOKEN_RE.findall(text.lower())


def _normalize_surface(surface: str) -> str:
    return " ".join(surface.lower().split())


@dataclass
class PageMetadata:
    doc_type: str = ""
    subject: str = ""
    coord: Optional[tuple] = None  # (lon, lat)

    def to_json(self) -> dict:
        return {"doc_type": self.doc_type, "subject": self.subject,
                "coord": list(self.coord) if self.coord else None}


@dataclass
class PageRecord:
    doc_id: str
    page_no: int
    text: str = ""
    entities: dict = field(default_factory=dict)
    year_ranges: list = field(default_factory=list)
    metadata: PageMetadata = field(default_factory=PageMetadata)

    def __post_init__(self):
        if not self.doc_id:
            raise SearchError("page record needs a doc_id")
        if self.page_no < 1:
            raise SearchError(f"page_no must be >= 1, got {self.page_no}")
        normalized = {}
        for etype, surfaces in self.entities.items():
            if etype not in ENTITY_TYPES:
                raise SearchError(f"unknown entity type {etype!r}")
            normalized[etype] = sorted({_normalize_surface(s) for s in surfaces})
        self.entities = normalized

    @property
    def key(self) -> tuple:
        return (self.doc_id, self.page_no)

    @classmethod
    def from_json(cls, payload: dict) -> "PageRecord":
        if not isinstance(payload, dict):
            raise SearchError("page record must be an object")
        try:
            doc_id = payload["doc_id"]
            page_no = int(payload["page_no"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SearchError(f"page record needs doc_id and page_no: {exc}") from None
        ranges = []
        for pair in payload.get("year_ranges", []):
            try:
                start, end = int(pair[0]), int(pair[1])
            except (TypeError, ValueError, IndexError):
                raise SearchError(f"bad year range {pair!r}") from None
            if start > end:
                raise SearchError(f"year range start {start} after end {end}")
            ranges.append(YearRange(start, end))
        meta = payload.get("metadata", {}) or {}
        coord = meta.get("coord")
        if coord is not None:
            try:
                coord = (float(coord[0]), float(coord[1]))
            except (TypeError, ValueError, IndexError):
                raise SearchError(f"bad coordinate {coord!r}") from None
        entities = payload.get("entities", {}) or {}
        if not isinstance(entities, dict):
            raise SearchError("entities must map entity types to surface lists")
        return cls(
            doc_id=str(doc_id),
            page_no=page_no,
            text=str(payload.get("text", "")),
            entities={k: list(v) for k, v in entities.items()},
            year_ranges=ranges,
            metadata=PageMetadata(str(meta.get("doc_type", "")), str(meta.get("subject", "")), coord),
        )

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "page_no": self.page_no,
            "text": self.text,
            "entities": self.entities,
            "year_ranges": [[r.start, r.end] for r in self.year_ranges],
            "metadata": self.metadata.to_json(),
        }


@dataclass(frozen=True)
class DateFilter:
    mode: str  # "contain" or "overlap"
    start: int
    end: int


@dataclass
class Query:
    entities: dict = field(default_factory=dict)
    date: Optional[DateFilter] = None
    fulltext: Optional[str] = None
    facets: dict = field(default_factory=dict)
    polygon: Optional[list] = None
    page_from: int = 0
    page_size: int = 10

    KNOWN_KEYS = ("entities", "date", "fulltext", "facets", "polygon", "page")

    @classmethod
    def from_json(cls, payload: dict) -> "Query":
        if not isinstance(payload, dict):
            raise QueryError("query must be an object")
        unknown = set(payload) - set(cls.KNOWN_KEYS)
        if unknown:
            raise QueryError(f"unknown query fields: {sorted(unknown)}")
        query = cls()

        entities = payload.get("entities", {}) or {}
        if not isinstance(entities, dict):
            raise QueryError("entities must map entity types to term lists")
        for etype, terms in entities.items():
            if etype not in ENTITY_TYPES:
                raise QueryError(f"unknown entity type {etype!r}")
            if isinstance(terms, str):
                terms = [terms]
            terms = [_normalize_surface(str(t)) for t in terms if str(t).strip()]
            if terms:
                query.entities[etype] = terms

        date = payload.get("date")
        if date is not None:
            if not isinstance(date, dict):
                raise QueryError("date filter must be an object")
            mode = date.get("mode", "contain")
            if mode not in ("contain", "overlap"):
                raise QueryError(f"date mode must be 'contain' or 'overlap', got {mode!r}")
            try:
                start, end = int(date["start"]), int(date["end"])
            except (KeyError, TypeError, ValueError):
                raise QueryError("date filter needs integer start and end") from None
            if start > end:
                raise QueryError(f"date start {start} after end {end}")
            query.date = DateFilter(mode, start, end)

        fulltext = payload.get("fulltext")
        if fulltext is not None:
            if not isinstance(fulltext, str):
                raise QueryError("fulltext must be a string")
            if fulltext.strip():
                query.fulltext = fulltext

        facets = payload.get("facets", {}) or {}
        if not isinstance(facets, dict):
            raise QueryError("facets must be an object")
        for fct_field, value in facets.items():
            if fct_field not in FACET_FIELDS:
                raise QueryError(f"unknown facet field {fct_field!r}")
            if not isinstance(value, str):
                raise QueryError(f"facet {fct_field} must be a string")
            if value:
                query.facets[fct_field] = value

        polygon = payload.get("polygon")
        if polygon is not None:
            try:
                polygon = [(float(p[0]), float(p[1])) for p in polygon]
            except (TypeError, ValueError, IndexError):
                raise QueryError("polygon must be a list of [lon, lat] pairs") from None
            if len(polygon) < 3:
                raise QueryError("polygon needs at least 3 vertices")
            query.polygon = polygon

        page = payload.get("page", {}) or {}
        if not isinstance(page, dict):
            raise QueryError("page must be an object")
        try:
            query.page_from = int(page.get("from", 0))
            query.page_size = int(page.get("size", 10))
        except (TypeError, ValueError):
            raise QueryError("page from/size must be integers") from None
        if query.page_from < 0 or query.page_size < 1:
            raise QueryError("page from must be >= 0 and size >= 1")
        return query


@dataclass(frozen=True)
class Hit:
    doc_id: str
    page_no: int
    score: float
    snippet: str

    def to_json(self) -> dict:
        return {"doc_id": self.doc_id, "page_no": self.page_no,
                "score": self.score, "snippet": self.snippet}


@dataclass
class SearchResult:
    total: int
    hits: list
    facets: dict

    def to_json(self) -> dict:
        return {"total": self.total,
                "hits": [h.to_json() for h in self.hits],
                "facets": {f: dict(sorted(c.items())) for f, c in self.facets.items()}}


def point_in_polygon(point: tuple, polygon: Sequence) -> bool:
    """Even-odd ray casting; points on an edge count as inside."""
    x, y = point
    n = len(polygon)
    inside = False
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if _on_segment(x, y, x1, y1, x2, y2):
            return True
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (x2 - x1) * (y - y1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


def _on_segment(x, y, x1, y1, x2, y2) -> bool:
    cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
    scale = max(abs(x2 - x1), abs(y2 - y1), 1.0)
    if abs(cross) > 1e-9 * scale:
        return False
    return min(x1, x2) - 1e-12 <= x <= max(x1, x2) + 1e-12 and \
        min(y1, y2) - 1e-12 <= y <= max(y1, y2) + 1e-12


def snippet(text: str, terms: Sequence[str], width: int = SNIPPET_WIDTH) -> str:
    """A ~width-character window around the first query-term hit, with every
    hit inside the window wrapped in [[..]] markers; the page prefix when
    nothing hits."""
    term_set = {t.lower() for t in terms}
    matches = [m for m in _TOKEN_RE.finditer(text) if m.group().lower() in term_set]
    if not matches:
        return text[:width]
    first = matches[0]
    center = (first.start() + first.end()) // 2
    lo = max(0, center - width // 2)
    hi = min(len(text), lo + width)
    lo = max(0, hi - width)
    out = []
    cursor = lo
    for m in matches:
        if m.start() < lo or m.end() > hi:
            continue
        out.append(text[cursor:m.start()])
        out.append("[[" + m.group() + "]]")
        cursor = m.end()
    out.append(text[cursor:hi])
    return "".join(out)


class SearchIndex:
    """In-memory inverted index over PageRecords, persistable to a directory."""

    def __init__(self):
        self.pages = {}      # key -> PageRecord
        self.postings = {}   # term -> {key: tf}
        self.lengths = {}    # key -> token count

    def __len__(self):
        return len(self.pages)

    def copy(self) -> "SearchIndex":
        clone = SearchIndex()
        clone.pages = dict(self.pages)
        clone.postings = {term: dict(post) for term, post in self.postings.items()}
        clone.lengths = dict(self.lengths)
        return clone

    def index_page(self, record: PageRecord) -> None:
        """Insert or fully replace the page under (doc_id, page_no)."""
        key = record.key
        if key in self.pages:
            self._remove_postings(key)
        self.pages[key] = record
        terms = tokenize(record.text)
        self.lengths[key] = len(terms)
        for term, tf in Counter(terms).items():
            self.postings.setdefault(term, {})[key] = tf

    def index_pages(self, records) -> int:
        count = 0
        for record in records:
            self.index_page(record)
            count += 1
        return count

    def _remove_postings(self, key) -> None:
        for term in set(tokenize(self.pages[key].text)):
            post = self.postings.get(term)
            if post is not None:
                post.pop(key, None)
                if not post:
                    del self.postings[term]
        self.lengths.pop(key, None)

    # -------------------------------------------------------------- scoring

    def score_page(self, terms: Sequence[str], key) -> float:
        """TF-IDF with field-length norm over the distinct query terms."""
        n_pages = len(self.pages)
        length = self.lengths.get(key, 0)
        score = 0.0
        for term in sorted(set(terms)):
            post = self.postings.get(term, {})
            tf = post.get(key, 0)
            if tf == 0:
                continue
            idf = 1.0 + math.log(n_pages / (len(post) + 1))
            score += math.sqrt(tf) * idf * idf / math.sqrt(length)
        return score

    # ------------------------------------------------------------ filtering

    def _matches(self, record: PageRecord, query: Query, terms) -> bool:
        for etype, wanted in query.entities.items():
            have = record.entities.get(etype, [])
            if any(term not in have for term in wanted):
                return False
        if query.date is not None:
            d = query.date
            if d.mode == "contain":
                ok = any(r.start <= d.start and r.end >= d.end for r in record.year_ranges)
            else:
                ok = any(r.start <= d.end and r.end >= d.start for r in record.year_ranges)
            if not ok:
                return False
        for fct_field, value in query.facets.items():
            if getattr(record.metadata, fct_field) != value:
                return False
        if query.polygon is not None:
            if record.metadata.coord is None:
                return False
            if not point_in_polygon(record.metadata.coord, query.polygon):
                return False
        if terms:
            for term in terms:
                if self.postings.get(term, {}).get(record.key, 0) == 0:
                    return False
        return True

    def execute(self, query: Query) -> SearchResult:
        """Filter, rank, facet and paginate."""
        terms = tokenize(query.fulltext) if query.fulltext else []
        survivors = [key for key in sorted(self.pages) if self._matches(self.pages[key], query, terms)]

        facet_counts = {f: Counter() for f in FACET_FIELDS}
        for key in survivors:
            meta = self.pages[key].metadata
            for fct_field in FACET_FIELDS:
                value = getattr(meta, fct_field)
                if value:
                    facet_counts[fct_field][value] += 1

        scored = [(key, self.score_page(terms, key) if terms else 0.0) for key in survivors]
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        window = scored[query.page_from:query.page_from + query.page_size]
        hits = [
            Hit(key[0], key[1], score, snippet(self.pages[key].text, terms))
            for key, score in window
        ]
        return SearchResult(len(survivors), hits, facet_counts)

    # ---------------------------------------------------------- persistence

    def save(self, directory) -> None:
        directory = pathlib.Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with directory.joinpath("pages.jsonl").open("w", encoding="utf-8") as fh:
            for key in sorted(self.pages):
                fh.write(json.dumps(self.pages[key].to_json(), sort_keys=True) + "\n")
        meta = {"format": INDEX_FORMAT, "pages": len(self.pages)}
        directory.joinpath("meta.json").write_text(json.dumps(meta, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, directory) -> "SearchIndex":
        directory = pathlib.Path(directory)
        meta = json.loads(directory.joinpath("meta.json").read_text(encoding="utf-8"))
        if meta.get("format") != INDEX_FORMAT:
            raise SearchError(f"unsupported index format {meta.get('format')!r}")
        index = cls()
        with directory.joinpath("pages.jsonl").open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    index.index_page(PageRecord.from_json(json.loads(line)))
        return index


def read_page_records(stream) -> list:
    """Parse a JSON-lines (or JSON array) stream of page records."""
    if hasattr(stream, "read"):
        stream = stream.read()
    text = stream.strip()
    if not text:
        return []
    if text.startswith("["):
        return [PageRecord.from_json(item) for item in json.loads(text)]
    return [PageRecord.from_json(json.loads(line)) for line in text.splitlines() if line.strip()]
