import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greylit.chrono import (
    EntityTypeStats,
    YearRange,
    entity_stats,
    entity_stats_csv,
    normalize,
    year_histogram,
)


class Span:
    def __init__(self, etype, surface):
        self.etype = etype
        self.surface = surface


@pytest.mark.parametrize(
    "text,expected",
    [
        ("600 CE", (600, 600)),
        ("100 BCE", (-100, -100)),
        ("1400 BP", (550, 550)),  # 1950 - 1400
        ("44 AD", (44, 44)),
        ("12 BC", (-12, -12)),
        ("1200 n.Chr.", (1200, 1200)),
        ("800 v.Chr.", (-800, -800)),
        ("800 v. Chr.", (-800, -800)),
        ("10th century", (900, 1000)),
        ("start of 10th century", (900, 925)),
        ("begin of the 9th century", (800, 825)),
        ("end of 10th century", (975, 1000)),
        ("late 10th century", (975, 1000)),
        ("mid 10th century", (925, 975)),
        ("12e eeuw", (1100, 1200)),
        ("begin van de 12e eeuw", (1100, 1125)),
        ("3rd century BCE", (-300, -200)),
        ("1st century", (0, 100)),
        ("2000 - 800 BCE", (-2000, -800)),
        ("100 - 200 CE", (100, 200)),
        ("100 BCE - 200 CE", (-100, 200)),
        ("1400 - 1200 BP", (550, 750)),
    ],
)
def test_normalize_fixtures(text, expected):
    assert normalize(text) == YearRange(*expected)


@pytest.mark.parametrize(
    "text",
    ["150 - 210", "105-150", "geen datum", "", "put 3", "0th century", "150 ±"],
)
def test_normalize_rejects(text):
    assert normalize(text) is None


def test_normalize_uses_thesaurus(fixture_thesaurus):
    assert normalize("bronze age", fixture_thesaurus) == YearRange(-2000, -800)
    assert normalize("Bronze  Age", fixture_thesaurus) == YearRange(-2000, -800)
    assert normalize("onbekende periode", fixture_thesaurus) is None


def test_normalize_thesaurus_takes_precedence(fixture_thesaurus):
    # also parseable as a plain period name; the gazetteer answers first
    assert normalize("romeinse tijd", fixture_thesaurus) == YearRange(-12, 450)


@given(st.integers(min_value=0, max_value=100000))
def test_normalize_bp_arithmetic(n):
    assert normalize(f"{n} BP") == YearRange(1950 - n, 1950 - n)


@given(st.integers(min_value=1, max_value=300))
def test_century_quarter_width(k):
    r = normalize(f"start of {k}th century")
    assert r.end - r.start == 25
    r = normalize(f"end of {k}th century")
    assert r.end - r.start == 25


@given(st.sampled_from(["600 CE", "100 BCE", "9th century", "mid 4th century", "1 BP"]))
def test_normalize_ordered_and_deterministic(text):
    first = normalize(text)
    assert first == normalize(text)
    assert first.start <= first.end


# ------------------------------------------------------------------ histogram


def test_histogram_overlapping_ranges():
    hist = year_histogram([YearRange(0, 2), YearRange(1, 3)])
    assert hist.counts == {0: 1, 1: 2, 2: 2, 3: 1}


def test_histogram_empty():
    assert year_histogram([]).counts == {}


def test_histogram_floor_clipping():
    hist = year_histogram([YearRange(-12000, -9000)])
    assert min(hist.counts) == -10000
    assert max(hist.counts) == -9000
    assert all(c == 1 for c in hist.counts.values())


def test_histogram_drops_fully_submerged_range():
    assert year_histogram([YearRange(-20000, -15000)]).counts == {}


@given(
    st.lists(
        st.tuples(st.integers(-11000, 2000), st.integers(0, 500)).map(
            lambda t: YearRange(t[0], t[0] + t[1])
        ),
        max_size=10,
    )
)
@settings(max_examples=60)
def test_histogram_total_mass(ranges):
    hist = year_histogram(ranges)
    clipped = sum(
        max(0, r.end - max(r.start, hist.floor_year) + 1) for r in ranges if r.end >= hist.floor_year
    )
    assert hist.total_mass() == clipped


def test_histogram_csv():
    hist = year_histogram([YearRange(1, 2)])
    assert hist.to_csv() == "year,count\n1,1\n2,1\n"


# --------------------------------------------------------------- entity stats


def test_entity_stats_counts_and_top():
    spans = [Span("CON", "pit")] * 3 + [Span("CON", "ditch")]
    stats = entity_stats(spans)
    assert stats["CON"] == EntityTypeStats(4, 2, ["pit", "ditch"])
    assert stats["ART"].total == 0


def test_entity_stats_empty():
    stats = entity_stats([])
    assert all(s.total == 0 and s.unique == 0 and s.top == [] for s in stats.values())


def test_entity_stats_top5_tie_break():
    spans = [Span("ART", s) for s in ["urn", "pot", "axe", "urn", "axe", "blade"]]
    assert entity_stats(spans)["ART"].top == ["axe", "urn", "blade", "pot"]


@given(st.lists(st.tuples(st.sampled_from(["ART", "PER"]), st.sampled_from("abcdefg")), max_size=30))
@settings(max_examples=60)
def test_entity_stats_matches_recount(pairs):
    spans = [Span(e, s) for e, s in pairs]
    stats = entity_stats(spans)
    for etype in ("ART", "PER"):
        surfaces = [s for e, s in pairs if e == etype]
        assert stats[etype].total == len(surfaces)
        assert stats[etype].unique == len(set(surfaces))
        expected_top = sorted(set(surfaces), key=lambda x: (-surfaces.count(x), x))[:5]
        assert stats[etype].top == expected_top


def test_entity_stats_csv_shape():
    csv = entity_stats_csv(entity_stats([Span("PER", "iron age")]))
    lines = csv.splitlines()
    assert lines[0] == "entity_type,total,unique,top_5"
    assert 'PER,1,1,"iron age"' in lines
    assert lines[-1].startswith("Total,1,1")
