import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture
def fixture_corpus():
    from greylit import corpus

    return corpus.read_conll(FIXTURES.joinpath("corpus.conll").read_text(encoding="utf-8"))


@pytest.fixture
def fixture_thesaurus():
    from greylit import gazetteer

    return gazetteer.load_thesaurus(FIXTURES.joinpath("thesaurus.tsv").read_text(encoding="utf-8"))
