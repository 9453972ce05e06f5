from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greylit.corpus import TaggedDocument, Token
from greylit.subword import (
    UNK,
    SubwordVocab,
    encode_sentence,
    encode_word,
    fertility,
    induce_vocab,
)

# the generic-Dutch-model pieces for the worked tokenization example
DUTCH_MODEL_PIECES = {
    "In", "put", "twee", "werden", "3", "Swift", "##er", "##ban", "##t",
    "aardewerk", "##scher", "##ven", "aangetroffen", "uit", "het",
    "Midden", "Neo", "##lith", "##icum", ".",
}
EXAMPLE_SENTENCE = (
    "In put twee werden 3 Swifterbant aardewerkscherven "
    "aangetroffen uit het Midden Neolithicum ."
).split()


def test_encode_compound_word():
    vocab = SubwordVocab({"aardewerk", "##scher", "##ven", "##x"})
    assert encode_word(vocab, "aardewerkscherven") == ["aardewerk", "##scher", "##ven"]


def test_encode_whole_word_hit():
    vocab = SubwordVocab({"put", "##ut"})
    assert encode_word(vocab, "put") == ["put"]


def test_encode_unknown_word():
    vocab = SubwordVocab({"put"})
    assert encode_word(vocab, "xyz") == [UNK]


def test_encode_unk_on_partial_failure():
    # prefix matches but the remainder cannot be covered
    vocab = SubwordVocab({"aarde", "##wer"})
    assert encode_word(vocab, "aardewerk") == [UNK]


def test_encode_oversize_word_is_unk():
    vocab = SubwordVocab({"a", "##a"}, max_word_chars=5)
    assert encode_word(vocab, "a" * 6) == [UNK]


def test_encode_sentence_concatenates():
    vocab = SubwordVocab({"de", "kuil", "hier"})
    assert encode_sentence(vocab, ["de", "kuil", "hier"]) == ["de", "kuil", "hier"]


def test_encode_sentence_empty():
    assert encode_sentence(SubwordVocab({"x"}), []) == []


def test_worked_example_counts_20_pieces():
    vocab = SubwordVocab(DUTCH_MODEL_PIECES)
    pieces = encode_sentence(vocab, EXAMPLE_SENTENCE)
    assert len(pieces) == 20
    assert pieces[5:9] == ["Swift", "##er", "##ban", "##t"]
    assert pieces[9:12] == ["aardewerk", "##scher", "##ven"]


def test_vocab_text_round_trip():
    vocab = SubwordVocab({"aardewerk", "##scher", "##ven"})
    again = SubwordVocab.from_text(vocab.to_text())
    assert again.pieces == vocab.pieces


word_st = st.text(alphabet="ab", min_size=1, max_size=8)


@given(st.sets(word_st, min_size=1, max_size=20))
@settings(max_examples=80)
def test_detokenization_round_trip(words):
    # vocab of all words plus all marked characters: everything encodable
    pieces = set(words)
    for w in words:
        pieces.add(w[0])
        pieces.update("##" + c for c in w[1:])
    vocab = SubwordVocab(pieces)
    for w in words:
        enc = encode_word(vocab, w)
        assert all(p in vocab.pieces for p in enc)
        assert UNK not in enc
        assert enc[0] + "".join(p[2:] for p in enc[1:]) == w


# ------------------------------------------------------------ vocab induction


def test_induce_merges_repeated_pair():
    vocab = induce_vocab(["aa", "aa", "aa"], target_size=4)
    assert "aa" in vocab.pieces


def test_induce_rejects_small_target():
    with pytest.raises(ValueError):
        induce_vocab(["aa", "aa"], target_size=3)


def test_induce_single_char_corpus_terminates_early():
    vocab = induce_vocab(["a", "a", "a"], target_size=3)
    assert vocab.pieces == {UNK, "a"}


def test_induce_rejects_empty_corpus():
    with pytest.raises(ValueError):
        induce_vocab([], target_size=10)


def test_induce_tie_break_is_lexicographic():
    # pairs (a,##b) and (b,##a) both occur twice; (a,##b) merges first
    vocab = induce_vocab(["ab", "ab", "ba", "ba"], target_size=6)
    assert "ab" in vocab.pieces
    assert "ba" not in vocab.pieces


@given(st.lists(word_st, min_size=1, max_size=30))
@settings(max_examples=60)
def test_induce_size_bound_and_no_unk_needed(words):
    alphabet = set()
    for w in words:
        alphabet.add(w[0])
        alphabet.update("##" + c for c in w[1:])
    target = len(alphabet) + 2 + 3
    vocab = induce_vocab(words, target_size=target)
    assert len(vocab) <= target
    for w in words:
        assert UNK not in encode_word(vocab, w)


# ----------------------------------------------------------------- fertility


def doc_of(words):
    return TaggedDocument("d", [[Token(w) for w in words]])


def test_fertility_all_in_vocab():
    vocab = SubwordVocab({"de", "kuil"})
    report = fertility(vocab, [doc_of(["de", "kuil"])])
    assert report.pieces_per_word == 1
    assert report.word_count == 2
    assert report.piece_count == 2


def test_fertility_unk_counts_one_piece():
    vocab = SubwordVocab({"de"})
    report = fertility(vocab, [doc_of(["qqq"])])
    assert report.piece_count == 1
    assert report.pieces_per_word == 1


def test_fertility_oversize_sentence_detected():
    vocab = SubwordVocab({"a", "##a"})
    long_sentence = ["aaa"] * 200  # 3 pieces each -> 600 > 512
    report = fertility(vocab, [TaggedDocument("d", [[Token(w) for w in long_sentence]])])
    assert report.oversize_sentences == 1
    assert report.pieces_per_word == 3


def test_fertility_matches_brute_recount(fixture_corpus):
    vocab = SubwordVocab(
        {"de", "het", "een", "uit", "put", "urn", "aardewerk", "##scher", "##ven",
         "vuursteen", "Swifterbant", ".", "##dateert"}
    )
    report = fertility(vocab, fixture_corpus)
    # independent recount, word by word
    words = pieces = 0
    for doc in fixture_corpus:
        for sent in doc.sentences:
            for tok in sent:
                words += 1
                pieces += len(encode_word(vocab, tok.surface))
    assert report.word_count == words
    assert report.piece_count == pieces
    assert report.pieces_per_word == Fraction(pieces, words)
