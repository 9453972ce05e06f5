"""Greedy longest-match subword encoding, BPE-style vocabulary induction,
and tokenization fertility reports.

A vocabulary is a flat set of pieces; pieces that may only continue a word
carry the "##" prefix.  Encoding repeatedly takes the longest piece matching
the remaining suffix of the word; a word with any unmatchable remainder
encodes to the single unknown piece.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

UNK = "[UNK]"
MAX_PIECES_PER_SENTENCE = 512


@dataclass
class SubwordVocab:
    pieces: set
    unk_piece: str = UNK
    max_word_chars: int = 100

    def __post_init__(self):
        self.pieces = set(self.pieces)
        self.pieces.add(self.unk_piece)
        if any(not p for p in self.pieces):
            raise ValueError("vocabulary contains an empty piece")

    def __contains__(self, piece: str) -> bool:
        return piece in self.pieces

    def __len__(self) -> int:
        return len(self.pieces)

    def to_text(self) -> str:
        return "\n".join(sorted(self.pieces)) + "\n"

    @classmethod
    def from_text(cls, text: str, unk_piece: str = UNK) -> "SubwordVocab":
        pieces = {line.strip() for line in text.splitlines() if line.strip()}
        return cls(pieces, unk_piece)


@dataclass
class FertilityReport:
    word_count: int
    piece_count: int
    pieces_per_word: Fraction
    oversize_sentences: int

    def to_csv(self) -> str:
        header = "word_count,piece_count,pieces_per_word,oversize_sentences"
        ratio = float(self.pieces_per_word) if self.word_count else 0.0
        return f"{header}\n{self.word_count},{self.piece_count},{ratio:.6f},{self.oversize_sentences}\n"


def encode_word(vocab: SubwordVocab, word: str) -> list:
    """Encode one word by greedy longest-prefix matching against the vocab."""
    if not word or any(c.isspace() for c in word):
        raise ValueError(f"word must be non-empty and whitespace-free: {word!r}")
    if len(word) > vocab.max_word_chars:
        return [vocab.unk_piece]
    pieces = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while start < end:
            candidate = word[start:end]
            if start > 0:
                candidate = "##" + candidate
            if candidate in vocab.pieces:
                match = candidate
                break
            end -= 1
        if match is None:
            return [vocab.unk_piece]
        pieces.append(match)
        start = end
    return pieces


def encode_sentence(vocab: SubwordVocab, sentence: Iterable) -> list:
    """Concatenated encode_word over a sentence of surfaces (or Tokens)."""
    pieces = []
    for word in sentence:
        surface = getattr(word, "surface", word)
        pieces.extend(encode_word(vocab, surface))
    return pieces


def _word_to_symbols(word: str) -> tuple:
    return (word[0],) + tuple("##" + c for c in word[1:])


def induce_vocab(corpus: Iterable[str], target_size: int) -> SubwordVocab:
    """Induce a vocabulary by iterative pair merging (BPE-style).

    Starts from the corpus alphabet (continuation characters marked "##")
    plus the unknown piece, then repeatedly merges the most frequent adjacent
    pair, ties broken lexicographically, until ``target_size`` pieces exist
    or no pair occurs twice.
    """
    word_freq = Counter()
    for word in corpus:
        surface = getattr(word, "surface", word)
        if surface:
            word_freq[surface] += 1
    if not word_freq:
        raise ValueError("cannot induce a vocabulary from an empty corpus")

    alphabet = set()
    for word in word_freq:
        alphabet.update(_word_to_symbols(word))
    if target_size <= len(alphabet) + 1:
        raise ValueError(
            f"target_size {target_size} must exceed alphabet size {len(alphabet)} + 1"
        )

    pieces = set(alphabet) | {UNK}
    words = {w: list(_word_to_symbols(w)) for w in word_freq}
    while len(pieces) < target_size:
        pair_freq = Counter()
        for word, symbols in words.items():
            n = word_freq[word]
            for a, b in zip(symbols, symbols[1:]):
                pair_freq[(a, b)] += n
        if not pair_freq:
            break
        best = min(pair_freq, key=lambda p: (-pair_freq[p], p))
        if pair_freq[best] < 2:
            break
        a, b = best
        merged = a + b[2:]
        for word, symbols in words.items():
            out = []
            i = 0
            while i < len(symbols):
                if i + 1 < len(symbols) and symbols[i] == a and symbols[i + 1] == b:
                    out.append(merged)
                    i += 2
                else:
                    out.append(symbols[i])
                    i += 1
            words[word] = out
        pieces.add(merged)
    return SubwordVocab(pieces)


def fertility(vocab: SubwordVocab, docs: Sequence) -> FertilityReport:
    """Aggregate pieces-per-word over documents (sentences of tokens)."""
    word_count = 0
    piece_count = 0
    oversize = 0
    for doc in docs:
        for sentence in doc.sentences:
            pieces = encode_sentence(vocab, sentence)
            word_count += len(sentence)
            piece_count += len(pieces)
            if len(pieces) > MAX_PIECES_PER_SENTENCE:
                oversize += 1
    ratio = Fraction(piece_count, word_count) if word_count else Fraction(0)
    return FertilityReport(word_count, piece_count, ratio, oversize)
