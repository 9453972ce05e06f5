"""Corpus data model, CoNLL-style I/O, long-sentence splitting, fold balancing.

The universal corpus unit is a :class:`TaggedDocument`: a list of sentences,
each a list of tokens carrying a surface form, a POS tag (possibly empty) and
an optional gold BIO label.  Labels are plain strings ("O", "B-LOC", "I-PER",
...) over the six entity types in :data:`ENTITY_TYPES`.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

ENTITY_TYPES = ("ART", "CON", "LOC", "MAT", "PER", "SPE")

#: Canonical label inventory: O plus B/I for each entity type (13 labels).
LABELS = ("O",) + tuple(
    f"{tag}-{etype}" for etype in ENTITY_TYPES for tag in ("B", "I")
)

SPLIT_PUNCTUATION = {".", ";", ","}


class CorpusError(ValueError):
    """Malformed corpus input (bad label, bad structure, misaligned data)."""


def parse_label(text: str, line_no: Optional[int] = None) -> str:
    """Validate a BIO label string and return it.

    Accepts "O" or "B-X"/"I-X" with X one of the six entity types.
    """
    if text == "O":
        return text
    if len(text) > 2 and text[1] == "-" and text[0] in ("B", "I"):
        etype = text[2:]
        if etype in ENTITY_TYPES:
            return text
    where = f" at line {line_no}" if line_no is not None else ""
    raise CorpusError(f"invalid BIO label {text!r}{where}")


def label_tag(label: str) -> str:
    return "O" if label == "O" else label[0]


def label_etype(label: str) -> Optional[str]:
    return None if label == "O" else label[2:]


def is_valid_bio(labels: Sequence[str]) -> bool:
    """True iff no I-X starts the sequence or follows a different-type label."""
    prev = "O"
    for lab in labels:
        if label_tag(lab) == "I":
            if label_tag(prev) == "O" or label_etype(prev) != label_etype(lab):
                return False
        prev = lab
    return True


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str = ""
    gold_label: Optional[str] = None

    def __post_init__(self):
        if not self.surface or any(c.isspace() for c in self.surface):
            raise CorpusError(f"token surface must be non-empty and whitespace-free: {self.surface!r}")


Sentence = list  # list[Token]; kept as a plain list per local idiom


@dataclass
class TaggedDocument:
    doc_id: str
    sentences: list = field(default_factory=list)

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    def tokens(self) -> Iterable[Token]:
        for sent in self.sentences:
            yield from sent

    def gold_labels(self) -> list:
        """Per-sentence gold label lists; raises if any token is unlabelled."""
        out = []
        for sent in self.sentences:
            labs = []
            for tok in sent:
                if tok.gold_label is None:
                    raise CorpusError(f"document {self.doc_id!r} has unlabelled token {tok.surface!r}")
                labs.append(tok.gold_label)
            out.append(labs)
        return out


@dataclass
class FoldSplit:
    fold_of_doc: dict
    k: int

    def docs_in_fold(self, fold: int) -> list:
        return sorted(d for d, f in self.fold_of_doc.items() if f == fold)

    def to_csv(self) -> str:
        lines = ["doc_id,fold"]
        lines += [f"{doc},{fold}" for doc, fold in sorted(self.fold_of_doc.items())]
        return "\n".join(lines) + "\n"


def read_conll(stream) -> list:
    """Parse CoNLL-style text into a list of TaggedDocuments.

    Format: one token per line as ``surface<TAB>pos<TAB>label`` (label column
    optional; extra columns ignored), blank line ends a sentence, and a line
    ``#doc <id>`` starts a new document.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    docs: list = []
    cur_doc: Optional[TaggedDocument] = None
    cur_sent: list = []

    def end_sentence():
        nonlocal cur_sent
        if cur_sent:
            cur_doc.sentences.append(cur_sent)
            cur_sent = []

    def end_document(line_no):
        if cur_doc is not None:
            end_sentence()
            if not cur_doc.sentences:
                raise CorpusError(f"document {cur_doc.doc_id!r} has no tokens (line {line_no})")
            docs.append(cur_doc)

    line_no = 0
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if line.startswith("#doc"):
            end_document(line_no)
            doc_id = line[4:].strip()
            if not doc_id:
                raise CorpusError(f"missing document id at line {line_no}")
            cur_doc = TaggedDocument(doc_id)
            continue
        if not line.strip():
            if cur_doc is not None:
                end_sentence()
            continue
        if cur_doc is None:
            raise CorpusError(f"token line before any '#doc' header at line {line_no}")
        fields = line.split("\t")
        surface = fields[0]
        pos = fields[1] if len(fields) > 1 else ""
        label = None
        if len(fields) > 2 and fields[2] != "":
            label = parse_label(fields[2], line_no)
        try:
            cur_sent.append(Token(surface, pos, label))
        except CorpusError as exc:
            raise CorpusError(f"{exc} (line {line_no})") from None
    end_document(line_no + 1)
    return docs


def write_conll(docs: Sequence[TaggedDocument], labels=None) -> str:
    """Render documents back to CoNLL text.

    When ``labels`` is given (per-document, per-sentence label lists parallel
    to the tokens) it is appended as a fourth, prediction column.
    """
    if labels is not None and len(labels) != len(docs):
        raise CorpusError(f"labels for {len(labels)} documents, corpus has {len(docs)}")
    out = []
    for d, doc in enumerate(docs):
        doc_labels = labels[d] if labels is not None else None
        if doc_labels is not None and len(doc_labels) != len(doc.sentences):
            raise CorpusError(f"document {doc.doc_id!r}: {len(doc_labels)} label sentences vs {len(doc.sentences)}")
        out.append(f"#doc {doc.doc_id}")
        for s, sent in enumerate(doc.sentences):
            sent_labels = doc_labels[s] if doc_labels is not None else None
            if sent_labels is not None and len(sent_labels) != len(sent):
                raise CorpusError(
                    f"document {doc.doc_id!r} sentence {s}: {len(sent_labels)} labels vs {len(sent)} tokens"
                )
            for t, tok in enumerate(sent):
                cols = [tok.surface]
                if sent_labels is not None:
                    cols += [tok.pos, tok.gold_label or "", parse_label(sent_labels[t])]
                elif tok.gold_label is not None:
                    cols += [tok.pos, tok.gold_label]
                elif tok.pos:
                    cols.append(tok.pos)
                out.append("\t".join(cols))
            out.append("")
    return "\n".join(out) + "\n"


def _split_sentence(tokens: list, soft_limit: int, hard_limit: int) -> list:
    parts = []
    rest = tokens
    while len(rest) > hard_limit:
        cut = hard_limit
        # last '.', ';' or ',' among 1-based positions (soft_limit, hard_limit]
        for pos in range(hard_limit, soft_limit, -1):
            if rest[pos - 1].surface in SPLIT_PUNCTUATION:
                cut = pos
                break
        parts.append(rest[:cut])
        rest = rest[cut:]
    if rest:
        parts.append(rest)
    return parts


def split_long_sentences(doc: TaggedDocument, soft_limit: int = 60, hard_limit: int = 90) -> TaggedDocument:
    """Break over-long sentences after a punctuation mark in the soft window.

    Iterates until every sentence has at most ``hard_limit`` tokens: the break
    goes after the last '.', ';' or ',' found at 1-based positions
    (soft_limit, hard_limit], or after position ``hard_limit`` when the window
    has no punctuation.  Tokens travel unchanged, order preserved.
    """
    if soft_limit >= hard_limit:
        raise ValueError(f"soft_limit must be < hard_limit, got {soft_limit} >= {hard_limit}")
    out = TaggedDocument(doc.doc_id)
    for sent in doc.sentences:
        out.sentences.extend(_split_sentence(sent, soft_limit, hard_limit))
    return out


def make_folds(docs: Sequence[TaggedDocument], k: int = 5) -> FoldSplit:
    """Assign documents to k folds balancing token counts (LPT greedy).

    Documents are taken in decreasing token_count order (ties by doc_id) and
    each goes to the currently lightest fold.  Documents are never split.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if len(docs) < k:
        raise ValueError(f"need at least {k} documents for {k} folds, got {len(docs)}")
    order = sorted(docs, key=lambda d: (-d.token_count, d.doc_id))
    loads = [0] * k
    assignment = {}
    for doc in order:
        fold = min(range(k), key=lambda f: (loads[f], f))
        assignment[doc.doc_id] = fold
        loads[fold] += doc.token_count
    return FoldSplit(assignment, k)
