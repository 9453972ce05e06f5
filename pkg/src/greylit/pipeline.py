"""Feature templates, external prediction ingestion, ensembles, BIO repair,
and entity span extraction.

The feature extractors return, per token, a list of string feature names;
the CRF maps those to ids.  Window offsets are rendered into the names
("w@-1=put") so a 5-token window sees the two neighbours on each side.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus import TaggedDocument, is_valid_bio, label_etype, label_tag
from .gazetteer import LIST_NAMES, Thesaurus, membership_features


class PipelineError(ValueError):
    pass


@dataclass
class PredictionSet:
    model_name: str
    #: labels[d][s] is the label list for sentence s of document d,
    #: shaped exactly like the reference corpus
    labels: list

    def shape(self) -> tuple:
        return tuple(tuple(len(s) for s in doc) for doc in self.labels)

    def flat(self) -> list:
        return [lab for doc in self.labels for sent in doc for lab in sent]


@dataclass(frozen=True)
class FeatureTemplateConfig:
    window: int = 5
    use_shape: bool = True
    use_pos: bool = True
    use_thesaurus: bool = True
    prediction_sources: tuple = ()

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise PipelineError(f"window must be odd and >= 1, got {self.window}")
        object.__setattr__(self, "prediction_sources", tuple(self.prediction_sources))

    def offsets(self) -> range:
        half = self.window // 2
        return range(-half, half + 1)


@dataclass(frozen=True)
class EntitySpan:
    etype: str
    start: int
    end: int  # exclusive
    surface: str

    def __post_init__(self):
        if self.start >= self.end:
            raise PipelineError(f"empty span [{self.start}, {self.end})")


def word_shape(surface: str) -> str:
    """Character-class pattern with adjacent duplicates collapsed:
    upper -> X, lower -> x, digit -> 9, anything else kept as itself."""
    out = []
    for ch in surface:
        if ch.isupper():
            sym = "X"
        elif ch.islower():
            sym = "x"
        elif ch.isdigit():
            sym = "9"
        else:
            sym = ch
        if not out or out[-1] != sym:
            out.append(sym)
    return "".join(out)


def _token_features(sentence, pos_tags, thes_flags, config, i) -> list:
    names = []
    for delta in config.offsets():
        j = i + delta
        if j < 0:
            names.append(f"BOS@{delta:+d}")
            continue
        if j >= len(sentence):
            names.append(f"EOS@{delta:+d}")
            continue
        surface = sentence[j]
        names.append(f"w@{delta:+d}={surface.lower()}")
        if config.use_shape:
            names.append(f"shape@{delta:+d}={word_shape(surface)}")
            if any(c.isdigit() for c in surface):
                names.append(f"hasdigit@{delta:+d}")
            if any(c.isupper() for c in surface):
                names.append(f"hasupper@{delta:+d}")
            if not any(c.isalnum() for c in surface):
                names.append(f"ispunct@{delta:+d}")
        if config.use_pos and pos_tags[j]:
            names.append(f"pos@{delta:+d}={pos_tags[j]}")
        if config.use_thesaurus:
            for list_name in LIST_NAMES:
                if thes_flags[j][list_name]:
                    names.append(f"thes:{list_name}@{delta:+d}")
    return names


def _surfaces_and_pos(sentence):
    if sentence and hasattr(sentence[0], "surface"):
        return [t.surface for t in sentence], [t.pos for t in sentence]
    return list(sentence), [""] * len(sentence)


def extract_baseline_features(sentence, config: FeatureTemplateConfig,
                              thesaurus: Optional[Thesaurus] = None) -> list:
    """Word shape, POS and thesaurus features in a sliding window.

    ``sentence`` is a list of Tokens (or bare surfaces); returns one feature
    name list per token.  Out-of-sentence offsets yield BOS/EOS markers.
    """
    surfaces, pos_tags = _surfaces_and_pos(sentence)
    if config.use_thesaurus:
        if thesaurus is None:
            raise PipelineError("thesaurus features requested but no thesaurus given")
        thes_flags = membership_features(thesaurus, surfaces)
    else:
        thes_flags = [None] * len(surfaces)
    return [_token_features(surfaces, pos_tags, thes_flags, config, i) for i in range(len(surfaces))]


def stack_features(config: FeatureTemplateConfig, sentence,
                   predictions: dict, thesaurus: Optional[Thesaurus] = None) -> list:
    """Baseline features plus windowed prediction-label features.

    ``predictions`` maps model name to this sentence's label list.  All five
    ensemble variants are this one function under different configs: an
    empty ``prediction_sources`` with the baseline toggles on reproduces
    extract_baseline_features exactly.
    """
    missing = [name for name in config.prediction_sources if name not in predictions]
    if missing:
        raise PipelineError(f"missing prediction sources: {missing}")
    features = extract_baseline_features(sentence, config, thesaurus)
    n = len(features)
    for name in config.prediction_sources:
        labels = predictions[name]
        if len(labels) != n:
            raise PipelineError(f"prediction source {name!r} has {len(labels)} labels for {n} tokens")
        for i in range(n):
            for delta in config.offsets():
                j = i + delta
                if j < 0:
                    value = "BOS"
                elif j >= n:
                    value = "EOS"
                else:
                    value = labels[j]
                features[i].append(f"pred:{name}@{delta:+d}={value}")
    return features


def baseline_config(window: int = 5) -> FeatureTemplateConfig:
    return FeatureTemplateConfig(window=window)


def _parse_prediction_file(stream) -> list:
    """Docs of sentences of (surface, label) pairs, label from the last
    populated column: column 4 when present, the plain label column
    otherwise; columns 5 and up are ignored."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    docs, sentences, sent = [], None, []

    def end_sentence():
        nonlocal sent
        if sent:
            sentences.append(sent)
            sent = []

    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if line.startswith("#doc"):
            if sentences is not None:
                end_sentence()
                docs.append(sentences)
            sentences = []
            continue
        if not line.strip():
            end_sentence()
            continue
        if sentences is None:
            raise PipelineError(f"token line before any '#doc' header at line {line_no}")
        fields = line.split("\t")
        label = fields[3] if len(fields) >= 4 else fields[2] if len(fields) >= 3 else ""
        if not label:
            raise PipelineError(f"missing prediction label at line {line_no}")
        sent.append((fields[0], label))
    if sentences is not None:
        end_sentence()
        docs.append(sentences)
    return docs


def ingest_predictions(corpus: Sequence[TaggedDocument], stream, model_name: str) -> PredictionSet:
    """Read a CoNLL prediction file aligned to ``corpus``.

    The token surfaces must match the corpus exactly, token for token; any
    mismatch raises with the position.  Labels are taken verbatim (possibly
    BIO-invalid; repair is a separate step).
    """
    docs = _parse_prediction_file(stream)
    if len(docs) != len(corpus):
        raise PipelineError(f"{len(docs)} documents in prediction file, corpus has {len(corpus)}")
    labels = []
    for pred_doc, ref_doc in zip(docs, corpus):
        if len(pred_doc) != len(ref_doc.sentences):
            raise PipelineError(
                f"document {ref_doc.doc_id!r}: {len(pred_doc)} sentences vs {len(ref_doc.sentences)}"
            )
        doc_labels = []
        for s, (pred_sent, ref_sent) in enumerate(zip(pred_doc, ref_doc.sentences)):
            if len(pred_sent) != len(ref_sent):
                raise PipelineError(
                    f"document {ref_doc.doc_id!r} sentence {s}: {len(pred_sent)} tokens vs {len(ref_sent)}"
                )
            sent_labels = []
            for t, ((surface, label), ref_tok) in enumerate(zip(pred_sent, ref_sent)):
                if surface != ref_tok.surface:
                    raise PipelineError(
                        f"surface mismatch at document {ref_doc.doc_id!r} sentence {s} token {t}: "
                        f"{surface!r} != {ref_tok.surface!r}"
                    )
                sent_labels.append(label)
            doc_labels.append(sent_labels)
        labels.append(doc_labels)
    return PredictionSet(model_name, labels)


def prediction_set_from_corpus(corpus: Sequence[TaggedDocument], model_name: str) -> PredictionSet:
    """Wrap a corpus's gold labels as a PredictionSet (for stacking on gold)."""
    return PredictionSet(model_name, [doc.gold_labels() for doc in corpus])


def majority_vote(sets: Sequence[PredictionSet], priority: str) -> PredictionSet:
    """Per-token majority label over exactly three prediction sets; when all
    three disagree, the priority model's label wins."""
    if len(sets) != 3:
        raise PipelineError(f"majority voting is defined over 3 prediction sets, got {len(sets)}")
    names = [s.model_name for s in sets]
    if priority not in names:
        raise PipelineError(f"priority {priority!r} not among prediction sets {names}")
    if len({s.shape() for s in sets}) != 1:
        raise PipelineError("prediction sets have different shapes")
    priority_idx = names.index(priority)

    voted = []
    for d in range(len(sets[0].labels)):
        doc_out = []
        for s in range(len(sets[0].labels[d])):
            sent_out = []
            for t in range(len(sets[0].labels[d][s])):
                votes = [ps.labels[d][s][t] for ps in sets]
                winner = next((lab for lab in votes if votes.count(lab) >= 2), votes[priority_idx])
                sent_out.append(winner)
            doc_out.append(sent_out)
        voted.append(doc_out)
    return PredictionSet("vote", voted)


def bio_repair(labels: Sequence[str]) -> list:
    """Turn impossible I labels (no matching B/I before them) into B labels."""
    out = []
    prev = "O"
    for lab in labels:
        if label_tag(lab) == "I":
            if label_tag(prev) == "O" or label_etype(prev) != label_etype(lab):
                lab = "B-" + label_etype(lab)
        out.append(lab)
        prev = lab
    return out


def extract_spans(labels: Sequence[str], surfaces: Sequence[str]) -> list:
    """Maximal B-then-same-type-I runs as EntitySpans with normalized surfaces."""
    if len(labels) != len(surfaces):
        raise PipelineError(f"{len(labels)} labels for {len(surfaces)} tokens")
    if not is_valid_bio(labels):
        raise PipelineError("labels are not BIO-valid; run bio_repair first")
    spans = []
    start = None
    etype = None

    def close(end):
        if start is not None:
            surface = " ".join(s.lower() for s in surfaces[start:end])
            spans.append(EntitySpan(etype, start, end, surface))

    for i, lab in enumerate(labels):
        tag = label_tag(lab)
        if tag == "B":
            close(i)
            start, etype = i, label_etype(lab)
        elif tag == "O":
            close(i)
            start, etype = None, None
    close(len(labels))
    return spans


def spans_to_labels(spans: Sequence[EntitySpan], length: int) -> list:
    """Render spans back into a BIO label sequence (inverse of extract_spans)."""
    labels = ["O"] * length
    for span in spans:
        labels[span.start] = f"B-{span.etype}"
        for i in range(span.start + 1, span.end):
            labels[i] = f"I-{span.etype}"
    return labels
