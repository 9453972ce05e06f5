"""Token-level evaluation: micro/macro P/R/F1, per-label table, confusion
matrix, run stability statistics, McNemar's paired test, and error-combination
mining across multiple prediction sets.

Scoring is strictly token-level over B and I labels: micro precision counts
correct non-O predictions over all non-O predictions, micro recall over all
non-O gold labels, so a model predicting only O scores exactly zero.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import LABELS, parse_label

NON_O_LABELS = tuple(lab for lab in LABELS if lab != "O")


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class LabelScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    micro: Scores
    macro: Scores
    per_label: dict
    confusion: np.ndarray  # (13, 13), rows = gold, cols = predicted

    def per_label_csv(self) -> str:
        lines = ["label,precision,recall,f1,support"]
        for lab in NON_O_LABELS:
            s = self.per_label[lab]
            lines.append(f"{lab},{s.precision:.6f},{s.recall:.6f},{s.f1:.6f},{s.support}")
        lines.append(f"macro,{self.macro.precision:.6f},{self.macro.recall:.6f},{self.macro.f1:.6f},")
        lines.append(f"micro,{self.micro.precision:.6f},{self.micro.recall:.6f},{self.micro.f1:.6f},")
        return "\n".join(lines) + "\n"

    def confusion_csv(self) -> str:
        lines = ["gold\\pred," + ",".join(LABELS)]
        for i, lab in enumerate(LABELS):
            lines.append(lab + "," + ",".join(str(int(c)) for c in self.confusion[i]))
        return "\n".join(lines) + "\n"


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _ratio(num: int, den: int) -> float:
    return 0.0 if den == 0 else num / den


def _flat(labels) -> list:
    out = []
    for item in labels:
        if isinstance(item, str):
            out.append(parse_label(item))
        else:
            out.extend(parse_label(lab) for lab in item)
    return out


def score(gold, pred) -> EvalReport:
    """Token-level evaluation report; inputs are label sequences (flat or
    one list per sentence) of identical shape."""
    gold = _flat(gold)
    pred = _flat(pred)
    if len(gold) != len(pred):
        raise EvalError(f"gold has {len(gold)} tokens, prediction has {len(pred)}")

    index = {lab: i for i, lab in enumerate(LABELS)}
    confusion = np.zeros((len(LABELS), len(LABELS)), dtype=np.int64)
    for g, p in zip(gold, pred):
        confusion[index[g], index[p]] += 1

    correct_non_o = sum(1 for g, p in zip(gold, pred) if p != "O" and p == g)
    pred_non_o = sum(1 for p in pred if p != "O")
    gold_non_o = sum(1 for g in gold if g != "O")
    micro_p = _ratio(correct_non_o, pred_non_o)
    micro_r = _ratio(correct_non_o, gold_non_o)
    micro = Scores(micro_p, micro_r, _f1(micro_p, micro_r))

    per_label = {}
    for lab in NON_O_LABELS:
        i = index[lab]
        tp = int(confusion[i, i])
        p = _ratio(tp, int(confusion[:, i].sum()))
        r = _ratio(tp, int(confusion[i].sum()))
        per_label[lab] = LabelScores(p, r, _f1(p, r), int(confusion[i].sum()))
    macro = Scores(
        sum(s.precision for s in per_label.values()) / len(NON_O_LABELS),
        sum(s.recall for s in per_label.values()) / len(NON_O_LABELS),
        sum(s.f1 for s in per_label.values()) / len(NON_O_LABELS),
    )
    return EvalReport(micro, macro, per_label, confusion)


@dataclass
class RunStats:
    f1s: list
    mean: float
    std: float  # population standard deviation
    fail_count: int


def run_stats(f1s: Sequence[float], population: bool = True) -> RunStats:
    """Mean, standard deviation and failed-run count over per-run F1 scores."""
    f1s = list(f1s)
    if not f1s:
        raise EvalError("run_stats needs at least one F1 value")
    mean = sum(f1s) / len(f1s)
    var = sum((x - mean) ** 2 for x in f1s) / (len(f1s) if population else max(1, len(f1s) - 1))
    return RunStats(f1s, mean, math.sqrt(var), sum(1 for x in f1s if x == 0.0))


@dataclass(frozen=True)
class McNemarResult:
    b: int  # first model correct, second wrong
    c: int  # first model wrong, second correct
    chi2: float


def mcnemar(gold, pred_a, pred_b, correction: bool = True) -> McNemarResult:
    """Paired McNemar test on per-token correctness of two prediction runs.

    chi2 = (|b - c| - 1)^2 / (b + c) with the continuity correction (the
    default), (b - c)^2 / (b + c) without; 0 when b + c == 0.
    """
    gold, pred_a, pred_b = _flat(gold), _flat(pred_a), _flat(pred_b)
    if not (len(gold) == len(pred_a) == len(pred_b)):
        raise EvalError("gold and both prediction runs must have identical shapes")
    b = sum(1 for g, a, p in zip(gold, pred_a, pred_b) if a == g and p != g)
    c = sum(1 for g, a, p in zip(gold, pred_a, pred_b) if a != g and p == g)
    if b + c == 0:
        return McNemarResult(b, c, 0.0)
    diff = abs(b - c) - 1 if correction else b - c
    return McNemarResult(b, c, diff * diff / (b + c))


def error_combinations(gold, preds: Sequence, top_n: int = 10) -> list:
    """Most frequent (gold, predictions...) tuples where the models disagree
    about the truth: at least one prediction is correct and at least one is
    wrong.  Returns (count, gold label, predicted labels) rows, most frequent
    first, ties in tuple lexicographic order.
    """
    if len(preds) < 2:
        raise EvalError("error mining needs at least two prediction runs")
    gold = _flat(gold)
    flats = [_flat(p) for p in preds]
    if any(len(f) != len(gold) for f in flats):
        raise EvalError("prediction runs must match the gold shape")
    counts = Counter()
    for i, g in enumerate(gold):
        row = tuple(f[i] for f in flats)
        if any(p == g for p in row) and any(p != g for p in row):
            counts[(g,) + row] += 1
    ranked = sorted(counts, key=lambda tup: (-counts[tup], tup))[:top_n]
    return [(counts[tup], tup[0], tup[1:]) for tup in ranked]


def error_combinations_csv(rows, model_names: Sequence[str]) -> str:
    lines = ["freq,true," + ",".join(model_names)]
    for count, gold_label, pred_labels in rows:
        lines.append(f"{count},{gold_label}," + ",".join(pred_labels))
    return "\n".join(lines) + "\n"
