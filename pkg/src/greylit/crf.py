"""Linear-chain CRF: potentials, forward-backward, exact gradient, training
with L1/L2-regularized quasi-Newton optimization, and Viterbi decoding.

Observations are sparse binary features.  A sequence ``x`` is a list of
per-position feature-id lists; the model scores a label sequence y as

    score(x, y) = start[y0] + sum_t state[f, y_t] (f active at t)
                            + sum_{t>0} trans[y_{t-1}, y_t]

with a distinguished START weight vector for position 0 and no explicit STOP
transition.  All arithmetic is in log space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import optim
from .corpus import LABELS

MODEL_FORMAT = "crf-model/1"


class CrfError(ValueError):
    pass


@dataclass
class CrfHyperparams:
    c1: float = 0.0
    c2: float = 0.0
    max_iterations: int = 200
    convergence_tol: float = 1e-5

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise CrfError(f"regularization coefficients must be >= 0, got c1={self.c1}, c2={self.c2}")


@dataclass
class CrfModel:
    labels: list
    feature_names: list
    state_weights: np.ndarray       # (F, L)
    transition_weights: np.ndarray  # (L, L), row = previous label
    start_weights: np.ndarray       # (L,), the START transition row
    hyper: CrfHyperparams = field(default_factory=CrfHyperparams)
    feature_config: Optional[dict] = None
    objective_history: list = field(default_factory=list)

    def __post_init__(self):
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        self._feature_index = {name: i for i, name in enumerate(self.feature_names)}

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def label_index(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise CrfError(f"label {label!r} is not in the model label set") from None

    def encode_features(self, sentence_features: Sequence) -> list:
        """Map per-token feature-name collections to id lists (unknown names dropped)."""
        out = []
        for names in sentence_features:
            ids = sorted(self._feature_index[n] for n in names if n in self._feature_index)
            out.append(ids)
        return out

    # --- flat parameter vector layout: state (F*L), transitions (L*L), start (L)

    def pack(self) -> np.ndarray:
        return np.concatenate([self.state_weights.ravel(), self.transition_weights.ravel(), self.start_weights])

    def unpack(self, w: np.ndarray) -> None:
        F, L = self.n_features, self.n_labels
        self.state_weights = w[: F * L].reshape(F, L).copy()
        self.transition_weights = w[F * L: F * L + L * L].reshape(L, L).copy()
        self.start_weights = w[F * L + L * L:].copy()

    @classmethod
    def zeros(cls, labels, feature_names, hyper=None) -> "CrfModel":
        L, F = len(labels), len(feature_names)
        return cls(
            list(labels),
            list(feature_names),
            np.zeros((F, L)),
            np.zeros((L, L)),
            np.zeros(L),
            hyper or CrfHyperparams(),
        )

    # ------------------------------------------------------------ persistence

    def to_json(self) -> str:
        payload = {
            "format": MODEL_FORMAT,
            "labels": self.labels,
            "state_weights": {
                name: {self.labels[l]: self.state_weights[f, l]
                       for l in np.nonzero(self.state_weights[f])[0]}
                for f, name in enumerate(self.feature_names)
            },
            "transition_weights": self.transition_weights.tolist(),
            "start_weights": self.start_weights.tolist(),
            "hyperparams": {
                "c1": self.hyper.c1,
                "c2": self.hyper.c2,
                "max_iterations": self.hyper.max_iterations,
                "convergence_tol": self.hyper.convergence_tol,
            },
            "feature_config": self.feature_config,
        }
        return json.dumps(payload, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CrfModel":
        payload = json.loads(text)
        if payload.get("format") != MODEL_FORMAT:
            raise CrfError(f"unsupported model format {payload.get('format')!r}")
        labels = payload["labels"]
        feature_names = sorted(payload["state_weights"])
        model = cls.zeros(labels, feature_names, CrfHyperparams(**payload["hyperparams"]))
        for f, name in enumerate(feature_names):
            for lab, w in payload["state_weights"][name].items():
                model.state_weights[f, model.label_index(lab)] = w
        model.transition_weights = np.array(payload["transition_weights"], dtype=np.float64)
        model.start_weights = np.array(payload["start_weights"], dtype=np.float64)
        model.feature_config = payload.get("feature_config")
        return model


def _state_scores(model: CrfModel, x: Sequence) -> np.ndarray:
    if len(x) < 1:
        raise CrfError("sequences must have at least one position")
    scores = np.zeros((len(x), model.n_labels))
    for t, ids in enumerate(x):
        for f in ids:
            scores[t] += model.state_weights[f]
    return scores


def log_potentials(model: CrfModel, x: Sequence) -> np.ndarray:
    """Per-position (prev_label, label) log potential matrices, shape (T, L, L).

    Entry [t, i, j] is the state score of label j at t plus the transition
    weight i -> j; position 0 uses the START row and ignores i.
    """
    state = _state_scores(model, x)
    T, L = state.shape
    pots = np.empty((T, L, L))
    pots[0] = (model.start_weights + state[0])[None, :]
    for t in range(1, T):
        pots[t] = model.transition_weights + state[t][None, :]
    return pots


def _logsumexp(a: np.ndarray, axis=None) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    out = m + np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True))
    return np.squeeze(out, axis=axis) if axis is not None else out.item()


def _forward(model: CrfModel, x: Sequence):
    state = _state_scores(model, x)
    alpha = np.empty_like(state)
    alpha[0] = model.start_weights + state[0]
    for t in range(1, len(x)):
        alpha[t] = _logsumexp(alpha[t - 1][:, None] + model.transition_weights, axis=0) + state[t]
    return state, alpha


def log_partition(model: CrfModel, x: Sequence) -> float:
    """log sum over all label sequences of exp(score), by forward recursion."""
    _, alpha = _forward(model, x)
    return float(_logsumexp(alpha[-1]))


def sequence_score(model: CrfModel, x: Sequence, labels: Sequence[str]) -> float:
    """Unnormalized log score of one label sequence."""
    if len(labels) != len(x):
        raise CrfError(f"{len(labels)} labels for {len(x)} positions")
    idx = [model.label_index(lab) for lab in labels]
    state = _state_scores(model, x)
    score = model.start_weights[idx[0]] + state[0, idx[0]]
    for t in range(1, len(x)):
        score += model.transition_weights[idx[t - 1], idx[t]] + state[t, idx[t]]
    return float(score)


def nll_and_gradient(model: CrfModel, dataset: Sequence) -> tuple:
    """Regularized negative log-likelihood and its exact gradient.

    Returns (nll + c2 * ||w||^2, flat gradient) where the data term gradient
    is expected feature counts minus empirical counts (forward-backward) and
    the L2 term contributes 2 * c2 * w.  The L1 term is the optimizer's job.
    """
    L = model.n_labels
    grad_state = np.zeros_like(model.state_weights)
    grad_trans = np.zeros_like(model.transition_weights)
    grad_start = np.zeros_like(model.start_weights)
    nll = 0.0

    for x, labels in dataset:
        if len(labels) != len(x):
            raise CrfError(f"{len(labels)} labels for {len(x)} positions")
        idx = [model.label_index(lab) for lab in labels]
        T = len(x)
        state, alpha = _forward(model, x)
        log_z = _logsumexp(alpha[-1])

        beta = np.zeros_like(state)
        for t in range(T - 2, -1, -1):
            beta[t] = _logsumexp(model.transition_weights + (state[t + 1] + beta[t + 1])[None, :], axis=1)

        # unary posteriors
        post = np.exp(alpha + beta - log_z)
        # expected minus empirical
        for t, ids in enumerate(x):
            for f in ids:
                grad_state[f] += post[t]
                grad_state[f, idx[t]] -= 1.0
        grad_start += post[0]
        grad_start[idx[0]] -= 1.0
        for t in range(1, T):
            pair = alpha[t - 1][:, None] + model.transition_weights + (state[t] + beta[t])[None, :] - log_z
            grad_trans += np.exp(pair)
            grad_trans[idx[t - 1], idx[t]] -= 1.0

        gold = model.start_weights[idx[0]] + state[0, idx[0]]
        for t in range(1, T):
            gold += model.transition_weights[idx[t - 1], idx[t]] + state[t, idx[t]]
        nll += log_z - gold

    c2 = model.hyper.c2
    w = model.pack()
    value = nll + c2 * float(w.dot(w))
    grad = np.concatenate([grad_state.ravel(), grad_trans.ravel(), grad_start]) + 2.0 * c2 * w
    return value, grad


def viterbi(model: CrfModel, x: Sequence) -> tuple:
    """Best label sequence and its unnormalized log score.

    Score ties are broken toward the lowest label index at every backpointer
    (and at the final position), so the all-ties case decodes to label 0
    everywhere.
    """
    state = _state_scores(model, x)
    T, L = state.shape
    delta = model.start_weights + state[0]
    back = np.zeros((T, L), dtype=np.intp)
    for t in range(1, T):
        cand = delta[:, None] + model.transition_weights
        back[t] = np.argmax(cand, axis=0)  # first max = lowest prev index
        delta = cand[back[t], np.arange(L)] + state[t]
    best_last = int(np.argmax(delta))
    path = [best_last]
    for t in range(T - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return [model.labels[i] for i in path], float(delta[best_last])


def _collect_labels(dataset) -> list:
    seen = {lab for _, labels in dataset for lab in labels}
    unknown = seen - set(LABELS)
    if unknown:
        raise CrfError(f"labels outside the BIO inventory: {sorted(unknown)}; pass labels= explicitly")
    return [lab for lab in LABELS if lab in seen or lab == "O"]


def train(dataset: Sequence, hyper: Optional[CrfHyperparams] = None,
          labels: Optional[Sequence[str]] = None,
          feature_names: Optional[Sequence[str]] = None,
          feature_config: Optional[dict] = None) -> CrfModel:
    """Fit CRF weights by regularized maximum likelihood.

    ``dataset`` is a list of (per-token feature-name collections, label
    strings).  Weights start at zero; L-BFGS, or its orthant-wise variant
    when c1 > 0, runs until the gradient norm reaches convergence_tol or
    max_iterations is hit.  Deterministic for a fixed dataset order.
    """
    if not dataset:
        raise CrfError("cannot train on an empty dataset")
    hyper = hyper or CrfHyperparams()
    if labels is None:
        labels = _collect_labels(dataset)
    if feature_names is None:
        feature_names = sorted({name for features, _ in dataset for names in features for name in names})
    model = CrfModel.zeros(labels, feature_names, hyper)
    model.feature_config = feature_config
    encoded = [(model.encode_features(features), list(lab)) for features, lab in dataset]

    def fun_grad(w):
        model.unpack(w)
        return nll_and_gradient(model, encoded)

    result = optim.minimize(
        fun_grad,
        model.pack(),
        l1=hyper.c1,
        max_iterations=hyper.max_iterations,
        tol=hyper.convergence_tol,
    )
    model.unpack(result.x)
    model.objective_history = result.objective_history
    return model


#: c1 x c2 grid used when no explicit grid is supplied
DEFAULT_GRID = tuple((c1, c2) for c1 in (0.0, 0.01, 0.1, 1.0) for c2 in (0.01, 0.1, 1.0))


def tune_c1_c2(train_set: Sequence, dev_set: Sequence, grid: Sequence = DEFAULT_GRID,
               max_iterations: int = 100, convergence_tol: float = 1e-4) -> CrfHyperparams:
    """Pick the (c1, c2) grid point with the best dev micro-F1.

    Ties go to the smaller c1 + c2, then to grid order.
    """
    from .evaluation import score  # local import: evaluation pulls in no heavy deps

    grid = list(grid)
    if not grid:
        raise CrfError("hyperparameter grid must not be empty")
    gold = [lab for _, labels in dev_set for lab in labels]
    best = None
    for position, (c1, c2) in enumerate(grid):
        hyper = CrfHyperparams(c1, c2, max_iterations, convergence_tol)
        model = train(train_set, hyper)
        pred = []
        for features, _ in dev_set:
            pred.extend(viterbi(model, model.encode_features(features))[0])
        f1 = score(gold, pred).micro.f1
        key = (-f1, c1 + c2, position)
        if best is None or key < best[0]:
            best = (key, hyper)
    return best[1]
