"""Shared oracles and synthetic data for the test suite.

Everything here is deliberately naive (enumeration, direct summation,
full scans) so it stays independent of the implementations it checks.
"""

import itertools
import math
import random

import numpy as np

from greylit.crf import CrfHyperparams, CrfModel


def random_model(rng: random.Random, n_labels, n_features, c2=0.0, discrete=False):
    labels = [f"L{i}" for i in range(n_labels)]
    features = [f"f{i}" for i in range(n_features)]
    model = CrfModel.zeros(labels, features, CrfHyperparams(c2=c2))
    if discrete:
        draw = lambda: rng.choice([-1.0, -0.5, 0.0, 0.5, 1.0])
    else:
        draw = lambda: rng.uniform(-1.5, 1.5)
    model.state_weights = np.array([[draw() for _ in labels] for _ in features])
    model.transition_weights = np.array([[draw() for _ in labels] for _ in labels])
    model.start_weights = np.array([draw() for _ in labels])
    return model


def random_sequence(rng: random.Random, length, n_features, max_active=3):
    return [sorted(rng.sample(range(n_features), rng.randint(0, min(max_active, n_features))))
            for _ in range(length)]


def naive_sequence_score(model, x, label_indices):
    """Direct summation of start + state + transition weights."""
    total = model.start_weights[label_indices[0]]
    for f in x[0]:
        total += model.state_weights[f, label_indices[0]]
    for t in range(1, len(x)):
        total += model.transition_weights[label_indices[t - 1], label_indices[t]]
        for f in x[t]:
            total += model.state_weights[f, label_indices[t]]
    return float(total)


def enumerate_scores(model, x):
    for assignment in itertools.product(range(model.n_labels), repeat=len(x)):
        yield assignment, naive_sequence_score(model, x, assignment)


def brute_force_log_partition(model, x):
    scores = [s for _, s in enumerate_scores(model, x)]
    m = max(scores)
    return m + math.log(sum(math.exp(s - m) for s in scores))


def brute_force_viterbi(model, x):
    """Argmax sequence under the decoder's tie rule: among all optimal
    sequences, the one minimal by reversed-tuple lexicographic order.
    Exact-equality tie detection; use discrete weights for tie-heavy cases."""
    best_score = -math.inf
    best = None
    for assignment, s in enumerate_scores(model, x):
        if best is None or s > best_score:
            best, best_score = assignment, s
        elif s == best_score and tuple(reversed(assignment)) < tuple(reversed(best)):
            best = assignment
    return [model.labels[i] for i in best], best_score


ENTITY_WORDS = {
    "LOC": ["nijmegen", "breda", "ede", "leiden", "utrecht"],
    "ART": ["urn", "bijl", "kling", "maalsteen", "spinklos"],
    "PER": ["bronstijd", "ijzertijd", "neolithicum", "middeleeuwen"],
    "CON": ["waterput", "greppel", "paalkuil", "grafveld"],
    "MAT": ["vuursteen", "brons", "leem"],
    "SPE": ["rund", "schaap", "eik"],
}
FILLER_WORDS = ["de", "het", "een", "in", "op", "werd", "zijn", "gevonden",
                "sporen", "onderzoek", "bij", "uit", "laag", "vondst", "terrein"]


def word_feature_sentence(words):
    return [[f"w@0={w}"] for w in words]


def separable_corpus(n_sentences=200, seed=7, min_len=4, max_len=10):
    """Sentences where every word maps to exactly one label: learnable to
    perfection from word-identity features alone."""
    rng = random.Random(seed)
    data = []
    for _ in range(n_sentences):
        words, labels = [], []
        for _ in range(rng.randint(min_len, max_len)):
            if rng.random() < 0.35:
                etype = rng.choice(sorted(ENTITY_WORDS))
                words.append(rng.choice(ENTITY_WORDS[etype]))
                labels.append(f"B-{etype}")
            else:
                words.append(rng.choice(FILLER_WORDS))
                labels.append("O")
        data.append((word_feature_sentence(words), labels))
    return data


def naive_search(pages, query):
    """Full-scan reference implementation of the search contract.

    ``pages`` is a list of PageRecord; filtering, scoring, facet counting and
    ordering are all recomputed from the raw records, independent of any
    postings structure.
    """
    from greylit.search import point_in_polygon, tokenize

    terms = sorted(set(tokenize(query.fulltext))) if query.fulltext else []
    token_lists = {p.key: tokenize(p.text) for p in pages}

    def passes(page):
        for etype, wanted in query.entities.items():
            if any(t not in page.entities.get(etype, []) for t in wanted):
                return False
        if query.date is not None:
            d = query.date
            if d.mode == "contain":
                if not any(r.start <= d.start and r.end >= d.end for r in page.year_ranges):
                    return False
            else:
                if not any(max(r.start, d.start) <= min(r.end, d.end) for r in page.year_ranges):
                    return False
        for facet_field, value in query.facets.items():
            if getattr(page.metadata, facet_field) != value:
                return False
        if query.polygon is not None:
            if page.metadata.coord is None or not point_in_polygon(page.metadata.coord, query.polygon):
                return False
        return all(t in token_lists[page.key] for t in terms)

    survivors = sorted((p for p in pages if passes(p)), key=lambda p: p.key)
    n = len(pages)

    def page_score(page):
        total = 0.0
        for t in terms:
            tf = token_lists[page.key].count(t)
            if tf == 0:
                continue
            df = sum(1 for other in pages if t in token_lists[other.key])
            idf = 1.0 + math.log(n / (df + 1))
            total += math.sqrt(tf) * idf * idf / math.sqrt(len(token_lists[page.key]))
        return total

    scored = [(p.key, page_score(p) if terms else 0.0) for p in survivors]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    facets = {"doc_type": {}, "subject": {}}
    for p in survivors:
        for facet_field in facets:
            value = getattr(p.metadata, facet_field)
            if value:
                facets[facet_field][value] = facets[facet_field].get(value, 0) + 1
    return scored, facets


def held_out_from(train_data, n_sentences=40, seed=11, min_len=4, max_len=10):
    """Sentences drawn only from word-label pairs seen in the training data."""
    pairs = sorted({
        (names[0], lab)
        for features, labels in train_data
        for names, lab in zip(features, labels)
    })
    rng = random.Random(seed)
    data = []
    for _ in range(n_sentences):
        chosen = [pairs[rng.randrange(len(pairs))] for _ in range(rng.randint(min_len, max_len))]
        data.append(([[name] for name, _ in chosen], [lab for _, lab in chosen]))
    return data
