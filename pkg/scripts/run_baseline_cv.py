#!/usr/bin/env python3
"""5-fold cross-validated baseline CRF experiment.

Trains the word shape + POS + thesaurus CRF (5-token window, c1/c2 grid
tuned per fold) on an annotated CoNLL corpus and reports pooled and per-fold
token-level micro F1.

Usage:
    python scripts/run_baseline_cv.py --corpus data/annotated.conll \
        --thesaurus data/thesaurus.tsv [--folds 5] [--max-iter 200]
"""

import argparse
import sys
import time

from greylit.corpus import make_folds, read_conll, split_long_sentences
from greylit.crf import DEFAULT_GRID, CrfHyperparams, train, tune_c1_c2, viterbi
from greylit.evaluation import score
from greylit.gazetteer import load_thesaurus
from greylit.pipeline import FeatureTemplateConfig, stack_features


def featurize(docs, config, thesaurus):
    data = []
    for doc in docs:
        for sentence in doc.sentences:
            features = stack_features(config, sentence, {}, thesaurus)
            data.append((features, [t.gold_label for t in sentence]))
    return data


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", required=True)
    parser.add_argument("--thesaurus", required=True)
    parser.add_argument("--folds", type=int, default=5)
    parser.add_argument("--max-iter", type=int, default=200)
    parser.add_argument("--tune-iter", type=int, default=60,
                        help="iteration cap during the c1/c2 grid search")
    args = parser.parse_args()

    docs = [split_long_sentences(d) for d in read_conll(open(args.corpus, encoding="utf-8").read())]
    thesaurus = load_thesaurus(open(args.thesaurus, encoding="utf-8").read())
    split = make_folds(docs, k=args.folds)
    config = FeatureTemplateConfig(window=5)
    print(f"{len(docs)} documents, {sum(d.token_count for d in docs)} tokens, {args.folds} folds")

    gold_all, pred_all = [], []
    for fold in range(args.folds):
        t0 = time.time()
        test_docs = [d for d in docs if split.fold_of_doc[d.doc_id] == fold]
        rest = [d for d in docs if split.fold_of_doc[d.doc_id] != fold]
        dev_fold = (fold + 1) % args.folds
        dev_docs = [d for d in rest if split.fold_of_doc[d.doc_id] == dev_fold]
        train_docs = [d for d in rest if split.fold_of_doc[d.doc_id] != dev_fold]

        train_set = featurize(train_docs, config, thesaurus)
        dev_set = featurize(dev_docs, config, thesaurus)
        hyper = tune_c1_c2(train_set, dev_set, DEFAULT_GRID,
                           max_iterations=args.tune_iter, convergence_tol=1e-3)
        model = train(train_set + dev_set,
                      CrfHyperparams(hyper.c1, hyper.c2, args.max_iter, 1e-4))

        gold_fold, pred_fold = [], []
        for features, labels in featurize(test_docs, config, thesaurus):
            gold_fold.extend(labels)
            pred_fold.extend(viterbi(model, model.encode_features(features))[0])
        fold_f1 = score(gold_fold, pred_fold).micro.f1
        print(f"fold {fold}: c1={hyper.c1} c2={hyper.c2} micro F1 {fold_f1:.3f} "
              f"({time.time() - t0:.0f}s)")
        gold_all.extend(gold_fold)
        pred_all.extend(pred_fold)

    report = score(gold_all, pred_all)
    print(f"pooled micro: precision {report.micro.precision:.3f} "
          f"recall {report.micro.recall:.3f} F1 {report.micro.f1:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
