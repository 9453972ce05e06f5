"""Command line entry point wiring the toolkit together.

One binary, one subcommand per workflow; every output is CSV, CoNLL or JSON
so runs are diffable.  Data errors exit 1 with a message on stderr; argparse
usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import sys
from importlib import resources

from . import chrono, corpus, crf, evaluation, pipeline, search, subword
from .gazetteer import load_thesaurus

INDEX_DIR_ENV = "GREYLIT_INDEX_DIR"


class CliError(Exception):
    pass


def _read(path) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    return pathlib.Path(path).read_text(encoding="utf-8")


def _write(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        pathlib.Path(path).write_text(text, encoding="utf-8")


def _load_corpus(path):
    return corpus.read_conll(_read(path))


def _load_thesaurus_arg(path, needed: bool, why: str):
    if path is None:
        if needed:
            raise CliError(f"--thesaurus is required {why}")
        return None
    return load_thesaurus(_read(path))


def _parse_pred_args(pairs) -> list:
    out = []
    for pair in pairs or []:
        name, sep, path = pair.partition("=")
        if not sep or not name or not path:
            raise CliError(f"--pred expects NAME=PATH, got {pair!r}")
        out.append((name, path))
    return out


def _pred_sets(docs, pred_args) -> dict:
    sets = {}
    for name, path in pred_args:
        sets[name] = pipeline.ingest_predictions(docs, _read(path), name)
    return sets


def load_presets() -> dict:
    text = resources.files("greylit").joinpath("ensemble_presets.json").read_text(encoding="utf-8")
    return json.loads(text)


def _feature_config(args, sources=()) -> pipeline.FeatureTemplateConfig:
    return pipeline.FeatureTemplateConfig(
        window=args.window,
        use_shape=not args.no_shape,
        use_pos=not args.no_pos,
        use_thesaurus=not args.no_thesaurus,
        prediction_sources=tuple(sources),
    )


def _sentence_predictions(pred_sets, d, s) -> dict:
    return {name: ps.labels[d][s] for name, ps in pred_sets.items()}


def _featurize_corpus(docs, config, thesaurus, pred_sets) -> list:
    featurized = []
    for d, doc in enumerate(docs):
        for s, sentence in enumerate(doc.sentences):
            features = pipeline.stack_features(
                config, sentence, _sentence_predictions(pred_sets, d, s), thesaurus
            )
            featurized.append((d, s, sentence, features))
    return featurized


def _training_dataset(docs, config, thesaurus, pred_sets) -> list:
    dataset = []
    for d, s, sentence, features in _featurize_corpus(docs, config, thesaurus, pred_sets):
        labels = []
        for tok in sentence:
            if tok.gold_label is None:
                raise CliError(f"document {docs[d].doc_id!r} has unlabelled tokens; cannot train")
            labels.append(tok.gold_label)
        dataset.append((features, labels))
    return dataset


def _predict_corpus(model, docs, config, thesaurus, pred_sets) -> list:
    labels = [[None] * len(doc.sentences) for doc in docs]
    for d, s, _sentence, features in _featurize_corpus(docs, config, thesaurus, pred_sets):
        labels[d][s] = crf.viterbi(model, model.encode_features(features))[0]
    return labels


def _config_from_model(model) -> pipeline.FeatureTemplateConfig:
    stored = model.feature_config or {}
    return pipeline.FeatureTemplateConfig(
        window=stored.get("window", 5),
        use_shape=stored.get("use_shape", True),
        use_pos=stored.get("use_pos", True),
        use_thesaurus=stored.get("use_thesaurus", True),
        prediction_sources=tuple(stored.get("prediction_sources", ())),
    )


# ----------------------------------------------------------------- commands


def cmd_preprocess(args) -> int:
    docs = [corpus.split_long_sentences(d, args.soft, args.hard) for d in _load_corpus(args.corpus)]
    _write(args.out, corpus.write_conll(docs))
    return 0


def cmd_folds(args) -> int:
    split = corpus.make_folds(_load_corpus(args.corpus), args.k)
    _write(args.out, split.to_csv())
    return 0


def cmd_crf_train(args) -> int:
    docs = _load_corpus(args.corpus)
    config = _feature_config(args)
    thesaurus = _load_thesaurus_arg(args.thesaurus, config.use_thesaurus,
                                    "(thesaurus features are on; pass --no-thesaurus to drop them)")
    dataset = _training_dataset(docs, config, thesaurus, {})
    if args.tune_dev:
        dev = _training_dataset(_load_corpus(args.tune_dev), config, thesaurus, {})
        hyper = crf.tune_c1_c2(dataset, dev)
        hyper = crf.CrfHyperparams(hyper.c1, hyper.c2, args.max_iter, args.tol)
        print(f"tuned hyperparameters: c1={hyper.c1} c2={hyper.c2}", file=sys.stderr)
    else:
        hyper = crf.CrfHyperparams(args.c1, args.c2, args.max_iter, args.tol)
    model = crf.train(dataset, hyper, feature_config={
        "window": config.window,
        "use_shape": config.use_shape,
        "use_pos": config.use_pos,
        "use_thesaurus": config.use_thesaurus,
        "prediction_sources": list(config.prediction_sources),
    })
    _write(args.model, model.to_json())
    return 0


def cmd_crf_predict(args) -> int:
    model = crf.CrfModel.from_json(_read(args.model))
    config = _config_from_model(model)
    docs = _load_corpus(args.corpus)
    thesaurus = _load_thesaurus_arg(args.thesaurus, config.use_thesaurus,
                                    "(the model was trained with thesaurus features)")
    pred_sets = _pred_sets(docs, _parse_pred_args(args.pred))
    missing = [s for s in config.prediction_sources if s not in pred_sets]
    if missing:
        raise CliError(f"model needs prediction sources {missing}; pass --pred NAME=PATH")
    labels = _predict_corpus(model, docs, config, thesaurus, pred_sets)
    _write(args.out, corpus.write_conll(docs, labels=labels))
    return 0


def cmd_vote(args) -> int:
    docs = _load_corpus(args.corpus)
    pred_args = _parse_pred_args(args.pred)
    if len(pred_args) != 3:
        raise CliError(f"majority voting needs exactly 3 --pred files, got {len(pred_args)}")
    sets = _pred_sets(docs, pred_args)
    voted = pipeline.majority_vote([sets[name] for name, _ in pred_args], priority=args.priority)
    _write(args.out, corpus.write_conll(docs, labels=voted.labels))
    return 0


def cmd_ensemble(args) -> int:
    presets = load_presets()
    if args.preset not in presets:
        raise CliError(f"unknown preset {args.preset!r}; available: {', '.join(sorted(presets))}")
    preset = presets[args.preset]
    docs = _load_corpus(args.corpus)
    pred_args = _parse_pred_args(args.pred)
    pred_sets = _pred_sets(docs, pred_args)

    if preset["kind"] == "vote":
        if len(pred_args) != 3:
            raise CliError("the vote preset needs exactly 3 --pred files")
        voted = pipeline.majority_vote([pred_sets[n] for n, _ in pred_args], priority=args.primary)
        _write(args.out, corpus.write_conll(docs, labels=voted.labels))
        return 0

    sources = [args.primary] if preset["sources"] == "primary" else [n for n, _ in pred_args]
    if args.primary not in pred_sets:
        raise CliError(f"--primary {args.primary!r} is not among the --pred names")
    if not args.train_corpus:
        raise CliError(f"preset {args.preset!r} trains a CRF; pass --train-corpus and --train-pred")
    train_docs = _load_corpus(args.train_corpus)
    train_sets = _pred_sets(train_docs, _parse_pred_args(args.train_pred))
    missing = [s for s in sources if s not in train_sets]
    if missing:
        raise CliError(f"missing --train-pred for sources {missing}")

    config = pipeline.FeatureTemplateConfig(
        window=args.window,
        use_shape=preset["baseline"],
        use_pos=preset["baseline"],
        use_thesaurus=preset["baseline"],
        prediction_sources=tuple(sources),
    )
    thesaurus = _load_thesaurus_arg(args.thesaurus, preset["baseline"],
                                    f"(preset {args.preset!r} includes the baseline features)")
    dataset = _training_dataset(train_docs, config, thesaurus, train_sets)
    hyper = crf.CrfHyperparams(args.c1, args.c2, args.max_iter, args.tol)
    model = crf.train(dataset, hyper)
    labels = _predict_corpus(model, docs, config, thesaurus, pred_sets)
    _write(args.out, corpus.write_conll(docs, labels=labels))
    return 0


def cmd_repair(args) -> int:
    docs = _load_corpus(args.corpus)
    preds = pipeline.ingest_predictions(docs, _read(args.corpus), "input")
    repaired = [[pipeline.bio_repair(sent) for sent in doc] for doc in preds.labels]
    _write(args.out, corpus.write_conll(docs, labels=repaired))
    return 0


def cmd_eval(args) -> int:
    if args.f1s:
        values = [float(line) for line in _read(args.f1s).split()]
        stats = evaluation.run_stats(values)
        print(f"runs {len(values)}  mean_f1 {stats.mean:.3f}  std {stats.std:.3f}  fails {stats.fail_count}")
        return 0
    if not args.gold:
        raise CliError("pass --gold with --pred (or --f1s FILE for run statistics)")
    gold_docs = _load_corpus(args.gold)
    gold = [lab for doc in gold_docs for sent in doc.gold_labels() for lab in sent]
    pred_args = _parse_pred_args(args.pred)
    if not pred_args:
        raise CliError("pass at least one --pred NAME=PATH (or --f1s FILE)")
    pred_sets = _pred_sets(gold_docs, pred_args)
    first_name = pred_args[0][0]
    report = evaluation.score(gold, pred_sets[first_name].flat())
    print(f"micro precision {report.micro.precision:.3f}  recall {report.micro.recall:.3f}  "
          f"f1 {report.micro.f1:.3f}")
    print(f"macro precision {report.macro.precision:.3f}  recall {report.macro.recall:.3f}  "
          f"f1 {report.macro.f1:.3f}")
    if args.per_label:
        _write(args.per_label, report.per_label_csv())
    if args.confusion:
        _write(args.confusion, report.confusion_csv())
    if len(pred_args) >= 2:
        second_name = pred_args[1][0]
        result = evaluation.mcnemar(gold, pred_sets[first_name].flat(), pred_sets[second_name].flat())
        print(f"mcnemar {first_name} vs {second_name}: b {result.b}  c {result.c}  chi2 {result.chi2:.3f}")
    if args.error_combos:
        if len(pred_args) < 2:
            raise CliError("--error-combos needs at least two --pred files")
        rows = evaluation.error_combinations(gold, [pred_sets[n].flat() for n, _ in pred_args],
                                             top_n=args.top_n)
        _write(args.error_combos, evaluation.error_combinations_csv(rows, [n for n, _ in pred_args]))
    return 0


def cmd_chrono(args) -> int:
    thesaurus = _load_thesaurus_arg(args.thesaurus, False, "")
    lines = ["start,end,text"]
    ranges = []
    for raw in _read(args.infile).splitlines():
        text = raw.strip()
        if not text:
            continue
        result = chrono.normalize(text, thesaurus)
        if result is None:
            print(f"unparseable time expression: {text!r}", file=sys.stderr)
            continue
        ranges.append(result)
        lines.append(f"{result.start},{result.end},{text}")
    _write(args.out, "\n".join(lines) + "\n")
    if args.histogram:
        _write(args.histogram, chrono.year_histogram(ranges).to_csv())
    return 0


def cmd_stats(args) -> int:
    docs = _load_corpus(args.corpus)
    preds = pipeline.ingest_predictions(docs, _read(args.corpus), "input")
    spans = []
    for doc, doc_labels in zip(docs, preds.labels):
        for sentence, labels in zip(doc.sentences, doc_labels):
            repaired = pipeline.bio_repair(labels)
            spans.extend(pipeline.extract_spans(repaired, [t.surface for t in sentence]))
    _write(args.out, chrono.entity_stats_csv(chrono.entity_stats(spans)))
    return 0


def cmd_vocab(args) -> int:
    docs = _load_corpus(args.corpus)
    words = [tok.surface for doc in docs for tok in doc.tokens()]
    vocab = subword.induce_vocab(words, args.size)
    _write(args.out, vocab.to_text())
    return 0


def cmd_tokenize(args) -> int:
    vocab = subword.SubwordVocab.from_text(_read(args.vocab))
    docs = _load_corpus(args.corpus)
    if args.pieces:
        rendered = []
        for doc in docs:
            for sentence in doc.sentences:
                rendered.append(" ".join(subword.encode_sentence(vocab, sentence)))
        _write(args.pieces, "\n".join(rendered) + "\n")
    report = subword.fertility(vocab, docs)
    _write(args.report, report.to_csv())
    return 0


def cmd_index(args) -> int:
    index = search.SearchIndex()
    count = index.index_pages(search.read_page_records(_read(args.pages)))
    index.save(args.dir)
    print(f"indexed {count} pages into {args.dir}", file=sys.stderr)
    return 0


def _resolve_index_dir(args) -> str:
    directory = args.dir or os.environ.get(INDEX_DIR_ENV)
    if not directory:
        raise CliError(f"pass --dir or set {INDEX_DIR_ENV}")
    return directory


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    directory = _resolve_index_dir(args)
    index = search.SearchIndex.load(directory)
    app = create_app(index, index_dir=directory)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_query(args) -> int:
    index = search.SearchIndex.load(_resolve_index_dir(args))
    query = search.Query.from_json(json.loads(_read(args.query)))
    result = index.execute(query)
    _write(args.out, json.dumps(result.to_json(), indent=1, sort_keys=True) + "\n")
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greylit",
                                     description="Entity-driven search toolkit for grey literature.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        return p

    p = add("preprocess", cmd_preprocess, "split over-long sentences at punctuation")
    p.add_argument("--corpus", required=True, help="input CoNLL file")
    p.add_argument("--out", default="-", help="output CoNLL file (default stdout)")
    p.add_argument("--soft", type=int, default=60, help="soft token limit (default 60)")
    p.add_argument("--hard", type=int, default=90, help="hard token limit (default 90)")

    p = add("folds", cmd_folds, "balance documents into folds by token count")
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int, default=5, help="number of folds (default 5)")
    p.add_argument("--out", default="-", help="fold CSV (default stdout)")

    def crf_common(p, with_feature_toggles=True):
        p.add_argument("--thesaurus", help="thesaurus TSV for gazetteer features")
        if with_feature_toggles:
            p.add_argument("--window", type=int, default=5, help="feature window size (default 5)")
            p.add_argument("--no-shape", action="store_true", help="drop word-shape features")
            p.add_argument("--no-pos", action="store_true", help="drop POS features")
            p.add_argument("--no-thesaurus", action="store_true", help="drop thesaurus features")
        p.add_argument("--c1", type=float, default=0.1, help="L1 coefficient (default 0.1)")
        p.add_argument("--c2", type=float, default=0.1, help="L2 coefficient (default 0.1)")
        p.add_argument("--max-iter", type=int, default=200, help="optimizer iteration cap")
        p.add_argument("--tol", type=float, default=1e-5, help="gradient-norm stopping tolerance")

    p = add("crf-train", cmd_crf_train, "train a CRF tagger with baseline features")
    p.add_argument("--corpus", required=True, help="training CoNLL file with gold labels")
    p.add_argument("--model", required=True, help="output model JSON")
    p.add_argument("--tune-dev", help="dev CoNLL file: grid-search c1/c2 before training")
    crf_common(p)

    p = add("crf-predict", cmd_crf_predict, "label a corpus with a trained CRF")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", default="-", help="output CoNLL with predictions in column 4")
    p.add_argument("--thesaurus")
    p.add_argument("--pred", action="append", help="NAME=PATH prediction file the model stacks on")

    p = add("vote", cmd_vote, "majority-vote three prediction files")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pred", action="append", required=True, help="NAME=PATH, exactly three")
    p.add_argument("--priority", required=True, help="model name that wins three-way ties")
    p.add_argument("--out", default="-")

    p = add("ensemble", cmd_ensemble, "run one of the named ensemble presets")
    p.add_argument("--preset", required=True, help="vote, crf-all-preds, crf-primary-preds, "
                                                   "crf-all-preds-baseline, crf-primary-preds-baseline")
    p.add_argument("--corpus", required=True, help="corpus to label")
    p.add_argument("--pred", action="append", required=True, help="NAME=PATH predictions over --corpus")
    p.add_argument("--primary", required=True, help="name of the domain-model slot")
    p.add_argument("--train-corpus", help="gold corpus for CRF presets")
    p.add_argument("--train-pred", action="append", help="NAME=PATH predictions over --train-corpus")
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--thesaurus")
    p.add_argument("--c1", type=float, default=0.1)
    p.add_argument("--c2", type=float, default=0.1)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--out", default="-")

    p = add("repair", cmd_repair, "fix impossible I labels in a prediction file")
    p.add_argument("--corpus", required=True, help="CoNLL file whose last label column is repaired")
    p.add_argument("--out", default="-")

    p = add("eval", cmd_eval, "score predictions against gold labels")
    p.add_argument("--gold", help="gold CoNLL file")
    p.add_argument("--pred", action="append", help="NAME=PATH; repeat for McNemar/error mining")
    p.add_argument("--per-label", help="write the per-label P/R/F1 CSV here")
    p.add_argument("--confusion", help="write the 13x13 confusion CSV here")
    p.add_argument("--error-combos", help="write the error-combination CSV here")
    p.add_argument("--top-n", type=int, default=10, help="error combinations to keep (default 10)")
    p.add_argument("--f1s", help="file of per-run F1 values: print run statistics instead")

    p = add("chrono", cmd_chrono, "normalize time expressions to year ranges")
    p.add_argument("--in", dest="infile", required=True, help="one time expression per line")
    p.add_argument("--thesaurus", help="thesaurus TSV with PERIOD year ranges")
    p.add_argument("--out", default="-", help="CSV start,end,text (default stdout)")
    p.add_argument("--histogram", help="also write a year,count histogram CSV here")

    p = add("stats", cmd_stats, "entity statistics (totals, uniques, top 5) from predictions")
    p.add_argument("--corpus", required=True, help="CoNLL file with labels in the last column")
    p.add_argument("--out", default="-")

    p = add("vocab", cmd_vocab, "induce a subword vocabulary from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--size", type=int, required=True, help="target vocabulary size")
    p.add_argument("--out", default="-")

    p = add("tokenize", cmd_tokenize, "subword-encode a corpus and report fertility")
    p.add_argument("--vocab", required=True, help="vocabulary file, one piece per line")
    p.add_argument("--corpus", required=True)
    p.add_argument("--report", default="-", help="fertility CSV (default stdout)")
    p.add_argument("--pieces", help="also write encoded sentences here")

    p = add("index", cmd_index, "build a page index from JSON page records")
    p.add_argument("--pages", required=True, help="JSON-lines page records")
    p.add_argument("--dir", required=True, help="index directory to write")

    p = add("serve", cmd_serve, "serve the search HTTP API")
    p.add_argument("--dir", help=f"index directory (default ${INDEX_DIR_ENV})")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)

    p = add("query", cmd_query, "run one query JSON file against an index directory")
    p.add_argument("--dir", help=f"index directory (default ${INDEX_DIR_ENV})")
    p.add_argument("--query", required=True, help="query JSON file ('-' for stdin)")
    p.add_argument("--out", default="-")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
