"""Command-line entry point.

Every subcommand writes its outputs to ``--out`` and embeds the full run
configuration in them, so ``--config <report.json>`` replays a run. Exit
status is 0 on success, 1 for invalid input and 2 for runtime failures.
"""

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__
from .analysis import StatisticError, category_differences
from .corpus import CorpusError, corpus_stats, load_corpus
from .evaluation import (
    EvalError,
    FeatureConfig,
    ModelConfig,
    agreement,
    align_annotations,
    corpus_gold,
    cross_domain_eval,
    cross_validate,
    learning_curve,
    leave_one_domain_out,
    read_annotations,
)
from .features import DEFAULT_MIN_DF, LEXICON_BLOCKS, FeatureError, expand_feature_sets
from .lexicon import LexiconError, lexicon_path_from_env, load_dictionary
from .model import SVMError
from .parsetree import TreeError

log = logging.getLogger("stylometer")

COMMANDS = ("stats", "featurize", "cv", "curve", "transfer", "lodo", "kappa", "diff")
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


VALIDATION_ERRORS = (
    UsageError, CorpusError, LexiconError, FeatureError, EvalError,
    TreeError, StatisticError, SVMError,
)


@dataclass
class RunConfig:
    command: str = ""
    corpus: str | None = None
    train: str | None = None
    test: str | None = None
    format: str | None = None
    domain: str | None = None
    train_domain: str | None = None
    test_domain: str | None = None
    lexicon: str | None = None
    features: list = field(default_factory=list)
    C: float = 1.0
    seed: int = 0
    k: int = 5
    min_df: float = DEFAULT_MIN_DF
    max_n: int = 2
    tol: float = 1e-4
    max_iter: int = 1000
    alpha: float = 0.05
    body_only: bool | None = None
    fit_global: bool = False
    fractions: list = field(default_factory=lambda: [0.2, 0.4, 0.6, 0.8, 1.0])
    a: str | None = None
    b: str | None = None
    gold: str | None = None
    figures: bool = True

    def to_json(self):
        return asdict(self)


_FIELDS = {f.name for f in fields(RunConfig)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    parser = _Parser(prog="stylometer", description="Fake news feature extraction and experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help):
        p = sub.add_parser(name, help=help, argument_default=None)
        p.add_argument("--config", help="replay settings from a run config or report JSON")
        p.add_argument("--out", help="output directory (default: current directory)")
        p.add_argument("-v", "--verbose", action="store_true", default=False)
        return p

    def corpus_args(p, corpus=True):
        if corpus:
            p.add_argument("--corpus", help="JSONL file or legit/fake directory")
        p.add_argument("--format", choices=("jsonl", "paired_dirs"))
        p.add_argument("--domain", help="domain for every document of a paired_dirs corpus")
        p.add_argument("--body-only", dest="body_only", action="store_const", const=True,
                       help="ignore headlines")

    def feature_args(p):
        p.add_argument("--features", action="append",
                       help="feature set(s), comma-joined to combine; repeat for several rows")
        p.add_argument("--lexicon", help="LIWC-format .dic file or 'builtin' "
                                         "(default: $STYLOMETER_LEXICON)")
        p.add_argument("--min-df", dest="min_df", type=float)
        p.add_argument("--max-n", dest="max_n", type=int, help="longest n-gram (default 2)")

    def model_args(p, folds=True):
        p.add_argument("--C", type=float, help="SVM regularization (default 1)")
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        if folds:
            p.add_argument("--k", type=int, help="number of folds (default 5)")
            p.add_argument("--fit-global", dest="fit_global", action="store_const", const=True,
                           help="fit vocabularies and scaler on the whole corpus")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p = add("stats", "per-label word and sentence statistics")
    corpus_args(p)
    p.add_argument("--include-headline", dest="body_only", action="store_const", const=False)

    p = add("featurize", "write a feature matrix and its feature space")
    corpus_args(p)
    feature_args(p)

    p = add("cv", "stratified k-fold cross-validation")
    corpus_args(p)
    feature_args(p)
    model_args(p)

    p = add("curve", "learning curves over data fractions")
    corpus_args(p)
    feature_args(p)
    model_args(p)
    p.add_argument("--fractions", type=_float_list, help="e.g. 0.2,0.4,0.6,0.8,1.0")
    p.add_argument("--no-figures", dest="figures", action="store_const", const=False)

    p = add("transfer", "train on one corpus, test on another")
    corpus_args(p, corpus=False)
    p.add_argument("--train")
    p.add_argument("--test")
    p.add_argument("--train-domain", dest="train_domain")
    p.add_argument("--test-domain", dest="test_domain")
    feature_args(p)
    model_args(p, folds=False)

    p = add("lodo", "leave-one-domain-out evaluation")
    corpus_args(p)
    feature_args(p)
    model_args(p, folds=False)

    p = add("kappa", "agreement between two annotators")
    p.add_argument("--a", help="CSV doc_id,label of annotator A")
    p.add_argument("--b", help="CSV doc_id,label of annotator B")
    p.add_argument("--gold", help="gold labels: corpus JSONL/directory or doc_id,label CSV")

    p = add("diff", "lexicon category differences between classes")
    corpus_args(p)
    p.add_argument("--lexicon")
    p.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    p.add_argument("--no-figures", dest="figures", action="store_const", const=False)
    return parser


def _load_config_file(path):
    try:
        with open(path, encoding="utf-8") as f:
            d = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read --config {path}: {e}") from None
    if "run_config" in d:
        d = d["run_config"]
    unknown = set(d) - _FIELDS
    if unknown:
        raise UsageError(f"--config has unknown keys: {', '.join(sorted(unknown))}")
    return d


def resolve_config(args):
    values = {}
    if args.config:
        values.update(_load_config_file(args.config))
        if values.get("command", args.command) != args.command:
            raise UsageError(
                f"--config was written by '{values['command']}', not '{args.command}'"
            )
    for name, value in vars(args).items():
        if name in _FIELDS and value is not None:
            values[name] = value
    values["command"] = args.command
    cfg = RunConfig(**values)
    if cfg.body_only is None:
        # corpus statistics describe article bodies; models see headline + body
        cfg.body_only = args.command == "stats"
    if cfg.lexicon is None and args.command in ("featurize", "cv", "curve", "transfer", "lodo", "diff"):
        cfg.lexicon = lexicon_path_from_env()
    return cfg


def _require(cfg, *names):
    for name in names:
        if not getattr(cfg, name):
            raise UsageError(f"missing required flag --{name.replace('_', '-')}")


def _feature_rows(cfg):
    _require(cfg, "features")
    rows = []
    for entry in cfg.features:
        sets = tuple(s.strip() for s in entry.split(",") if s.strip())
        expand_feature_sets(sets)
        rows.append(sets)
    return rows


def _needs_lexicon(rows):
    return any(b in LEXICON_BLOCKS for sets in rows for b in expand_feature_sets(sets))


def _lexicon(cfg, needed=True):
    if not needed:
        return None
    if not cfg.lexicon:
        raise UsageError("this feature selection needs --lexicon (or STYLOMETER_LEXICON)")
    if cfg.lexicon != "builtin" and not Path(cfg.lexicon).exists():
        raise UsageError(f"lexicon file {cfg.lexicon} does not exist")
    return load_dictionary(cfg.lexicon)


def _corpus(path, cfg, domain=None):
    return load_corpus(path, format=cfg.format, domain=domain or cfg.domain)


def _feature_config(cfg, sets, lexicon):
    return FeatureConfig(
        feature_sets=sets, min_df=cfg.min_df, max_n=cfg.max_n,
        body_only=cfg.body_only, fit_global=cfg.fit_global, lexicon=lexicon,
    )


def _model_config(cfg):
    return ModelConfig(C=cfg.C, tol=cfg.tol, max_iter=cfg.max_iter)


def _dump_json(obj, path):
    text = json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=True) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def _write_csv(path, schema, cfg, header, rows):
    buf = io.StringIO()
    buf.write(f"# schema: stylometer.{schema}/{SCHEMA_VERSION}\n")
    buf.write("# run_config: " + json.dumps(cfg.to_json(), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return v


def _report_doc(schema, cfg, **payload):
    return {"schema": f"stylometer.{schema}/{SCHEMA_VERSION}", "run_config": cfg.to_json(), **payload}


def _table_row(report):
    avg = report.average
    return [
        avg["accuracy"],
        avg["legitimate_precision"], avg["legitimate_recall"], avg["legitimate_f1"],
        avg["fake_precision"], avg["fake_recall"], avg["fake_f1"],
    ]


_TABLE_HEADER = [
    "accuracy", "legitimate_precision", "legitimate_recall", "legitimate_f1",
    "fake_precision", "fake_recall", "fake_f1",
]


def cmd_stats(cfg, args, out):
    _require(cfg, "corpus")
    corpus = _corpus(cfg.corpus, cfg)
    stats = corpus_stats(corpus, body_only=cfg.body_only)
    doc = _report_doc("corpus-stats", cfg, corpus=corpus.name,
                      labels={k: asdict(v) for k, v in stats.items()})
    _dump_json(doc, out / "stats.json")
    for label, s in stats.items():
        print(f"{label}: {s.documents} docs, {s.total_words} words, "
              f"{s.mean_words} words/doc, {s.mean_sentences} sentences/doc")


def cmd_featurize(cfg, args, out):
    _require(cfg, "corpus")
    rows = _feature_rows(cfg)
    sets = tuple(s for r in rows for s in r)
    lexicon = _lexicon(cfg, _needs_lexicon(rows))
    corpus = _corpus(cfg.corpus, cfg)
    featurizer = _feature_config(cfg, sets, lexicon).featurizer().fit(corpus.documents)
    featurizer.train_matrix.write(out / "features.txt")
    space = featurizer.space.to_json()
    space["run_config"] = cfg.to_json()
    _dump_json(space, out / "feature_space.json")
    print(f"{len(corpus)} documents x {featurizer.dim} features")


def cmd_cv(cfg, args, out):
    _require(cfg, "corpus")
    rows = _feature_rows(cfg)
    lexicon = _lexicon(cfg, _needs_lexicon(rows))
    corpus = _corpus(cfg.corpus, cfg)
    results, table = [], []
    for sets in rows:
        rep = cross_validate(corpus, _feature_config(cfg, sets, lexicon), _model_config(cfg),
                             k=cfg.k, seed=cfg.seed, n_jobs=args.jobs)
        name = ",".join(sets)
        results.append({"feature_set": name, **rep.to_json()})
        table.append([name, rep.n_features] + _table_row(rep))
        print(f"{name} ({rep.n_features}): accuracy {rep.accuracy:.3f}")
    _dump_json(_report_doc("cv", cfg, corpus=corpus.name, results=results), out / "cv_report.json")
    _write_csv(out / "cv_table.csv", "cv", cfg, ["feature_set", "n_features"] + _TABLE_HEADER, table)


def cmd_curve(cfg, args, out):
    _require(cfg, "corpus")
    rows = _feature_rows(cfg)
    lexicon = _lexicon(cfg, _needs_lexicon(rows))
    corpus = _corpus(cfg.corpus, cfg)
    curves, table, results = {}, [], []
    for sets in rows:
        name = ",".join(sets)
        points, reports = learning_curve(
            corpus, _feature_config(cfg, sets, lexicon), cfg.fractions, _model_config(cfg),
            k=cfg.k, seed=cfg.seed, n_jobs=args.jobs, return_reports=True,
        )
        curves[name] = points
        for (frac, acc), rep in zip(points, reports):
            table.append([name, frac, acc])
            results.append({"feature_set": name, "fraction": frac, **rep.to_json()})
            print(f"{name} @ {frac:.0%}: accuracy {acc:.3f}")
    _write_csv(out / "curve.csv", "curve", cfg, ["feature_set", "fraction", "accuracy"], table)
    _dump_json(_report_doc("curve", cfg, corpus=corpus.name, results=results), out / "curve.json")
    if cfg.figures:
        from .plotting import plot_learning_curves
        plot_learning_curves(curves, out / "curve.png", title=corpus.name)


def cmd_transfer(cfg, args, out):
    _require(cfg, "train", "test")
    rows = _feature_rows(cfg)
    lexicon = _lexicon(cfg, _needs_lexicon(rows))
    train = _corpus(cfg.train, cfg, cfg.train_domain)
    test = _corpus(cfg.test, cfg, cfg.test_domain)
    table, results = [], []
    for sets in rows:
        name = ",".join(sets)
        rep = cross_domain_eval(train, test, _feature_config(cfg, sets, lexicon),
                                _model_config(cfg), seed=cfg.seed)
        avg = rep.average
        table.append([train.name, test.name, name, avg["accuracy"],
                      avg["legitimate_f1"], avg["fake_f1"]])
        results.append({"feature_set": name, **rep.to_json()})
        print(f"{train.name} -> {test.name}, {name}: accuracy {avg['accuracy']:.3f}, "
              f"F1 legit {avg['legitimate_f1']:.2f}, F1 fake {avg['fake_f1']:.2f}")
    _write_csv(out / "transfer.csv", "transfer", cfg,
               ["train", "test", "feature_set", "accuracy", "f1_legitimate", "f1_fake"], table)
    _dump_json(_report_doc("transfer", cfg, results=results), out / "transfer.json")


def cmd_lodo(cfg, args, out):
    _require(cfg, "corpus")
    rows = _feature_rows(cfg)
    lexicon = _lexicon(cfg, _needs_lexicon(rows))
    corpus = _corpus(cfg.corpus, cfg)
    table, results = [], []
    for sets in rows:
        name = ",".join(sets)
        reports = leave_one_domain_out(corpus, _feature_config(cfg, sets, lexicon),
                                       _model_config(cfg), seed=cfg.seed, n_jobs=args.jobs)
        for dom, rep in reports.items():
            avg = rep.average
            table.append([dom, name, avg["accuracy"], avg["legitimate_f1"], avg["fake_f1"]])
            results.append({"feature_set": name, "domain": dom, **rep.to_json()})
            print(f"{dom:<14} {name}: accuracy {avg['accuracy']:.3f}")
    _write_csv(out / "lodo.csv", "lodo", cfg,
               ["domain", "feature_set", "accuracy", "f1_legitimate", "f1_fake"], table)
    _dump_json(_report_doc("lodo", cfg, corpus=corpus.name, results=results), out / "lodo.json")


def cmd_kappa(cfg, args, out):
    _require(cfg, "a", "b")
    a = read_annotations(cfg.a)
    b = read_annotations(cfg.b)
    gold = None
    if cfg.gold:
        gold = (read_annotations(cfg.gold) if cfg.gold.endswith(".csv")
                else corpus_gold(load_corpus(cfg.gold, format=cfg.format)))
    la, lb, lg = align_annotations(a, b, gold)
    rep = agreement(la, lb, lg)
    doc = rep.to_json()
    doc["schema"] = f"stylometer.agreement/{SCHEMA_VERSION}"
    doc["run_config"] = cfg.to_json()
    _dump_json(doc, out / "agreement.json")
    kappa = "undefined" if rep.kappa is None else f"{rep.kappa:.4f}"
    print(f"n={rep.n} observed agreement {rep.observed:.4f} kappa {kappa}")
    if rep.annotator_accuracy:
        print(f"accuracy a={rep.annotator_accuracy['a']:.4f} b={rep.annotator_accuracy['b']:.4f}")


def cmd_diff(cfg, args, out):
    _require(cfg, "corpus")
    lexicon = _lexicon(cfg, True)
    corpus = _corpus(cfg.corpus, cfg)
    diffs = category_differences(corpus, lexicon, alpha=cfg.alpha, body_only=cfg.body_only)
    _write_csv(out / "diff.csv", "diff", cfg,
               ["category", "mean_legit", "mean_fake", "diff", "t", "p", "significant"],
               [[d.category, d.mean_legit, d.mean_fake, d.diff, d.t, d.p, str(d.significant).lower()]
                for d in diffs])
    _dump_json(_report_doc("diff", cfg, corpus=corpus.name, categories=[asdict(d) for d in diffs]),
               out / "diff.json")
    n_sig = sum(d.significant for d in diffs)
    print(f"{len(diffs)} categories differ, {n_sig} significant at alpha={cfg.alpha}")
    if cfg.figures:
        from .plotting import plot_category_differences
        plot_category_differences(diffs, out / "diff.png", title=corpus.name)


HANDLERS = {
    "stats": cmd_stats,
    "featurize": cmd_featurize,
    "cv": cmd_cv,
    "curve": cmd_curve,
    "transfer": cmd_transfer,
    "lodo": cmd_lodo,
    "kappa": cmd_kappa,
    "diff": cmd_diff,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(f"choose a subcommand: {', '.join(COMMANDS)}")
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s: %(message)s",
        )
        cfg = resolve_config(args)
        out = Path(args.out or ".")
        out.mkdir(parents=True, exist_ok=True)
        HANDLERS[args.command](cfg, args, out)
    except VALIDATION_ERRORS as e:
        print(f"stylometer: error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001
        print(f"stylometer: failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
