"""Cross-validation, transfer experiments, metrics and annotator agreement."""

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .corpus import LABELS, Corpus, CorpusError
from .features import DEFAULT_MIN_DF, Featurizer
from .model import predict_many, train_svm

log = logging.getLogger(__name__)

SCHEMA_REPORT = "stylometer.eval-report/1"
SCHEMA_AGREEMENT = "stylometer.agreement/1"


class EvalError(ValueError):
    pass


@dataclass
class FeatureConfig:
    feature_sets: tuple
    min_df: float = DEFAULT_MIN_DF
    max_n: int = 2
    body_only: bool = False
    fit_global: bool = False
    lexicon: object = field(default=None, repr=False, compare=False)

    def to_json(self):
        return {
            "feature_sets": list(self.feature_sets),
            "min_df": self.min_df,
            "max_n": self.max_n,
            "body_only": self.body_only,
            "fit_global": self.fit_global,
        }

    def featurizer(self):
        return Featurizer(
            self.feature_sets, lexicon=self.lexicon, min_df=self.min_df,
            max_n=self.max_n, body_only=self.body_only,
        )


@dataclass
class ModelConfig:
    C: float = 1.0
    tol: float = 1e-4
    max_iter: int = 1000


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    undefined: list = field(default_factory=list)


@dataclass
class FoldMetrics:
    accuracy: float
    per_class: dict
    confusion: dict
    n: int

    def to_json(self):
        return {
            "accuracy": self.accuracy,
            "per_class": {k: asdict(v) for k, v in self.per_class.items()},
            "confusion": self.confusion,
            "n": self.n,
        }


@dataclass
class EvalReport:
    folds: list
    config: dict = field(default_factory=dict)
    n_features: int | None = None

    @property
    def average(self):
        """Unweighted mean of the fold metrics."""
        avg = {"accuracy": float(np.mean([f.accuracy for f in self.folds]))}
        for label in LABELS:
            for m in ("precision", "recall", "f1"):
                avg[f"{label}_{m}"] = float(
                    np.mean([getattr(f.per_class[label], m) for f in self.folds])
                )
        return avg

    @property
    def accuracy(self):
        return self.average["accuracy"]

    def to_json(self):
        return {
            "schema": SCHEMA_REPORT,
            "config": self.config,
            "n_features": self.n_features,
            "average": self.average,
            "folds": [f.to_json() for f in self.folds],
        }


@dataclass
class AgreementReport:
    n: int
    observed: float
    expected: float
    kappa: float | None
    annotator_accuracy: dict | None = None

    def to_json(self):
        return {
            "schema": SCHEMA_AGREEMENT,
            "n": self.n,
            "observed_agreement": self.observed,
            "expected_agreement": self.expected,
            "kappa": self.kappa,
            "kappa_defined": self.kappa is not None,
            "annotator_accuracy": self.annotator_accuracy,
        }


def stratified_kfold(labels, k, seed):
    """Split indices into ``k`` disjoint folds that preserve class ratios.

    Each class is shuffled and dealt round-robin; the dealing position carries
    over between classes so overall fold sizes also differ by at most one.
    """
    if k < 2:
        raise EvalError("k must be at least 2")
    labels = list(labels)
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    pos = 0
    for cls in sorted(set(labels), key=str):
        idx = np.array([i for i, lab in enumerate(labels) if lab == cls])
        if len(idx) < k:
            raise EvalError(f"class {cls!r} has {len(idx)} members, fewer than k={k}")
        for i in rng.permutation(idx):
            folds[pos % k].append(int(i))
            pos += 1
    return [sorted(f) for f in folds]


def stratified_subsample(labels, fraction, seed):
    """Sorted indices of a per-class random sample of ``fraction`` of the data."""
    if not 0 < fraction <= 1:
        raise EvalError(f"fraction must be in (0, 1], got {fraction}")
    labels = list(labels)
    if fraction == 1:
        return list(range(len(labels)))
    rng = np.random.default_rng(seed)
    chosen = []
    for cls in sorted(set(labels), key=str):
        idx = np.array([i for i, lab in enumerate(labels) if lab == cls])
        take = max(1, int(round(fraction * len(idx))))
        chosen.extend(int(i) for i in rng.permutation(idx)[:take])
    return sorted(chosen)


def compute_metrics(pred, gold):
    """Accuracy and per-class precision/recall/F1, each class taken as positive in turn.

    A zero denominator yields 0 and the metric name is recorded in
    ``undefined``.
    """
    pred, gold = list(pred), list(gold)
    if len(pred) != len(gold):
        raise EvalError(f"{len(pred)} predictions for {len(gold)} gold labels")
    if not gold:
        raise EvalError("no predictions to score")
    per_class = {}
    for pos in LABELS:
        tp = sum(p == pos and g == pos for p, g in zip(pred, gold))
        fp = sum(p == pos and g != pos for p, g in zip(pred, gold))
        fn = sum(p != pos and g == pos for p, g in zip(pred, gold))
        undefined = []
        if tp + fp:
            precision = tp / (tp + fp)
        else:
            precision = 0.0
            undefined.append("precision")
        if tp + fn:
            recall = tp / (tp + fn)
        else:
            recall = 0.0
            undefined.append("recall")
        if precision + recall:
            f1 = 2 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
            undefined.append("f1")
        per_class[pos] = ClassMetrics(precision, recall, f1, tp + fn, undefined)
    confusion = {
        "tp": sum(p == "fake" and g == "fake" for p, g in zip(pred, gold)),
        "fp": sum(p == "fake" and g != "fake" for p, g in zip(pred, gold)),
        "fn": sum(p != "fake" and g == "fake" for p, g in zip(pred, gold)),
        "tn": sum(p != "fake" and g != "fake" for p, g in zip(pred, gold)),
    }
    accuracy = sum(p == g for p, g in zip(pred, gold)) / len(gold)
    return FoldMetrics(accuracy, per_class, confusion, len(gold))


def run_split(train_docs, test_docs, fcfg, mcfg, seed, fit_docs=None):
    """Fit features and model on ``train_docs`` and score ``test_docs``."""
    featurizer = fcfg.featurizer().fit(fit_docs if fit_docs is not None else train_docs)
    space = featurizer.space
    Z_train = space.standardize(featurizer.transform(train_docs))
    model = train_svm(
        Z_train, [d.label for d in train_docs], C=mcfg.C, seed=seed,
        tol=mcfg.tol, max_iter=mcfg.max_iter, space_id=space.id,
    )
    Z_test = space.standardize(featurizer.transform(test_docs))
    pred, _ = predict_many(model, Z_test)
    return compute_metrics(pred, [d.label for d in test_docs]), space.dim


def _fold_job(args):
    corpus, train_idx, test_idx, fcfg, mcfg, seed = args
    docs = corpus.documents
    fit_docs = docs if fcfg.fit_global else None
    return run_split(
        [docs[i] for i in train_idx], [docs[i] for i in test_idx], fcfg, mcfg, seed, fit_docs
    )


def _map(fn, jobs, n_jobs):
    if n_jobs and n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def cross_validate(corpus, fcfg, mcfg=None, k=5, seed=0, n_jobs=1):
    """Stratified k-fold CV; features are refitted on each training split."""
    mcfg = mcfg or ModelConfig()
    corpus.require_both_labels()
    folds = stratified_kfold(corpus.labels, k, seed)
    all_idx = set(range(len(corpus)))
    jobs = []
    for test_idx in folds:
        train_idx = sorted(all_idx.difference(test_idx))
        jobs.append((corpus, train_idx, test_idx, fcfg, mcfg, seed))
    results = _map(_fold_job, jobs, n_jobs)
    config = {
        "protocol": "cross_validate",
        "corpus": corpus.name,
        "k": k,
        "seed": seed,
        "features": fcfg.to_json(),
        "model": asdict(mcfg),
    }
    return EvalReport(
        [r[0] for r in results], config, n_features=int(np.mean([r[1] for r in results]))
    )


def learning_curve(corpus, fcfg, fractions, mcfg=None, k=5, seed=0, n_jobs=1, return_reports=False):
    """Cross-validated accuracy on stratified subsamples of increasing size."""
    points = []
    reports = []
    for frac in sorted(fractions):
        idx = stratified_subsample(corpus.labels, frac, seed)
        sub = corpus.subset(idx)
        counts = [sub.labels.count(lab) for lab in LABELS]
        if min(counts) < k:
            raise EvalError(
                f"subsample at fraction {frac} has class counts {counts}, too small for k={k}"
            )
        report = cross_validate(sub, fcfg, mcfg, k=k, seed=seed, n_jobs=n_jobs)
        report.config["fraction"] = frac
        points.append((frac, report.accuracy))
        reports.append(report)
    return (points, reports) if return_reports else points


def cross_domain_eval(train, test, fcfg, mcfg=None, seed=0):
    """Train on one corpus, test on another."""
    mcfg = mcfg or ModelConfig()
    train.require_both_labels()
    if not test.documents:
        raise EvalError("test corpus is empty")
    overlap = {d.id for d in train} & {d.id for d in test}
    if overlap:
        log.warning("train and test corpora share %d document ids", len(overlap))
    metrics, dim = run_split(train.documents, test.documents, fcfg, mcfg, seed)
    config = {
        "protocol": "cross_domain",
        "train": train.name,
        "test": test.name,
        "seed": seed,
        "features": fcfg.to_json(),
        "model": asdict(mcfg),
    }
    return EvalReport([metrics], config, n_features=dim)


def _lodo_job(args):
    corpus, domain, fcfg, mcfg, seed = args
    train = [d for d in corpus if d.domain != domain]
    test = [d for d in corpus if d.domain == domain]
    return run_split(train, test, fcfg, mcfg, seed)


def leave_one_domain_out(corpus, fcfg, mcfg=None, seed=0, n_jobs=1):
    """One train/test run per domain, holding that domain out. Keys follow corpus order."""
    mcfg = mcfg or ModelConfig()
    domains = list(dict.fromkeys(corpus.domains))
    if len(domains) < 2:
        raise EvalError("leave-one-domain-out needs at least two domains")
    for dom in domains:
        held = {d.label for d in corpus if d.domain == dom}
        rest = {d.label for d in corpus if d.domain != dom}
        if len(held) < 2:
            raise EvalError(f"domain {dom!r} contains a single class")
        if len(rest) < 2:
            raise EvalError(f"training data without {dom!r} contains a single class")
    results = _map(_lodo_job, [(corpus, d, fcfg, mcfg, seed) for d in domains], n_jobs)
    reports = {}
    for dom, (metrics, dim) in zip(domains, results):
        config = {
            "protocol": "leave_one_domain_out",
            "corpus": corpus.name,
            "held_out": dom,
            "seed": seed,
            "features": fcfg.to_json(),
            "model": asdict(mcfg),
        }
        reports[dom] = EvalReport([metrics], config, n_features=dim)
    return reports


def agreement(ann1, ann2, gold=None):
    """Observed agreement and Cohen's kappa between two annotators.

    Kappa is ``None`` when chance agreement is 1 (both annotators constant
    and identical).
    """
    ann1, ann2 = list(ann1), list(ann2)
    if len(ann1) != len(ann2):
        raise EvalError(f"annotators labeled {len(ann1)} and {len(ann2)} items")
    if not ann1:
        raise EvalError("no annotations")
    n = len(ann1)
    agree = sum(a == b for a, b in zip(ann1, ann2))
    cats = set(ann1) | set(ann2)
    chance = sum(ann1.count(c) * ann2.count(c) for c in cats)
    po, pe = agree / n, chance / (n * n)
    # integer numerator and denominator keep round cases exact (0.6, not 0.6000000000000001)
    kappa = None if chance >= n * n else (n * agree - chance) / (n * n - chance)
    acc = None
    if gold is not None:
        gold = list(gold)
        if len(gold) != n:
            raise EvalError(f"{len(gold)} gold labels for {n} annotations")
        acc = {
            "a": sum(a == g for a, g in zip(ann1, gold)) / n,
            "b": sum(b == g for b, g in zip(ann2, gold)) / n,
        }
    return AgreementReport(n, po, pe, kappa, acc)


def read_annotations(path):
    """Read a ``doc_id,label`` CSV (header optional) into an ordered dict."""
    out = {}
    with open(path, encoding="utf-8", newline="") as f:
        for lineno, row in enumerate(csv.reader(f), 1):
            if not row or not "".join(row).strip():
                continue
            if len(row) < 2:
                raise CorpusError(f"{path}:{lineno}: expected doc_id,label")
            doc_id, label = row[0].strip(), row[1].strip().lower()
            if lineno == 1 and (doc_id, label) == ("doc_id", "label"):
                continue
            if label not in LABELS:
                raise CorpusError(f"{path}:{lineno}: unknown label {row[1]!r}")
            if doc_id in out:
                raise CorpusError(f"{path}:{lineno}: duplicate doc_id {doc_id!r}")
            out[doc_id] = label
    return out


def align_annotations(a, b, gold=None):
    """Label lists for the documents both annotators labeled, in ``a``'s order."""
    if set(a) != set(b):
        only_a = len(set(a) - set(b))
        only_b = len(set(b) - set(a))
        raise EvalError(
            f"annotation files cover different documents ({only_a} only in a, {only_b} only in b)"
        )
    ids = list(a)
    g = None
    if gold is not None:
        missing = [i for i in ids if i not in gold]
        if missing:
            raise EvalError(f"{len(missing)} annotated documents have no gold label, e.g. {missing[0]!r}")
        g = [gold[i] for i in ids]
    return [a[i] for i in ids], [b[i] for i in ids], g


def corpus_gold(corpus: Corpus):
    return {d.id: d.label for d in corpus}
