"""Labeled news documents, corpus readers/writers and descriptive statistics."""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import textproc

log = logging.getLogger(__name__)

LABELS = ("legitimate", "fake")
DOMAINS = (
    "sports",
    "business",
    "entertainment",
    "politics",
    "technology",
    "education",
    "celebrity",
)

# File-name prefixes used by the released FakeNewsAMT text files.
_DOMAIN_PREFIXES = {
    "biz": "business",
    "edu": "education",
    "entmt": "entertainment",
    "polit": "politics",
    "sports": "sports",
    "tech": "technology",
}

_LABEL_DIRS = (("legit", "legitimate"), ("fake", "fake"))


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus input."""


@dataclass(frozen=True)
class Document:
    id: str
    domain: str
    label: str
    headline: str
    body: str
    parse_trees: tuple | None = None

    def __post_init__(self):
        if not self.id:
            raise CorpusError("document id must be non-empty")
        if self.label not in LABELS:
            raise CorpusError(f"document {self.id!r}: unknown label {self.label!r}")
        if self.domain not in DOMAINS:
            raise CorpusError(f"document {self.id!r}: unknown domain {self.domain!r}")
        if not self.body.strip():
            raise CorpusError(f"document {self.id!r}: empty body")
        if self.parse_trees is not None and not isinstance(self.parse_trees, tuple):
            object.__setattr__(self, "parse_trees", tuple(self.parse_trees))

    def text(self, body_only=False):
        """Text used for feature extraction: headline, newline, body."""
        if body_only or not self.headline:
            return self.body
        return self.headline + "\n" + self.body

    def to_json(self):
        d = {
            "id": self.id,
            "domain": self.domain,
            "label": self.label,
            "headline": self.headline,
            "body": self.body,
        }
        if self.parse_trees is not None:
            d["parse_trees"] = list(self.parse_trees)
        return d


@dataclass
class Corpus:
    name: str
    documents: list = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for doc in self.documents:
            if doc.id in seen:
                raise CorpusError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    @property
    def labels(self):
        return [d.label for d in self.documents]

    @property
    def domains(self):
        return [d.domain for d in self.documents]

    def subset(self, indices, name=None):
        return Corpus(name or self.name, [self.documents[i] for i in indices])

    def require_both_labels(self):
        present = set(self.labels)
        missing = [lab for lab in LABELS if lab not in present]
        if missing:
            raise CorpusError(
                f"corpus {self.name!r} has no {', '.join(missing)} documents"
            )


@dataclass
class LabelStats:
    documents: int
    total_words: int
    total_sentences: int
    mean_words: float
    mean_sentences: float


def _document_from_mapping(obj, where):
    if not isinstance(obj, dict):
        raise CorpusError(f"{where}: expected a JSON object")
    missing = [k for k in ("id", "domain", "label", "body") if k not in obj]
    if missing:
        raise CorpusError(f"{where}: missing field(s) {', '.join(missing)}")
    label = str(obj["label"]).strip().lower()
    if label not in LABELS:
        raise CorpusError(f"{where}: unknown label {obj['label']!r}")
    domain = str(obj["domain"]).strip().lower()
    if domain not in DOMAINS:
        raise CorpusError(f"{where}: unknown domain {obj['domain']!r}")
    trees = obj.get("parse_trees")
    if trees is not None and not (
        isinstance(trees, list) and all(isinstance(t, str) for t in trees)
    ):
        raise CorpusError(f"{where}: parse_trees must be a list of strings")
    try:
        return Document(
            id=str(obj["id"]),
            domain=domain,
            label=label,
            headline=str(obj.get("headline") or ""),
            body=str(obj["body"]),
            parse_trees=tuple(trees) if trees is not None else None,
        )
    except CorpusError as e:
        raise CorpusError(f"{where}: {e}") from None


def read_jsonl(path, name=None):
    path = Path(path)
    docs = []
    seen = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusError(f"{where}: malformed JSON ({e.msg})") from None
            doc = _document_from_mapping(obj, where)
            if doc.id in seen:
                raise CorpusError(
                    f"{where}: duplicate id {doc.id!r} (first seen on line {seen[doc.id]})"
                )
            seen[doc.id] = lineno
            docs.append(doc)
    return Corpus(name or path.stem, docs)


def write_jsonl(corpus, path):
    with open(path, "w", encoding="utf-8") as f:
        for doc in corpus:
            f.write(json.dumps(doc.to_json(), ensure_ascii=False) + "\n")


def _read_text(path):
    raw = path.read_bytes()
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError:
        log.warning("%s is not valid UTF-8; decoding as latin-1", path)
        return raw.decode("latin-1")


def _read_meta(path):
    meta = {}
    with open(path, encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            if "file" not in row or "domain" not in row:
                raise CorpusError(f"{path}: expected columns 'file' and 'domain'")
            meta[row["file"].strip()] = row["domain"].strip().lower()
    return meta


def _infer_domain(stem):
    for prefix, domain in _DOMAIN_PREFIXES.items():
        if stem.lower().startswith(prefix):
            return domain
    return None


def read_paired_dirs(path, domain=None, name=None):
    """Read a directory holding ``legit/`` and ``fake/`` text files.

    The first line of each file is the headline, the rest the body. Domains
    come from ``domain`` if given, else from a ``meta.csv`` (columns
    ``file,domain``; ``file`` may be ``legit/x.txt`` or the bare file name),
    else from the FakeNewsAMT file-name prefixes (``biz``, ``tech``, ...).
    """
    root = Path(path)
    meta_path = root / "meta.csv"
    meta = _read_meta(meta_path) if meta_path.exists() else {}
    if domain is not None:
        domain = domain.strip().lower()
        if domain not in DOMAINS:
            raise CorpusError(f"unknown domain override {domain!r}")
    docs = []
    for dirname, label in _LABEL_DIRS:
        sub = root / dirname
        if not sub.is_dir():
            raise CorpusError(f"{root}: missing {dirname}/ subdirectory")
        for fp in sorted(sub.glob("*.txt")):
            rel = f"{dirname}/{fp.name}"
            dom = domain or meta.get(rel) or meta.get(fp.name) or _infer_domain(fp.name)
            if dom is None:
                raise CorpusError(f"{rel}: no domain (use meta.csv or a domain override)")
            if dom not in DOMAINS:
                raise CorpusError(f"{rel}: unknown domain {dom!r}")
            text = _read_text(fp).replace("\r\n", "\n")
            headline, _, body = text.strip("\n").partition("\n")
            doc_id = f"{dirname}/{fp.stem}"
            if not body.strip():
                raise CorpusError(f"{rel}: empty body")
            docs.append(Document(doc_id, dom, label, headline.strip(), body.strip()))
    return Corpus(name or root.name, docs)


def load_corpus(path, format=None, domain=None, name=None):
    """Load a corpus from a JSONL file or a paired legit/fake directory.

    ``format`` is ``"jsonl"`` or ``"paired_dirs"``; if omitted it is inferred
    from whether ``path`` is a directory.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus path {path} does not exist")
    if format is None:
        format = "paired_dirs" if path.is_dir() else "jsonl"
    if format == "jsonl":
        return read_jsonl(path, name=name)
    if format == "paired_dirs":
        return read_paired_dirs(path, domain=domain, name=name)
    raise CorpusError(f"unknown corpus format {format!r}")


def corpus_stats(corpus, body_only=True):
    """Per-label document, word and sentence counts.

    Word counts use alphabetic tokens. By default only the body is counted,
    matching how the reference datasets describe their excerpts.
    """
    if len(corpus) == 0:
        raise CorpusError("corpus is empty")
    stats = {}
    for label in LABELS:
        docs = [d for d in corpus if d.label == label]
        if not docs:
            continue
        n_words = n_sents = 0
        for d in docs:
            text = d.text(body_only=body_only)
            n_words += len(textproc.words(text))
            n_sents += len(textproc.split_sentences(text))
        stats[label] = LabelStats(
            documents=len(docs),
            total_words=n_words,
            total_sentences=n_sents,
            mean_words=round(n_words / len(docs), 1),
            mean_sentences=round(n_sents / len(docs), 1),
        )
    return stats
