"""Feature spaces, tf-idf vectors, the readability battery and matrix assembly.

Feature families (blocks) and their column sources:

=================  ==========================================================
ngrams             tf-idf over lowercase unigrams and bigrams
syntax             tf-idf over ``grandparent^parent->word`` production rules
punctuation        eleven punctuation classes per 100 tokens
liwc-summary       computable LIWC summary variables
liwc-linguistic    21 linguistic-process category proportions
liwc-psych         40 psychological-process category proportions
readability        26 counts, rates and readability indices
=================  ==========================================================

``liwc-complete`` expands to summary + linguistic + psych + punctuation and
``all`` to every block.
"""

import hashlib
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from urllib.parse import quote, unquote

import numpy as np
import scipy.sparse as sp

from . import lexicon as lx
from . import parsetree, textproc

log = logging.getLogger(__name__)

DEFAULT_MIN_DF = 0.02
SCHEMA_SPACE = "stylometer.feature-space/1"
SCHEMA_MATRIX = "stylometer.feature-matrix/1"

TFIDF_KINDS = ("ngram", "syntax")
BLOCKS = (
    "ngrams",
    "punctuation",
    "liwc-summary",
    "liwc-linguistic",
    "liwc-psych",
    "readability",
    "syntax",
)
FEATURE_SETS = BLOCKS[:5] + ("liwc-complete", "readability", "syntax", "all")
_EXPANSIONS = {
    "liwc-complete": ("liwc-summary", "liwc-linguistic", "liwc-psych", "punctuation"),
    "all": BLOCKS,
}
LEXICON_BLOCKS = ("liwc-summary", "liwc-linguistic", "liwc-psych")

READABILITY_COLUMNS = (
    "characters",
    "letters",
    "words",
    "types",
    "type_token_ratio",
    "sentences",
    "paragraphs",
    "syllables",
    "mean_word_length",
    "mean_sentence_length",
    "mean_syllables_per_word",
    "complex_words",
    "complex_word_fraction",
    "long_words",
    "long_word_fraction",
    "characters_per_100",
    "letters_per_100",
    "types_per_100",
    "sentences_per_100",
    "paragraphs_per_100",
    "syllables_per_100",
    "complex_words_per_100",
    "flesch_reading_ease",
    "flesch_kincaid_grade",
    "gunning_fog",
    "automated_readability_index",
)


class FeatureError(ValueError):
    pass


def expand_feature_sets(names):
    """Blocks for a selection of feature-set names, in canonical order."""
    wanted = set()
    for name in names:
        if name in _EXPANSIONS:
            wanted.update(_EXPANSIONS[name])
        elif name in BLOCKS:
            wanted.add(name)
        else:
            raise FeatureError(
                f"unknown feature set {name!r} (choose from {', '.join(FEATURE_SETS)})"
            )
    return [b for b in BLOCKS if b in wanted]


@dataclass
class SparseVector:
    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=float)
        if len(self.indices) and (
            np.any(np.diff(self.indices) <= 0)
            or self.indices[0] < 0
            or self.indices[-1] >= self.dim
        ):
            raise FeatureError("sparse indices must be strictly increasing and in range")
        if not np.all(np.isfinite(self.values)):
            raise FeatureError("sparse values must be finite")

    def to_dense(self):
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def norm(self):
        return float(np.sqrt(np.dot(self.values, self.values)))


@dataclass
class FeatureSpace:
    """Fitted column layout for one family (or the concatenation of several)."""

    kind: str
    columns: list
    idf: np.ndarray | None = None
    min_df: float | None = None
    max_n: int | None = None
    blocks: list = field(default_factory=list)
    scaler_mean: np.ndarray | None = None
    scaler_std: np.ndarray | None = None
    constant: np.ndarray | None = None

    def __post_init__(self):
        self.columns = list(self.columns)
        self.index = {name: i for i, name in enumerate(self.columns)}
        if len(self.index) != len(self.columns):
            raise FeatureError("duplicate column names")
        if (self.idf is not None) != (self.kind in TFIDF_KINDS):
            raise FeatureError(f"idf must be present exactly for {TFIDF_KINDS}")

    @property
    def dim(self):
        return len(self.columns)

    @property
    def id(self):
        h = hashlib.sha1()
        h.update(self.kind.encode())
        h.update("\x00".join(self.columns).encode())
        if self.idf is not None:
            h.update(self.idf.tobytes())
        return h.hexdigest()[:12]

    def fit_scaler(self, X):
        """Store per-column mean and standard deviation of ``X``."""
        A = _as_array(X)
        self.scaler_mean = A.mean(axis=0)
        std = A.std(axis=0)
        self.constant = std < 1e-12
        self.scaler_std = np.where(self.constant, 1.0, std)
        return self

    def standardize(self, X):
        if self.scaler_mean is None:
            raise FeatureError("scaler not fitted")
        A = _as_array(X)
        if A.shape[1] != self.dim:
            raise FeatureError(f"matrix has {A.shape[1]} columns, space has {self.dim}")
        return (A - self.scaler_mean) / self.scaler_std

    def to_json(self):
        scaler = None
        if self.scaler_mean is not None:
            scaler = {
                "mean": self.scaler_mean.tolist(),
                "std": self.scaler_std.tolist(),
                "constant": self.constant.tolist(),
            }
        return {
            "schema": SCHEMA_SPACE,
            "id": self.id,
            "kind": self.kind,
            "columns": self.columns,
            "idf": None if self.idf is None else self.idf.tolist(),
            "scaler": scaler,
            "pruning": {"min_df": self.min_df, "max_n": self.max_n},
            "blocks": self.blocks,
        }

    @classmethod
    def from_json(cls, d):
        if d.get("schema") != SCHEMA_SPACE:
            raise FeatureError(f"not a feature-space document (schema {d.get('schema')!r})")
        space = cls(
            kind=d["kind"],
            columns=d["columns"],
            idf=None if d["idf"] is None else np.array(d["idf"]),
            min_df=d["pruning"]["min_df"],
            max_n=d["pruning"]["max_n"],
            blocks=d.get("blocks", []),
        )
        if d.get("scaler"):
            space.scaler_mean = np.array(d["scaler"]["mean"])
            space.scaler_std = np.array(d["scaler"]["std"])
            space.constant = np.array(d["scaler"]["constant"], dtype=bool)
        return space


@dataclass
class FeatureMatrix:
    doc_ids: list
    matrix: sp.csr_matrix
    provenance: list = field(default_factory=list)

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix, dtype=float)
        if self.matrix.shape[0] != len(self.doc_ids):
            raise FeatureError("row count does not match document ids")

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def dim(self):
        return self.matrix.shape[1]

    def row(self, i):
        r = self.matrix.getrow(i)
        r.sort_indices()
        return SparseVector(r.indices, r.data, self.dim)

    def toarray(self):
        return self.matrix.toarray()

    def write(self, path):
        m = self.matrix.tocsr()
        m.sort_indices()
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"# schema: {SCHEMA_MATRIX}\n")
            f.write(f"# provenance: {' '.join(self.provenance)}\n")
            f.write(f"dims {m.shape[0]} {m.shape[1]}\n")
            for i, doc_id in enumerate(self.doc_ids):
                lo, hi = m.indptr[i], m.indptr[i + 1]
                cells = " ".join(
                    f"{j}:{float(v)!r}" for j, v in zip(m.indices[lo:hi], m.data[lo:hi]) if v != 0
                )
                f.write(quote(doc_id, safe="/:._-") + (" " + cells if cells else "") + "\n")

    @classmethod
    def read(cls, path):
        with open(path, encoding="utf-8") as f:
            lines = [line.rstrip("\n") for line in f]
        body = [line for line in lines if not line.startswith("#")]
        provenance = []
        for line in lines:
            if line.startswith("# provenance:"):
                provenance = line.split(":", 1)[1].split()
        if not body or not body[0].startswith("dims "):
            raise FeatureError(f"{path}: missing 'dims' header")
        _, rows, cols = body[0].split()
        rows, cols = int(rows), int(cols)
        ids, r_idx, c_idx, vals = [], [], [], []
        for i, line in enumerate(body[1:]):
            parts = line.split(" ")
            ids.append(unquote(parts[0]))
            for cell in parts[1:]:
                j, v = cell.split(":")
                r_idx.append(i)
                c_idx.append(int(j))
                vals.append(float(v))
        if len(ids) != rows:
            raise FeatureError(f"{path}: header says {rows} rows, found {len(ids)}")
        m = sp.csr_matrix((vals, (r_idx, c_idx)), shape=(rows, cols))
        return cls(ids, m, provenance)


def _as_array(X):
    if isinstance(X, FeatureMatrix):
        return X.toarray()
    if sp.issparse(X):
        return X.toarray()
    return np.asarray(X, dtype=float)


def _doc_text(doc, body_only=False):
    return doc if isinstance(doc, str) else doc.text(body_only=body_only)


def ngram_terms(text, max_n=2):
    toks = [t.lower for t in textproc.tokenize(text)]
    terms = list(toks)
    for n in range(2, max_n + 1):
        terms.extend(" ".join(toks[i:i + n]) for i in range(len(toks) - n + 1))
    return terms


@lru_cache(maxsize=4096)
def _tree_rules(tree_str):
    return tuple(str(f) for f in parsetree.production_rule_features(parsetree.parse_ptb(tree_str)))


def syntax_terms(doc):
    if not doc.parse_trees:
        return None
    terms = []
    for t in doc.parse_trees:
        try:
            terms.extend(_tree_rules(t))
        except parsetree.TreeError as e:
            raise FeatureError(f"document {doc.id!r}: bad parse tree: {e}") from None
    return terms


def _terms(doc, kind, max_n, body_only):
    if kind == "ngram":
        return ngram_terms(_doc_text(doc, body_only), max_n)
    if kind == "syntax":
        return syntax_terms(doc)
    raise FeatureError(f"kind {kind!r} has no vocabulary")


def fit_vocabulary(train_docs, kind, min_df=DEFAULT_MIN_DF, max_n=2, body_only=False):
    """Fit a tf-idf feature space on training documents.

    Terms seen in fewer than ``min_df * len(train_docs)`` documents are
    dropped; idf is ``ln((1 + N) / (1 + df)) + 1``. Columns are sorted.
    """
    if not train_docs:
        raise FeatureError("cannot fit a vocabulary on zero documents")
    if not 0 <= min_df < 1:
        raise FeatureError(f"min_df must be in [0, 1), got {min_df}")
    n = len(train_docs)
    df = Counter()
    missing = 0
    for doc in train_docs:
        terms = _terms(doc, kind, max_n, body_only)
        if terms is None:
            missing += 1
            continue
        df.update(set(terms))
    if missing:
        log.warning("%d of %d documents have no parse trees; their syntax vectors are zero", missing, n)
    threshold = min_df * n
    columns = sorted(t for t, c in df.items() if c >= threshold)
    if not columns:
        raise FeatureError(f"{kind} vocabulary is empty after pruning (min_df={min_df})")
    idf = np.array([math.log((1 + n) / (1 + df[t])) + 1 for t in columns])
    return FeatureSpace(kind, columns, idf=idf, min_df=min_df, max_n=max_n if kind == "ngram" else None)


def vectorize(doc, space, body_only=False):
    """L2-normalized tf-idf vector of ``doc``; out-of-vocabulary terms are ignored."""
    terms = _terms(doc, space.kind, space.max_n or 2, body_only)
    counts = Counter(t for t in (terms or ()) if t in space.index)
    if not counts:
        return SparseVector([], [], space.dim)
    idx = np.array(sorted(space.index[t] for t in counts))
    inv = {space.index[t]: c for t, c in counts.items()}
    vals = np.array([inv[j] for j in idx], dtype=float) * space.idf[idx]
    vals /= np.linalg.norm(vals)
    return SparseVector(idx, vals, space.dim)


def transform_tfidf(docs, space, body_only=False):
    rows, cols, vals = [], [], []
    missing = 0
    for i, doc in enumerate(docs):
        if space.kind == "syntax" and not doc.parse_trees:
            missing += 1
        v = vectorize(doc, space, body_only)
        rows.extend([i] * len(v.indices))
        cols.extend(v.indices)
        vals.extend(v.values)
    if missing and space.dim:
        log.warning("%d documents without parse trees get zero syntax vectors", missing)
    m = sp.csr_matrix((vals, (rows, cols)), shape=(len(docs), space.dim))
    return FeatureMatrix([d.id for d in docs], m, [space.id])


def readability_indices(words, sentences, syllables, letters, complex_words):
    """Flesch reading ease, Flesch-Kincaid grade, Gunning fog and ARI."""
    wps = words / sentences
    spw = syllables / words
    return (
        206.835 - 1.015 * wps - 84.6 * spw,
        0.39 * wps + 11.8 * spw - 15.59,
        0.4 * (wps + 100.0 * complex_words / words),
        4.71 * letters / words + 0.5 * wps - 21.43,
    )


@lru_cache(maxsize=8192)
def _readability(text):
    tokens = textproc.tokenize(text)
    words = [t.lower for t in tokens if t.is_alpha]
    sentences = textproc.split_sentences(text)
    W, S = len(words), len(sentences)
    if W == 0 or S == 0:
        raise FeatureError("readability needs at least one word and one sentence")
    letters = sum(len(w.replace("'", "")) for w in words)
    characters = sum(not ch.isspace() for ch in text)
    syl = [textproc.count_syllables(w) for w in words]
    n_syl = sum(syl)
    types = len(set(words))
    paragraphs = textproc.count_paragraphs(text)
    complex_words = sum(s >= 3 for s in syl)
    long_words = sum(len(w.replace("'", "")) > 6 for w in words)
    wps = W / S
    spw = n_syl / W
    cpw = letters / W
    per100 = 100.0 / W
    return (
        characters,
        letters,
        W,
        types,
        types / W,
        S,
        paragraphs,
        n_syl,
        cpw,
        wps,
        spw,
        complex_words,
        complex_words / W,
        long_words,
        long_words / W,
        characters * per100,
        letters * per100,
        types * per100,
        S * per100,
        paragraphs * per100,
        n_syl * per100,
        complex_words * per100,
        *readability_indices(W, S, n_syl, letters, complex_words),
    )


def readability_features(doc, body_only=False):
    """The 26 named readability columns (see ``READABILITY_COLUMNS``).

    Words are alphabetic tokens; "complex" means three or more syllables and
    "long" more than six letters. Indices:

    * FRE  = 206.835 - 1.015 W/S - 84.6 Syl/W
    * FKGL = 0.39 W/S + 11.8 Syl/W - 15.59
    * Fog  = 0.4 (W/S + 100 Complex/W)
    * ARI  = 4.71 Letters/W + 0.5 W/S - 21.43
    """
    return np.array(_readability(_doc_text(doc, body_only)), dtype=float)


@lru_cache(maxsize=8192)
def _punct(text):
    return tuple(lx.punctuation_profile(text))


def _dense_block(block, docs, lexicon, summary_names, body_only):
    rows = []
    for doc in docs:
        text = _doc_text(doc, body_only)
        if block == "punctuation":
            rows.append(_punct(text))
        elif block == "readability":
            rows.append(_readability(text))
        elif block == "liwc-summary":
            rows.append(lx.summary_features(text, lexicon, summary_names))
        elif block == "liwc-linguistic":
            rows.append(lx.category_proportions(textproc.tokenize(text), lexicon, lx.LINGUISTIC))
        elif block == "liwc-psych":
            rows.append(
                lx.category_proportions(textproc.tokenize(text), lexicon, lx.PSYCHOLOGICAL)
            )
    return np.array(rows, dtype=float).reshape(len(docs), -1)


def concat_features(parts):
    """Column-wise concatenation of row-aligned matrices."""
    if not parts:
        raise FeatureError("nothing to concatenate")
    ids = parts[0].doc_ids
    for p in parts[1:]:
        if list(p.doc_ids) != list(ids):
            raise FeatureError("feature matrices are not aligned on the same documents")
    m = sp.hstack([p.matrix for p in parts], format="csr")
    prov = [x for p in parts for x in p.provenance]
    return FeatureMatrix(list(ids), m, prov)


class Featurizer:
    """Fits every selected block on training documents and stacks them."""

    def __init__(self, feature_sets, lexicon=None, min_df=DEFAULT_MIN_DF, max_n=2, body_only=False):
        self.blocks = expand_feature_sets(feature_sets)
        if not self.blocks:
            raise FeatureError("no feature sets selected")
        self.lexicon = lexicon
        self.min_df = min_df
        self.max_n = max_n
        self.body_only = body_only
        self.summary_names = ()
        if any(b in LEXICON_BLOCKS for b in self.blocks):
            if lexicon is None:
                raise FeatureError("LIWC feature sets need a lexicon (--lexicon or STYLOMETER_LEXICON)")
            for block, cats in (("liwc-linguistic", lx.LINGUISTIC), ("liwc-psych", lx.PSYCHOLOGICAL)):
                missing = [c for c in cats if c not in lexicon] if block in self.blocks else []
                if missing:
                    raise FeatureError(f"{block}: categories missing from lexicon: {', '.join(missing)}")
            if "liwc-summary" in self.blocks:
                self.summary_names = lx.available_summary(lexicon)
        self.spaces = {}
        self.space = None

    def _block_columns(self, block):
        if block in ("ngrams", "syntax"):
            return self.spaces[block].columns
        return {
            "punctuation": lx.PUNCTUATION_CLASSES,
            "readability": READABILITY_COLUMNS,
            "liwc-summary": self.summary_names,
            "liwc-linguistic": lx.LINGUISTIC,
            "liwc-psych": lx.PSYCHOLOGICAL,
        }[block]

    def fit(self, docs):
        docs = list(docs)
        self.spaces = {}
        for block, kind in (("ngrams", "ngram"), ("syntax", "syntax")):
            if block not in self.blocks:
                continue
            if kind == "syntax" and not any(d.parse_trees for d in docs):
                log.warning("no training document has parse trees; syntax block is empty")
                self.spaces[block] = FeatureSpace("syntax", [], idf=np.zeros(0))
                continue
            self.spaces[block] = fit_vocabulary(
                docs, kind, self.min_df, self.max_n, self.body_only
            )
        columns = []
        for block in self.blocks:
            columns.extend(f"{block}:{c}" for c in self._block_columns(block))
        self.space = FeatureSpace(
            "combined", columns, min_df=self.min_df, max_n=self.max_n,
            blocks=[[b, len(self._block_columns(b))] for b in self.blocks],
        )
        X = self.transform(docs)
        self.space.fit_scaler(X)
        self.train_matrix = X
        return self

    def transform(self, docs):
        docs = list(docs)
        if self.space is None:
            raise FeatureError("featurizer not fitted")
        parts = []
        for block in self.blocks:
            if block in self.spaces:
                part = transform_tfidf(docs, self.spaces[block], self.body_only)
            else:
                dense = _dense_block(block, docs, self.lexicon, self.summary_names, self.body_only)
                part = FeatureMatrix([d.id for d in docs], sp.csr_matrix(dense), [block])
            parts.append(part)
        X = concat_features(parts)
        X.provenance = [self.space.id] + X.provenance
        return X

    @property
    def dim(self):
        return self.space.dim
