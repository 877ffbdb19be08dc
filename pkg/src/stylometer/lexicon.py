"""LIWC-format dictionaries, category proportions and punctuation profiles.

The ``.dic`` layout is::

    %
    1	posemo
    2	negemo
    %
    happ*	1
    sad	2

Category ids are integers; a trailing ``*`` makes a pattern match every word
with that prefix. Lookups try the exact pattern table first and fall back to
the longest matching wildcard prefix.
"""

import logging
import os
import unicodedata
from importlib import resources

import numpy as np

from . import textproc

log = logging.getLogger(__name__)

# LIWC 2015 output inventory, grouped the way the feature sets use it.
SUMMARY = ("analytic", "clout", "authentic", "tone", "wps", "sixltr", "dic")
LINGUISTIC = (
    "function", "pronoun", "ppron", "i", "we", "you", "shehe", "they", "ipron",
    "article", "prep", "auxverb", "adverb", "conj", "negate",
    "verb", "adj", "compare", "interrog", "number", "quant",
)
PSYCHOLOGICAL = (
    "affect", "posemo", "negemo", "anx", "anger", "sad",
    "social", "family", "friend", "female", "male",
    "cogproc", "insight", "cause", "discrep", "tentat", "certain", "differ",
    "percept", "see", "hear", "feel",
    "bio", "body", "health", "sexual", "ingest",
    "drives", "affiliation", "achieve", "power", "reward", "risk",
    "focuspast", "focuspresent", "focusfuture",
    "relativ", "motion", "space", "time",
)
PERSONAL_CONCERNS = ("work", "leisure", "home", "money", "relig", "death")
INFORMAL = ("informal", "swear", "netspeak", "assent", "nonflu", "filler")

PUNCTUATION_CLASSES = (
    "period", "comma", "colon", "semic", "qmark", "exclam",
    "dash", "quote", "apostro", "parenth", "otherp",
)

# Summary variables whose LIWC definitions are not public.
PROPRIETARY_SUMMARY = ("clout", "authentic", "tone")

# Categorical-dynamic index: 30 + positive terms - negative terms (percentages).
_CDI_PLUS = ("article", "prep")
_CDI_MINUS = ("ppron", "ipron", "auxverb", "conj", "adverb", "negate")

_PUNCT_CHARS = {
    ".": "period",
    ",": "comma",
    ":": "colon",
    ";": "semic",
    "?": "qmark",
    "!": "exclam",
    "-": "dash", "‐": "dash", "‑": "dash", "‒": "dash", "–": "dash", "—": "dash",
    '"': "quote", "“": "quote", "”": "quote", "„": "quote", "«": "quote", "»": "quote",
    "'": "apostro", "’": "apostro", "‘": "apostro",
    "(": "parenth", ")": "parenth",
}


class LexiconError(ValueError):
    pass


class Lexicon:
    """Immutable word-category dictionary."""

    def __init__(self, categories, patterns):
        self.categories = dict(categories)
        self._exact = {}
        self._prefix = {}
        for pattern, ids in patterns.items():
            ids = frozenset(ids)
            if pattern.endswith("*"):
                self._prefix[pattern[:-1]] = ids
            else:
                self._exact[pattern] = ids
        self._by_name = {}
        for cid, name in self.categories.items():
            self._by_name.setdefault(name.lower(), cid)
        self._max_prefix = max((len(p) for p in self._prefix), default=0)
        self._cache = {}

    @property
    def patterns(self):
        out = [(p, ids) for p, ids in self._exact.items()]
        out += [(p + "*", ids) for p, ids in self._prefix.items()]
        return sorted(out)

    @property
    def names(self):
        return [self.categories[c] for c in sorted(self.categories)]

    def __contains__(self, name):
        return name.lower() in self._by_name

    def category_id(self, name):
        try:
            return self._by_name[name.lower()]
        except KeyError:
            raise LexiconError(f"category {name!r} not in lexicon") from None

    def match(self, word):
        """Category ids for a lowercase word (empty if unmatched)."""
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        ids = self._exact.get(word)
        if ids is None:
            ids = frozenset()
            for n in range(min(len(word), self._max_prefix), -1, -1):
                found = self._prefix.get(word[:n])
                if found is not None:
                    ids = found
                    break
        self._cache[word] = ids
        return ids


def parse_dictionary(text):
    """Parse ``.dic`` text into a :class:`Lexicon`.

    Lines in the word section whose category fields are not plain integers
    (context rules such as ``like (02 134)125/464``) are skipped with a warning.
    """
    lines = text.replace("\r\n", "\n").lstrip("﻿").split("\n")
    delims = [i for i, line in enumerate(lines) if line.strip() == "%"]
    if len(delims) < 2:
        raise LexiconError("dictionary must start with a '%'-delimited category header")
    start, end = delims[0], delims[1]
    categories = {}
    for lineno in range(start + 1, end):
        fields = lines[lineno].split()
        if not fields:
            continue
        if len(fields) < 2 or not fields[0].isdigit():
            raise LexiconError(f"line {lineno + 1}: bad category header {lines[lineno]!r}")
        categories[int(fields[0])] = fields[1]
    patterns = {}
    skipped = 0
    for lineno in range(end + 1, len(lines)):
        line = lines[lineno]
        if not line.strip() or line.lstrip().startswith("//"):
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        fields = [f.strip() for f in fields if f.strip()]
        pattern = fields[0].lower()
        if "*" in pattern[:-1]:
            raise LexiconError(f"line {lineno + 1}: '*' only allowed word-finally in {pattern!r}")
        id_tokens = " ".join(fields[1:]).split()
        if not id_tokens:
            raise LexiconError(f"line {lineno + 1}: pattern {pattern!r} has no categories")
        if not all(tok.isdigit() for tok in id_tokens):
            skipped += 1
            continue
        ids = set()
        for tok in id_tokens:
            cid = int(tok)
            if cid not in categories:
                raise LexiconError(
                    f"line {lineno + 1}: pattern {pattern!r} references undeclared category {cid}"
                )
            ids.add(cid)
        patterns.setdefault(pattern, set()).update(ids)
    if skipped:
        log.warning("skipped %d dictionary lines with context-dependent rules", skipped)
    return Lexicon(categories, patterns)


def load_dictionary(path):
    """Read a ``.dic`` file; ``"builtin"`` selects the small bundled dictionary."""
    if str(path) == "builtin":
        text = resources.files("stylometer").joinpath("data/mini_liwc.dic").read_text("utf-8")
    else:
        with open(path, encoding="utf-8-sig", errors="replace") as f:
            text = f.read()
    return parse_dictionary(text)


def lexicon_path_from_env():
    return os.environ.get("STYLOMETER_LEXICON") or None


def category_counts(tokens, lexicon):
    """Map category id -> number of alphabetic tokens in it, plus token total."""
    counts = {}
    total = 0
    for tok in tokens:
        if not tok.is_alpha:
            continue
        total += 1
        for cid in lexicon.match(tok.lower):
            counts[cid] = counts.get(cid, 0) + 1
    return counts, total


def category_proportions(tokens, lexicon, categories):
    """Fraction of alphabetic tokens falling in each named category."""
    missing = [c for c in categories if c not in lexicon]
    if missing:
        raise LexiconError(f"categories missing from lexicon: {', '.join(missing)}")
    counts, total = category_counts(tokens, lexicon)
    out = np.zeros(len(categories))
    if total == 0:
        return out
    for j, name in enumerate(categories):
        out[j] = counts.get(lexicon.category_id(name), 0) / total
    return out


def available_summary(lexicon):
    """Summary variables computable for ``lexicon``, warning about the rest."""
    names = []
    for name in SUMMARY:
        if name in PROPRIETARY_SUMMARY:
            continue
        if name == "analytic" and not all(c in lexicon for c in _CDI_PLUS + _CDI_MINUS):
            continue
        names.append(name)
    dropped = [n for n in SUMMARY if n not in names]
    if dropped and not getattr(lexicon, "_summary_warned", False):
        lexicon._summary_warned = True  # once per lexicon, not once per fold
        log.warning(
            "summary variables %s are not computable and are omitted (%d of %d kept)",
            ", ".join(dropped), len(names), len(SUMMARY),
        )
    return tuple(names)


def summary_features(text, lexicon, names):
    """Computable LIWC summary variables, as percentages or words per sentence."""
    tokens = textproc.tokenize(text)
    counts, total = category_counts(tokens, lexicon)
    alpha = [t.lower for t in tokens if t.is_alpha]
    out = np.zeros(len(names))
    if total == 0:
        return out

    def pct(cat):
        return 100.0 * counts.get(lexicon.category_id(cat), 0) / total

    for j, name in enumerate(names):
        if name == "analytic":
            out[j] = 30 + sum(pct(c) for c in _CDI_PLUS) - sum(pct(c) for c in _CDI_MINUS)
        elif name == "wps":
            out[j] = total / max(len(textproc.split_sentences(text)), 1)
        elif name == "sixltr":
            out[j] = 100.0 * sum(len(w.replace("'", "")) > 6 for w in alpha) / total
        elif name == "dic":
            out[j] = 100.0 * sum(bool(lexicon.match(w)) for w in alpha) / total
        else:
            raise LexiconError(f"summary variable {name!r} is not computable")
    return out


def punctuation_class(ch):
    """LIWC punctuation class of a character, or None if it is not punctuation."""
    cls = _PUNCT_CHARS.get(ch)
    if cls is not None:
        return cls
    if unicodedata.category(ch)[0] in "PS":
        return "otherp"
    return None


def punctuation_profile(text):
    """Counts of the eleven punctuation classes per 100 tokens."""
    out = np.zeros(len(PUNCTUATION_CLASSES))
    n_tokens = len(textproc.tokenize(text))
    if n_tokens == 0:
        return out
    index = {c: i for i, c in enumerate(PUNCTUATION_CLASSES)}
    for ch in text:
        cls = punctuation_class(ch)
        if cls is not None:
            out[index[cls]] += 1
    return out * (100.0 / n_tokens)
