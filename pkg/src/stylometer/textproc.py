"""Tokenization, sentence splitting and syllable counting.

Every feature extractor in the package goes through these three functions,
so their rules are kept small and fully deterministic.
"""

import re
from typing import NamedTuple

# Curly apostrophes are folded to ASCII so "Kanye’s" and "Kanye's" agree.
_APOSTROPHES = "'’‘"
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’‘][^\W_]+)*")

# Terminator run, optional closing quotes/brackets, then whitespace or end.
_SENT_END_RE = re.compile(r"[.!?]+[\"'”’)\]]*(?=\s|$)")

ABBREVIATIONS = frozenset(
    """
    mr mrs ms dr prof sr jr st mt ft vs etc inc ltd co corp jan feb mar apr
    jun jul aug sep sept oct nov dec gen gov sen rep lt col sgt capt rev
    no approx dept est fig u.s u.k u.n e.g i.e a.m p.m d.c
    """.split()
)

_VOWELS = set("aeiouy")


class Token(NamedTuple):
    surface: str
    lower: str
    is_alpha: bool


def tokenize(text):
    """Split ``text`` into maximal runs of letters, digits and internal apostrophes.

    Punctuation never appears inside a token ("re-enter" gives two tokens).
    A token is alphabetic when it contains letters and apostrophes only.
    """
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        surface = m.group()
        for a in _APOSTROPHES[1:]:
            surface = surface.replace(a, "'")
        is_alpha = surface.replace("'", "").isalpha()
        tokens.append(Token(surface, surface.lower(), is_alpha))
    return tokens


def words(text):
    """Lowercased alphabetic tokens of ``text``."""
    return [t.lower for t in tokenize(text) if t.is_alpha]


def _is_abbreviation(chunk):
    # chunk ends with a single '.'; look at the word that carries it
    m = re.search(r"(\S+)\.$", chunk)
    if m is None:
        return False
    word = m.group(1).lstrip("\"'(“[")
    if word.lower() in ABBREVIATIONS:
        return True
    # capital initials such as "J. Smith"
    return len(word) == 1 and word.isupper()


def split_sentences(text):
    """Split ``text`` into sentences.

    A sentence ends at a run of ``.``, ``!`` or ``?`` (plus any closing quotes)
    followed by whitespace or end of text, unless the period belongs to a
    known abbreviation or an initial. Line breaks always close a sentence, so
    a headline without final punctuation stays separate from the body.
    """
    sentences = []
    for line in text.splitlines():
        start = 0
        for m in _SENT_END_RE.finditer(line):
            if m.group().rstrip("\"'”’)]") == "." and _is_abbreviation(
                line[start:m.start() + 1]
            ):
                continue
            chunk = line[start:m.end()].strip()
            if chunk:
                sentences.append(chunk)
            start = m.end()
        rest = line[start:].strip()
        if rest:
            sentences.append(rest)
    return sentences


def count_paragraphs(text):
    """Number of non-empty lines."""
    return sum(1 for line in text.splitlines() if line.strip())


def count_syllables(word):
    """Heuristic syllable count of an alphabetic word.

    Counts vowel groups (y counts as a vowel), then drops a silent final "e"
    when it follows a consonant, except for a consonant + "le" ending
    ("table"). Never returns less than 1. Apostrophes are ignored.
    """
    w = word.replace("'", "").lower()
    if not w or not w.isalpha():
        raise ValueError(f"count_syllables needs an alphabetic word, got {word!r}")
    groups = 0
    prev_vowel = False
    for ch in w:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if len(w) >= 2 and w[-1] == "e" and w[-2] not in _VOWELS:
        consonant_le = w[-2] == "l" and len(w) >= 3 and w[-3] not in _VOWELS
        if not consonant_le:
            groups -= 1
    return max(groups, 1)
