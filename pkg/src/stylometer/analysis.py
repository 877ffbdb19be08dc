"""Legitimate-vs-fake lexicon category differences with one-tailed Welch tests."""

import math
from dataclasses import dataclass

import numpy as np

from . import textproc
from .lexicon import category_counts

LESS = "less"
GREATER = "greater"


class StatisticError(ValueError):
    pass


@dataclass
class CategoryDifference:
    category: str
    mean_legit: float
    mean_fake: float
    diff: float
    t: float
    p: float
    significant: bool


def _betacf(a, b, x, max_iter=300, eps=1e-15):
    # Continued fraction for I_x(a, b), modified Lentz evaluation.
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise StatisticError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_tail(t, df):
    """P(T >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return 0.5 * betainc(df / 2.0, 0.5, df / (df + t * t))


def t_cdf(t, df):
    tail = t_tail(t, df)
    return tail if t < 0 else 1.0 - tail


def t_sf(t, df):
    tail = t_tail(t, df)
    return tail if t > 0 else 1.0 - tail


def welch_t_one_tailed(a, b, direction):
    """Welch's t statistic for ``mean(a) - mean(b)`` and its one-tailed p-value.

    ``direction`` is the alternative: ``"less"`` (mean of a below mean of b)
    or ``"greater"``. Degrees of freedom follow Welch-Satterthwaite.
    """
    if direction not in (LESS, GREATER):
        raise ValueError(f"direction must be {LESS!r} or {GREATER!r}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise StatisticError("each sample needs at least two values")
    va, vb = a.var(ddof=1) / len(a), b.var(ddof=1) / len(b)
    diff = a.mean() - b.mean()
    se2 = va + vb
    if se2 == 0:
        if diff == 0:
            raise StatisticError("t is undefined: both samples are constant with equal means")
        t = math.copysign(math.inf, diff)
        return t, (0.0 if (t < 0) == (direction == LESS) else 1.0)
    t = float(diff / math.sqrt(se2))
    df = se2 ** 2 / (va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1))
    p = t_cdf(t, df) if direction == LESS else t_sf(t, df)
    return t, float(p)


def document_percentages(docs, lexicon, body_only=False):
    """Matrix of per-document category percentages, columns in lexicon id order."""
    ids = sorted(lexicon.categories)
    col = {cid: j for j, cid in enumerate(ids)}
    out = np.zeros((len(docs), len(ids)))
    for i, doc in enumerate(docs):
        counts, total = category_counts(textproc.tokenize(doc.text(body_only)), lexicon)
        if total:
            for cid, c in counts.items():
                out[i, col[cid]] = 100.0 * c / total
    return [lexicon.categories[c] for c in ids], out


def category_differences(corpus, lexicon, alpha=0.05, body_only=False):
    """Per-category mean percentage difference (legitimate minus fake).

    Categories with no difference are dropped; the rest are sorted by
    difference, largest first, and tested one-tailed in the observed direction.
    """
    legit = [d for d in corpus if d.label == "legitimate"]
    fake = [d for d in corpus if d.label == "fake"]
    if len(legit) < 2 or len(fake) < 2:
        raise StatisticError("each class needs at least two documents")
    names, pl = document_percentages(legit, lexicon, body_only)
    _, pf = document_percentages(fake, lexicon, body_only)
    out = []
    for j, name in enumerate(names):
        ml, mf = float(pl[:, j].mean()), float(pf[:, j].mean())
        diff = ml - mf
        if diff == 0:
            continue
        t, p = welch_t_one_tailed(pl[:, j], pf[:, j], GREATER if diff > 0 else LESS)
        out.append(CategoryDifference(name, ml, mf, diff, t, p, p < alpha))
    out.sort(key=lambda c: (-c.diff, c.category))
    return out
