import random
from collections import defaultdict

import pytest

from stylometer.corpus import Corpus, Document

LEGIT_WORDS = (
    "government officials announced comprehensive economic legislation yesterday "
    "according investigators reported significant financial documents committee "
    "spokesperson confirmed international negotiations regarding infrastructure "
    "he she said insight because however considered"
).split()
FAKE_WORDS = (
    "wow big news i love this deal you will get free money today great fun "
    "my we amazing now shocking totally"
).split()

_POS = {"he": "PRP", "she": "PRP", "i": "PRP", "you": "PRP", "we": "PRP", "said": "VBD"}


def _tree(words):
    leaves = " ".join(f"({_POS.get(w.lower(), 'NN')} {w})" for w in words[1:])
    return f"(ROOT (S (NP (DT {words[0]})) (VP {leaves})))"


def make_toy_corpus(n_per_class=20, seed=0, domains=("politics", "sports"), trees=True, name="toy"):
    """Small corpus where legitimate documents are long-winded and fake ones terse."""
    rng = random.Random(seed)
    docs = []
    for i in range(n_per_class):
        for label in ("legitimate", "fake"):
            if label == "legitimate":
                n_sent, lo, hi, pool, end = rng.randint(3, 5), 12, 20, LEGIT_WORDS, "."
            else:
                n_sent, lo, hi, pool, end = rng.randint(3, 5), 4, 8, FAKE_WORDS, "!"
            sentences = []
            for _ in range(n_sent):
                ws = [rng.choice(pool) for _ in range(rng.randint(lo, hi))]
                if label == "legitimate" and len(ws) > 6:
                    ws[5] = ws[5] + ","
                sentences.append(ws)
            body = " ".join(" ".join(ws).capitalize() + end for ws in sentences)
            tree_list = None
            if trees:
                tree_list = [_tree([w.strip(",") for w in ws]) for ws in sentences]
            docs.append(
                Document(
                    id=f"{label[:5]}-{i:03d}",
                    domain=domains[i % len(domains)],
                    label=label,
                    headline=f"Headline number {i}",
                    body=body,
                    parse_trees=tree_list,
                )
            )
    return Corpus(name, docs)


@pytest.fixture
def toy_corpus():
    return make_toy_corpus()


# -- per-criterion summary -------------------------------------------------

_CRITERIA = {}
_OUTCOMES = defaultdict(list)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _CRITERIA[item.nodeid] = (m.args[0], m.args[1])


def pytest_runtest_logreport(report):
    crit = _CRITERIA.get(report.nodeid)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _OUTCOMES[crit].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), outcomes in sorted(_OUTCOMES.items()):
        if "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        elif "skipped" in outcomes:
            status = "PASS (partial: some checks skipped)"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {num:>2}: {status:<5} {title}")
