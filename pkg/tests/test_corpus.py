import json

import pytest

from stylometer.corpus import (
    Corpus,
    CorpusError,
    Document,
    corpus_stats,
    load_corpus,
    read_paired_dirs,
    write_jsonl,
)


def doc(id="d1", label="fake", body="One two three. Four.", **kw):
    kw.setdefault("domain", "sports")
    kw.setdefault("headline", "")
    return Document(id=id, label=label, body=body, **kw)


def test_document_validation():
    with pytest.raises(CorpusError, match="label"):
        doc(label="satire")
    with pytest.raises(CorpusError, match="domain"):
        doc(domain="weather")
    with pytest.raises(CorpusError, match="empty body"):
        doc(body="   ")
    with pytest.raises(CorpusError):
        doc(id="")


def test_text_joins_headline_and_body():
    d = doc(headline="Big news", body="It happened.")
    assert d.text() == "Big news\nIt happened."
    assert d.text(body_only=True) == "It happened."


def test_duplicate_ids_rejected():
    with pytest.raises(CorpusError, match="duplicate"):
        Corpus("c", [doc(), doc()])


def test_jsonl_round_trip(tmp_path, toy_corpus):
    p = tmp_path / "toy.jsonl"
    write_jsonl(toy_corpus, p)
    back = load_corpus(p, name="toy")
    assert back == toy_corpus
    write_jsonl(back, tmp_path / "again.jsonl")
    assert (tmp_path / "again.jsonl").read_bytes() == p.read_bytes()


def test_jsonl_errors_carry_line_numbers(tmp_path):
    good = json.dumps(doc().to_json())
    p = tmp_path / "bad.jsonl"
    p.write_text(good + "\n{not json\n", encoding="utf-8")
    with pytest.raises(CorpusError, match=r"bad\.jsonl:2: malformed JSON"):
        load_corpus(p)

    p.write_text(good + "\n\n" + good + "\n", encoding="utf-8")
    with pytest.raises(CorpusError, match=r":3: duplicate id 'd1' \(first seen on line 1\)"):
        load_corpus(p)

    bad_label = dict(doc().to_json(), label="satire")
    p.write_text(json.dumps(bad_label) + "\n", encoding="utf-8")
    with pytest.raises(CorpusError, match=r":1: unknown label"):
        load_corpus(p)

    p.write_text(json.dumps({"id": "x", "label": "fake"}) + "\n", encoding="utf-8")
    with pytest.raises(CorpusError, match="missing field"):
        load_corpus(p)


def test_jsonl_labels_and_domains_case_folded(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text(json.dumps({"id": "a", "label": "Fake", "domain": "Sports", "body": "x."}) + "\n")
    (d,) = load_corpus(p).documents
    assert (d.label, d.domain, d.headline) == ("fake", "sports", "")


def _write(path, text, encoding="utf-8"):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode(encoding))


def test_paired_dirs_with_prefix_domains(tmp_path):
    _write(tmp_path / "legit" / "polit01.txt", "Senate passes bill\nThe senate voted today.\n")
    _write(tmp_path / "fake" / "tech02.txt", "Phones banned\nAll phones are banned now!\n")
    c = read_paired_dirs(tmp_path)
    assert [(d.id, d.label, d.domain) for d in c] == [
        ("legit/polit01", "legitimate", "politics"),
        ("fake/tech02", "fake", "technology"),
    ]
    assert c[0].headline == "Senate passes bill"
    assert c[0].body == "The senate voted today."


def test_paired_dirs_domain_sources(tmp_path):
    _write(tmp_path / "legit" / "a.txt", "H\nBody one.")
    _write(tmp_path / "fake" / "a.txt", "H\nBody two.")
    with pytest.raises(CorpusError, match="no domain"):
        read_paired_dirs(tmp_path)
    (tmp_path / "meta.csv").write_text("file,domain\nlegit/a.txt,education\na.txt,business\n")
    c = read_paired_dirs(tmp_path)
    assert [d.domain for d in c] == ["education", "business"]
    c = load_corpus(tmp_path, domain="celebrity")
    assert {d.domain for d in c} == {"celebrity"}
    with pytest.raises(CorpusError, match="unknown domain override"):
        read_paired_dirs(tmp_path, domain="weather")


def test_paired_dirs_latin1_fallback(tmp_path, caplog):
    _write(tmp_path / "legit" / "biz1.txt", "Café news\nThe café opened.", "latin-1")
    _write(tmp_path / "fake" / "biz2.txt", "H\nBody.")
    c = read_paired_dirs(tmp_path)
    assert c[0].headline == "Café news"
    assert "not valid UTF-8" in caplog.text


def test_paired_dirs_missing_subdir(tmp_path):
    _write(tmp_path / "legit" / "biz1.txt", "H\nBody.")
    with pytest.raises(CorpusError, match="missing fake/"):
        read_paired_dirs(tmp_path)


def test_load_missing_path(tmp_path):
    with pytest.raises(CorpusError, match="does not exist"):
        load_corpus(tmp_path / "nope.jsonl")


def test_stats_example():
    c = Corpus("c", [doc(headline="Ignored headline here"), doc(id="d2", label="legitimate")])
    s = corpus_stats(c)
    assert s["fake"].mean_words == 4
    assert s["fake"].mean_sentences == 2
    assert s["fake"].documents == 1
    with_head = corpus_stats(c, body_only=False)
    assert with_head["fake"].total_words == 7
    assert with_head["fake"].total_sentences == 3


def test_stats_rounding_and_missing_label():
    c = Corpus("c", [doc(body="a b."), doc(id="d2", body="a b c d."), doc(id="d3", body="a b c d.")])
    s = corpus_stats(c)
    assert s["fake"].mean_words == 3.3
    assert "legitimate" not in s
    with pytest.raises(CorpusError):
        corpus_stats(Corpus("empty", []))


def test_require_both_labels():
    with pytest.raises(CorpusError, match="no legitimate"):
        Corpus("c", [doc()]).require_both_labels()
