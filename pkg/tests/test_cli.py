import json
import subprocess
import sys

import pytest

from stylometer import cli
from stylometer.corpus import write_jsonl

from conftest import make_toy_corpus


@pytest.fixture
def corpus_file(tmp_path):
    p = tmp_path / "toy.jsonl"
    write_jsonl(make_toy_corpus(n_per_class=10, domains=("politics", "sports")), p)
    return str(p)


def run(*argv):
    return cli.main([str(a) for a in argv])


def schema_lines(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    return lines[0], json.loads(lines[1].split(": ", 1)[1])


def test_stats(corpus_file, tmp_path, capsys):
    out = tmp_path / "o"
    assert run("stats", "--corpus", corpus_file, "--out", out) == 0
    doc = json.loads((out / "stats.json").read_text())
    assert list(doc)[0] == "schema"
    assert doc["run_config"]["body_only"] is True
    assert doc["labels"]["fake"]["documents"] == 10
    assert "legitimate: 10 docs" in capsys.readouterr().out


def test_featurize(corpus_file, tmp_path):
    out = tmp_path / "o"
    assert run("featurize", "--corpus", corpus_file, "--features", "readability,punctuation", "--out", out) == 0
    space = json.loads((out / "feature_space.json").read_text())
    assert space["schema"] == "stylometer.feature-space/1"
    assert len(space["columns"]) == 37
    lines = (out / "features.txt").read_text().splitlines()
    assert lines[0] == "# schema: stylometer.feature-matrix/1"
    assert lines[1].split()[:3] == ["#", "provenance:", space["id"]]
    assert lines[2] == "dims 20 37"


def test_cv_outputs_and_replay(corpus_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("cv", "--corpus", corpus_file, "--features", "readability", "--features", "ngrams",
               "--k", 4, "--seed", 7, "--out", a) == 0
    header, cfg = schema_lines(a / "cv_table.csv")
    assert header == "# schema: stylometer.cv/1"
    assert cfg["seed"] == 7 and cfg["features"] == ["readability", "ngrams"]
    report = json.loads((a / "cv_report.json").read_text())
    assert [r["feature_set"] for r in report["results"]] == ["readability", "ngrams"]
    assert report["results"][0]["average"]["accuracy"] >= 0.9

    assert run("cv", "--config", a / "cv_report.json", "--out", b) == 0
    for name in ("cv_table.csv", "cv_report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_flags_override(corpus_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("cv", "--corpus", corpus_file, "--features", "punctuation", "--k", 3, "--out", a) == 0
    assert run("cv", "--config", a / "cv_report.json", "--seed", 5, "--out", b) == 0
    _, cfg = schema_lines(b / "cv_table.csv")
    assert (cfg["seed"], cfg["k"]) == (5, 3)


def test_config_from_other_command_rejected(corpus_file, tmp_path, capsys):
    a = tmp_path / "a"
    assert run("stats", "--corpus", corpus_file, "--out", a) == 0
    assert run("cv", "--config", a / "stats.json", "--out", a) == 1
    assert "written by 'stats'" in capsys.readouterr().err


def test_curve_writes_csv_and_figure(corpus_file, tmp_path):
    out = tmp_path / "o"
    assert run("curve", "--corpus", corpus_file, "--features", "readability",
               "--fractions", "0.5,1.0", "--k", 5, "--out", out) == 0
    header, _ = schema_lines(out / "curve.csv")
    assert header == "# schema: stylometer.curve/1"
    rows = (out / "curve.csv").read_text().splitlines()[2:]
    assert rows[0] == "feature_set,fraction,accuracy"
    assert len(rows) == 3
    assert (out / "curve.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    plain = tmp_path / "p"
    assert run("curve", "--corpus", corpus_file, "--features", "readability",
               "--fractions", "1.0", "--no-figures", "--out", plain) == 0
    assert not (plain / "curve.png").exists()


def test_transfer_and_lodo(corpus_file, tmp_path):
    other = tmp_path / "other.jsonl"
    write_jsonl(make_toy_corpus(n_per_class=5, seed=3, domains=("celebrity",), name="other"), other)
    out = tmp_path / "o"
    assert run("transfer", "--train", corpus_file, "--test", other, "--features", "readability",
               "--out", out) == 0
    rows = (out / "transfer.csv").read_text().splitlines()
    assert rows[2] == "train,test,feature_set,accuracy,f1_legitimate,f1_fake"
    assert rows[3].startswith("toy,other,readability,")

    assert run("lodo", "--corpus", corpus_file, "--features", "readability", "--out", out) == 0
    rows = (out / "lodo.csv").read_text().splitlines()[3:]
    assert [r.split(",")[0] for r in rows] == ["politics", "sports"]


def test_kappa_ten_items(tmp_path, capsys):
    a = ["fake"] * 4 + ["legitimate"] * 4 + ["fake", "legitimate"]
    b = ["fake"] * 4 + ["legitimate"] * 4 + ["legitimate", "fake"]
    (tmp_path / "ann1.csv").write_text("".join(f"d{i},{lab}\n" for i, lab in enumerate(a)))
    (tmp_path / "ann2.csv").write_text("".join(f"d{i},{lab}\n" for i, lab in enumerate(b)))
    assert run("kappa", "--a", tmp_path / "ann1.csv", "--b", tmp_path / "ann2.csv",
               "--gold", tmp_path / "ann1.csv", "--out", tmp_path) == 0
    doc = json.loads((tmp_path / "agreement.json").read_text())
    assert doc["kappa"] == 0.6
    assert doc["observed_agreement"] == 0.8
    assert doc["annotator_accuracy"] == {"a": 1.0, "b": 0.8}
    assert "kappa 0.6000" in capsys.readouterr().out


def test_diff_with_builtin_lexicon(corpus_file, tmp_path):
    out = tmp_path / "o"
    assert run("diff", "--corpus", corpus_file, "--lexicon", "builtin", "--out", out) == 0
    lines = (out / "diff.csv").read_text().splitlines()
    assert lines[0] == "# schema: stylometer.diff/1"
    assert lines[2] == "category,mean_legit,mean_fake,diff,t,p,significant"
    cats = {r.split(",")[0]: r.split(",") for r in lines[3:]}
    assert float(cats["shehe"][3]) > 0  # "he"/"she" appear only in legitimate toy text
    assert (out / "diff.png").exists()


def test_lexicon_env_fallback(corpus_file, tmp_path, monkeypatch):
    monkeypatch.setenv("STYLOMETER_LEXICON", "builtin")
    out = tmp_path / "o"
    assert run("cv", "--corpus", corpus_file, "--features", "liwc-summary", "--k", 2, "--out", out) == 0
    _, cfg = schema_lines(out / "cv_table.csv")
    assert cfg["lexicon"] == "builtin"


@pytest.mark.parametrize(
    "argv,msg",
    [
        (["cv", "--features", "readability"], "--corpus"),
        (["cv", "--corpus", "{corpus}"], "--features"),
        (["cv", "--corpus", "{corpus}", "--features", "bogus"], "unknown feature set 'bogus'"),
        (["cv", "--corpus", "{corpus}", "--features", "readability", "--bogus"], "unrecognized arguments"),
        (["cv", "--corpus", "{corpus}", "--features", "readability", "--format", "xml"], "invalid choice"),
        (["cv", "--corpus", "/no/such/file.jsonl", "--features", "readability"], "does not exist"),
        (["cv", "--corpus", "{corpus}", "--features", "liwc-psych"], "needs --lexicon"),
        (["transfer", "--train", "{corpus}", "--features", "readability"], "--test"),
        (["kappa", "--a", "x.csv"], "--b"),
        ([], "choose a subcommand"),
    ],
)
def test_validation_errors_exit_1(argv, msg, corpus_file, tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("STYLOMETER_LEXICON", raising=False)
    argv = [a.replace("{corpus}", corpus_file) for a in argv]
    if argv:
        argv += ["--out", str(tmp_path)]
    assert cli.main(argv) == 1
    err = capsys.readouterr().err
    assert msg in err
    assert len(err.strip().splitlines()) == 1


def test_runtime_failure_exit_2(corpus_file, tmp_path, monkeypatch, capsys):
    def boom(*a, **k):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(cli, "cross_validate", boom)
    assert run("cv", "--corpus", corpus_file, "--features", "readability", "--out", tmp_path) == 2
    assert "disk on fire" in capsys.readouterr().err


def test_module_entry_point(corpus_file, tmp_path):
    res = subprocess.run([sys.executable, "-m", "stylometer", "stats", "--corpus", corpus_file,
                          "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    res = subprocess.run([sys.executable, "-m", "stylometer", "cv"], capture_output=True, text=True)
    assert res.returncode == 1
