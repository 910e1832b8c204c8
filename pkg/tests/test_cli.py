import json

import pytest

from milie import synth
from milie.cli import main
from milie.formats import dumps, gold_to_json, sentence_to_json, triple_from_json, triple_to_json
from milie.pathway import Pathway, extract
from milie.tagger import oracle_from_gold


def run(*argv):
    return main([str(a) for a in argv])


def lines(path):
    return [json.loads(x) for x in path.read_text().splitlines()]


@pytest.fixture()
def corpus_files(tmp_path):
    records = synth.corpus(25, seed=3)
    gold = tmp_path / "gold.jsonl"
    gold.write_text("".join(dumps(gold_to_json(r)) + "\n" for r in records))
    sents = tmp_path / "sents.jsonl"
    sents.write_text("".join(dumps(sentence_to_json(r.sentence)) + "\n" for r in records))
    model = tmp_path / "oracle.bin"
    assert run("oracle", gold, "-o", model) == 0
    return records, gold, sents, model


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "model-format 1" in out and "gold-record 1" in out


def test_extract_oracle_wf_gives_gold(corpus_files, tmp_path):
    records, gold, sents, model = corpus_files
    out = tmp_path / "wf.jsonl"
    assert run("extract", sents, "--model", model, "-o", out) == 0
    got = [triple_from_json(o) for o in lines(out)]
    assert all(t.confidence == 1.0 for t in got)
    expected = [t for r in records for t in r.triples]
    key = lambda t: (t.sentence_id, t.subject, t.predicate, t.object, t.args)
    assert sorted(map(key, got)) == sorted(map(key, expected))


def test_extract_accepts_gold_records_and_jobs_keep_order(corpus_files, tmp_path):
    _, gold, sents, model = corpus_files
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run("extract", sents, "--model", model, "-o", a) == 0
    assert run("extract", gold, "--model", model, "--jobs", 4, "-o", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_single_pathway_plumbing(corpus_files, tmp_path):
    records, _, sents, model = corpus_files
    out = tmp_path / "ospa.jsonl"
    assert run("extract", sents, "--model", model, "--pathways", "OSPA", "--aggregate", "none", "-o", out) == 0
    oracle = oracle_from_gold(records)
    expected = [triple_to_json(t) for r in records for t in extract(r.sentence, Pathway.OSPA, oracle)]
    assert lines(out) == expected


def test_binarize_flag(corpus_files, tmp_path):
    _, _, sents, model = corpus_files
    out = tmp_path / "bin.jsonl"
    assert run("extract", sents, "--model", model, "--binarize", "-o", out) == 0
    assert all(o["args"] == [] for o in lines(out))


def test_min_votes(corpus_files, tmp_path):
    _, _, sents, model = corpus_files
    out = tmp_path / "mv.jsonl"
    assert run("extract", sents, "--model", model, "--pathways", "PSOA,OSPA", "--min-votes", 3, "-o", out) == 0
    assert out.read_text() == ""


def test_complete(taj, tmp_path):
    sents = tmp_path / "s.jsonl"
    sents.write_text(dumps(sentence_to_json(taj.sentence)) + "\n")
    gold = tmp_path / "g.jsonl"
    gold.write_text(dumps(gold_to_json(taj)) + "\n")
    model = tmp_path / "m.bin"
    assert run("oracle", gold, "-o", model) == 0
    priors = tmp_path / "p.jsonl"
    priors.write_text('{"sentence_id": "taj", "object": "Shah Jahan"}\n{"sentence_id": "taj", "object": "Akbar"}\n')
    out = tmp_path / "out.jsonl"
    assert run("complete", sents, priors, "--model", model, "-o", out) == 0
    assert lines(out) == [triple_to_json(taj.triples[0])]
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert run("complete", sents, empty, "--model", model, "-o", out) == 0
    assert out.read_text() == ""


def test_score_formats_and_figure(corpus_files, tmp_path):
    _, gold, sents, model = corpus_files
    preds = tmp_path / "p.jsonl"
    run("extract", sents, "--model", model, "-o", preds)
    rep = tmp_path / "r.json"
    for metric in ("benchie", "carb", "lexical"):
        assert run("score", preds, gold, "--metric", metric, "-o", rep) == 0
        got = json.loads(rep.read_text())
        assert (got["precision"], got["recall"], got["f1"]) == (1.0, 1.0, 1.0)
    assert run("score", preds, gold, "--format", "text", "--figure", tmp_path / "f.png", "-o", rep) == 0
    assert rep.read_text().splitlines()[0].split()[-3:] == ["F1", "Prec.", "Rec."]
    assert (tmp_path / "f.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_score_against_synsets(taj, tmp_path):
    sents = tmp_path / "s.jsonl"
    sents.write_text(dumps(sentence_to_json(taj.sentence)) + "\n")
    syn = tmp_path / "syn.jsonl"
    syn.write_text(json.dumps({"sentence_id": "taj", "facts": [[{"s": "The Taj Mahal", "p": "was built by",
                                                                   "o": "Shah Jahan"}]]}) + "\n")
    preds = tmp_path / "p.jsonl"
    preds.write_text('{"sentence_id": "taj", "subject": [0, 3], "predicate": [3, 6], "object": [6, 8]}\n')
    rep = tmp_path / "r.json"
    assert run("score", preds, syn, "--sentences", sents, "-o", rep) == 0
    assert json.loads(rep.read_text())["f1"] == 1.0
    # without sentences the surface forms cannot be built
    assert run("score", preds, syn, "-o", rep) == 2


def test_entropy_and_compare(corpus_files, tmp_path):
    _, gold, _, model = corpus_files
    out = tmp_path / "e.json"
    assert run("entropy", gold, "--format", "json", "--figure", tmp_path / "e.svg", "-o", out) == 0
    assert set(json.loads(out.read_text())) == {f"{k}/{f}" for k in ("subject", "predicate", "object") for f in ("dep", "pos")}
    cmp = tmp_path / "c.tsv"
    assert run("compare", gold, "--model", model, "--format", "tsv", "--figure", tmp_path / "c.pdf", "-o", cmp) == 0
    assert [r.split("\t")[0] for r in cmp.read_text().splitlines()[1:]] == \
        ["SPOA", "SOPA", "PSOA", "POSA", "OSPA", "OPSA", "WF"]


def test_traindata_train_extract_score_chain(corpus_files, tmp_path):
    _, gold, sents, _ = corpus_files
    inst, model, preds, rep = (tmp_path / n for n in ("i.jsonl", "m.bin", "p.jsonl", "r.json"))
    assert run("traindata", gold, "--seed", 7, "-o", inst) == 0
    assert run("train", inst, "--epochs", 2, "-o", model) == 0
    assert run("extract", sents, "--model", model, "-o", preds) == 0
    assert run("score", preds, gold, "-o", rep) == 0
    assert 0.0 <= json.loads(rep.read_text())["f1"] <= 1.0


def test_negative_fraction_zero(corpus_files, tmp_path):
    _, gold, _, _ = corpus_files
    out = tmp_path / "i.jsonl"
    assert run("traindata", gold, "--negative-fraction", 0, "-o", out) == 0
    assert not any(o["negative"] for o in lines(out))


def test_exit_codes(corpus_files, tmp_path, capsys):
    _, gold, sents, model = corpus_files
    bad = tmp_path / "bad.jsonl"
    bad.write_text(gold.read_text().splitlines()[0] + "\n{not json\n")
    out = tmp_path / "o.jsonl"
    assert run("traindata", bad, "-o", out) == 2
    assert "line 2" in capsys.readouterr().err
    assert not out.exists()  # nothing half-written
    junk = tmp_path / "junk.bin"
    junk.write_bytes(b"garbage")
    assert run("extract", sents, "--model", junk, "-o", out) == 3
    assert run("extract", sents, "--model", tmp_path / "missing.bin", "-o", out) == 3
    assert run("extract", sents, "--model", model, "--pathways", "XYZ", "-o", out) == 2
    assert run("extract", tmp_path / "missing.jsonl", "--model", model, "-o", out) == 2
    assert run("extract", sents, "--model", model, "--max-branch", 0, "-o", out) == 2


def test_config_file(corpus_files, tmp_path):
    _, gold, _, _ = corpus_files
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# sampler\nseed = 7\nnegative-fraction = 0\n")
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run("--config", cfg, "traindata", gold, "-o", a) == 0
    assert not any(o["negative"] for o in lines(a))
    assert run("--config", cfg, "traindata", gold, "--negative-fraction", 1, "-o", b) == 0
    assert any(o["negative"] for o in lines(b))
    cfg.write_text("unknown_key = 1\n")
    assert run("--config", cfg, "traindata", gold, "-o", a) == 2
    cfg.write_text("seed = seven\n")
    assert run("--config", cfg, "traindata", gold, "-o", a) == 2


def test_synth_command(tmp_path):
    out = tmp_path / "g.jsonl"
    assert run("synth", 7, "--seed", 2, "--templates", "active", "passive", "-o", out) == 0
    assert len(lines(out)) == 7
