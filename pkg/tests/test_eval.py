import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from milie import synth
from milie.core import Span, Triple
from milie.errors import MissingTagError
from milie.evaluation.scorers import assign
from milie.evaluation import (ScoreReport, compare_pathways, entropy, entropy_profile, f1_score,
                              format_entropy_table, format_entropy_tsv, format_table, format_tsv, head_token,
                              pair_similarity, run_pipeline, score_benchie, score_carb, score_lexical)
from milie.formats import GoldRecord
from milie.tagger import oracle_from_gold

import scorer_cases as sc


def _prf(rep):
    return rep.precision, rep.recall, rep.f1


def test_benchie_fixture():
    assert _prf(score_benchie(sc.PREDS, sc.SYNSETS, sc.SENTENCES)) == pytest.approx(sc.EXPECTED["benchie"], abs=1e-9)
    got = score_benchie(sc.PREDS, sc.SYNSETS_WITH_VARIANT, sc.SENTENCES)
    assert _prf(got) == pytest.approx(sc.EXPECTED["benchie_variant"], abs=1e-9)


def test_carb_fixture():
    rep = score_carb(sc.PREDS, sc.GOLD_TRIPLES)
    assert _prf(rep) == pytest.approx(sc.EXPECTED["carb"], abs=1e-9)
    assert rep.matched_predictions == 2 and rep.total_facts == 3


def test_lexical_fixture():
    rep = score_lexical(sc.PREDS, sc.GOLD_TRIPLES, sc.SENTENCES)
    assert _prf(rep) == pytest.approx(sc.EXPECTED["lexical"], abs=1e-9)
    assert rep.metric == "lexical (head-containment)"


def test_pair_similarity_hand_values():
    prec, rec = pair_similarity(sc.PREDS[0], sc.GOLD_TRIPLES[0])
    assert (prec, rec) == pytest.approx((1.0, 5 / 6))


def test_head_token():
    assert head_token(Span(2, 4), sc.S1) == 3
    assert head_token(Span(0, 3), sc.S2) == 2
    no_heads = sc.S1.__class__.from_words("x", ["a", "b"])
    assert head_token(Span(0, 2), no_heads) == 0


def test_perfect_and_disjoint():
    gold = sc.GOLD_TRIPLES
    perfect = [t.binary() if t.sentence_id != "s1" else t for t in gold]
    assert _prf(score_benchie(perfect, sc.SYNSETS, sc.SENTENCES)) == (1.0, 1.0, 1.0)
    assert _prf(score_carb(gold, gold)) == (1.0, 1.0, 1.0)
    assert _prf(score_lexical(gold, gold, sc.SENTENCES)) == (1.0, 1.0, 1.0)
    # predictions placed only on tokens no gold element uses
    wrong = [Triple(Span(0, 1), Span(1, 2), Span(2, 3), (), 1.0, "nowhere")]
    sentences = dict(sc.SENTENCES, nowhere=sc.S3)
    assert _prf(score_benchie(wrong, sc.SYNSETS, sentences)) == (0.0, 0.0, 0.0)
    assert _prf(score_carb(wrong, gold)) == (0.0, 0.0, 0.0)
    assert _prf(score_lexical(wrong, gold, sentences)) == (0.0, 0.0, 0.0)


def test_empty_inputs():
    assert _prf(score_benchie([], sc.SYNSETS, sc.SENTENCES)) == (0.0, 0.0, 0.0)
    assert _prf(score_carb([], [])) == (0.0, 0.0, 0.0)


def _random_preds(rng, n):
    out = []
    for _ in range(n):
        sid = rng.choice(["s1", "s2", "s3"])
        length = len(sc.SENTENCES[sid])
        cuts = sorted(rng.sample(range(length + 1), 4)) if length >= 3 else [0, 1, 2, 3]
        a, b, c, d = cuts
        if b > a and c > b and d > c:
            out.append(Triple(Span(a, b), Span(b, c), Span(c, d), (), 1.0, sid))
    out += [t.binary() for t in sc.GOLD_TRIPLES if rng.random() < 0.5]
    return out


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_scorer_invariants(seed):
    rng = random.Random(seed)
    preds = _random_preds(rng, rng.randint(0, 6))
    reps = [score_benchie(preds, sc.SYNSETS, sc.SENTENCES), score_carb(preds, sc.GOLD_TRIPLES),
            score_lexical(preds, sc.GOLD_TRIPLES, sc.SENTENCES)]
    for r in reps:
        assert 0 <= r.precision <= 1 and 0 <= r.recall <= 1 and 0 <= r.f1 <= 1
        assert r.f1 <= 2 * min(r.precision, r.recall) + 1e-12
    base = reps[0]
    shuffled = score_benchie(rng.sample(preds, len(preds)), sc.SYNSETS, sc.SENTENCES)
    assert _prf(shuffled) == _prf(base)
    doubled = score_benchie(preds + preds, sc.SYNSETS, sc.SENTENCES)
    assert doubled.recall == base.recall
    extra = _random_preds(rng, 1)[:1]
    if extra:
        grown = score_benchie(preds + extra, sc.SYNSETS, sc.SENTENCES)
        assert grown.recall >= base.recall
    miss = Triple(Span(0, 1), Span(1, 2), Span(2, 3), (), 1.0, "s1")  # (Anna; built; the): never gold
    worse = score_benchie(preds + [miss], sc.SYNSETS, sc.SENTENCES)
    assert worse.precision < base.precision or base.precision == 0


def test_report_formats():
    rows = [("PSOA", ScoreReport.from_counts("benchie", 1, 2, 1, 4)), ("WF", ScoreReport.from_counts("benchie", 0, 0, 0, 4))]
    table = format_table(rows, "benchie")
    assert table.splitlines() == [
        "benchie       F1    Prec.     Rec.",
        "PSOA       33.33    50.00    25.00",
        "WF          0.00     0.00     0.00",
    ]
    tsv = format_tsv(rows).splitlines()
    assert tsv[0].split("\t")[:4] == ["name", "f1", "precision", "recall"]
    assert tsv[1].split("\t")[2] == "0.5"
    assert f1_score(0, 0) == 0.0


# -- entropy ---------------------------------------------------------------

def test_entropy_closed_forms():
    assert entropy([5]) == 0.0
    assert entropy([3, 3, 3, 3]) == 2.0
    assert entropy([2, 1, 1]) == 1.5
    assert entropy([]) == 0.0
    assert entropy([0, 4]) == 0.0


def _brute(records, family, kind_attr):
    hist = Counter()
    for r in records:
        for t in r.triples:
            for i in getattr(t, kind_attr):
                tok = r.sentence.tokens[i]
                hist[tok.dep if family == "dep" else tok.pos] += 1
    n = sum(hist.values())
    return -sum(c / n * math.log2(c / n) for c in hist.values())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 40))
def test_entropy_profile_matches_brute_force(seed, n):
    records = synth.corpus(n, seed=seed)
    profile = entropy_profile(records)
    for (kind, fam), h in profile.items():
        attr = {"S": "subject", "P": "predicate", "O": "object"}[kind.value]
        assert h == pytest.approx(_brute(records, fam, attr), abs=1e-9)
        distinct = len({tok for r in records for t in r.triples for tok in
                        ((r.sentence.tokens[i].dep if fam == "dep" else r.sentence.tokens[i].pos)
                         for i in getattr(t, attr))})
        assert 0.0 <= h <= math.log2(distinct) + 1e-12


def test_entropy_single_tag_corpus():
    s = synth.taj_mahal().sentence.__class__.from_words("x", ["a", "b", "c"], ["x", "x", "x"], ["N", "N", "N"])
    rec = GoldRecord(s, (Triple(Span(0, 1), Span(1, 2), Span(2, 3), (), 1.0, "x"),))
    profile = entropy_profile([rec])
    assert set(profile.values()) == {0.0}
    assert "0.000" in format_entropy_table(profile)
    assert format_entropy_tsv(profile).splitlines()[1] == "subject\tdep\t0.0"


def test_entropy_missing_tag():
    s = synth.taj_mahal().sentence.__class__.from_words("x", ["a", "b", "c"], ["x", "x", "x"])
    rec = GoldRecord(s, (Triple(Span(0, 1), Span(1, 2), Span(2, 3), (), 1.0, "x"),))
    with pytest.raises(MissingTagError):
        entropy_profile([rec], ("pos",))
    assert entropy_profile([rec], ("dep",))


# -- pipeline comparison ---------------------------------------------------

def test_compare_with_oracle(small_corpus, small_oracle):
    rows = compare_pathways(small_corpus, small_oracle)
    assert [label for label, _ in rows] == ["SPOA", "SOPA", "PSOA", "POSA", "OSPA", "OPSA", "WF"]
    assert all(r.f1 == 1.0 for _, r in rows)
    for metric in ("carb", "lexical"):
        assert all(r.f1 == 1.0 for _, r in compare_pathways(small_corpus[:10], small_oracle, metric))


def test_run_pipeline_binarize(taj):
    oracle = oracle_from_gold([taj])
    out = run_pipeline([taj], oracle, do_binarize=True)
    assert out["WF"] == [taj.triples[0].binary()]


def test_assignment_ties_prefer_first_indices():
    rows, cols = assign(np.ones((2, 2)))
    assert list(zip(rows, cols)) == [(0, 0), (1, 1)]
    rows, cols = assign(np.ones((3, 1)))
    assert list(zip(rows, cols)) == [(0, 0)]
    rows, cols = assign(np.array([[0.5, 1.0], [1.0, 0.5]]))
    assert list(zip(rows, cols)) == [(0, 1), (1, 0)]  # a strict optimum wins over index order


def test_carb_duplicate_predictions_match_once():
    g = sc.GOLD_TRIPLES[2]
    rep = score_carb([g, g], [g])
    assert (rep.matched_predictions, rep.precision, rep.recall) == (1, 0.5, 1.0)
