"""Fact-based (BenchIE-style), tuple-overlap (CaRB-style) and lexical-match scorers."""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..core import Sentence, Span, Triple
from ..formats import FactSynset
from .report import ScoreReport

LEXICAL_LABEL = "lexical (head-containment)"


def _by_sentence(triples: Iterable[Triple]) -> dict[str, list[Triple]]:
    out = defaultdict(list)
    for t in triples:
        out[t.sentence_id].append(t)
    return out


def _surface(triple: Triple, sentence: Sentence) -> tuple[str, str, str]:
    s, p, o, _ = triple.surface(sentence)
    return s, p, o


def score_benchie(preds: Sequence[Triple], gold: Sequence[FactSynset], sentences: Mapping[str, Sentence]) -> ScoreReport:
    """Exact binary surface match against fact synsets; arguments are ignored.

    Precision counts predictions equal to some variant of some synset of their
    sentence; recall counts synsets hit by at least one prediction.
    """
    synsets = defaultdict(list)
    for fs in gold:
        synsets[fs.sentence_id].append(fs)
    correct = 0
    hit = set()
    for t in preds:
        surface = _surface(t, sentences[t.sentence_id])
        matched = False
        for j, fs in enumerate(synsets.get(t.sentence_id, ())):
            if surface in fs.variants:
                matched = True
                hit.add((t.sentence_id, j))
        correct += matched
    return ScoreReport.from_counts("benchie", correct, len(preds), len(hit), len(gold))


def _elements(t: Triple) -> tuple[frozenset, frozenset, frozenset]:
    tail = set(t.object)
    for a in t.args:
        tail.update(a)
    return frozenset(t.subject), frozenset(t.predicate), frozenset(tail)


def pair_similarity(pred: Triple, gold: Triple) -> tuple[float, float]:
    """``(precision-side, recall-side)`` token overlap, averaged over S, P and O+args."""
    prec, rec = 0.0, 0.0
    for pe, ge in zip(_elements(pred), _elements(gold)):
        inter = len(pe & ge)
        prec += inter / len(pe)
        rec += inter / len(ge)
    return prec / 3, rec / 3


def assign(sim: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Maximum-similarity assignment; exact ties go to lower (row, column) indices.

    The bonus added per cell is far below the smallest gap between distinct
    similarity totals, so it only chooses among equally good assignments.
    """
    n, m = sim.shape
    order = np.arange(n * m, dtype=float).reshape(n, m)
    bonus = (n * m - order) * (1e-12 / max(n * m, 1))
    return linear_sum_assignment(sim + bonus, maximize=True)


def score_carb(preds: Sequence[Triple], gold: Sequence[Triple]) -> ScoreReport:
    """Token-overlap tuple matching with a one-to-one assignment per sentence.

    The assignment maximizes the summed precision- and recall-side
    similarity. Precision is the matched precision-side mass over all
    predictions, recall the matched recall-side mass over all gold tuples.
    """
    pred_by, gold_by = _by_sentence(preds), _by_sentence(gold)
    p_mass = r_mass = 0.0
    matched = 0
    for sid in sorted(set(pred_by) & set(gold_by)):
        ps, gs = pred_by[sid], gold_by[sid]
        prec = np.zeros((len(ps), len(gs)))
        rec = np.zeros_like(prec)
        for i, p in enumerate(ps):
            for j, g in enumerate(gs):
                prec[i, j], rec[i, j] = pair_similarity(p, g)
        rows, cols = assign(prec + rec)
        for i, j in zip(rows, cols):
            if prec[i, j] + rec[i, j] > 0:
                p_mass += prec[i, j]
                r_mass += rec[i, j]
                matched += 1
    return ScoreReport.from_counts("carb", matched, len(preds), matched, len(gold),
                                   precision_mass=p_mass, recall_mass=r_mass)


def head_token(span: Span, sentence: Sentence) -> int:
    """The first token of ``span`` whose governor lies outside it; first token without head info."""
    heads = [sentence.tokens[i].head for i in span]
    if any(h is None for h in heads):
        return span.start
    for i, h in zip(span, heads):
        if not span.contains(h):
            return i
    return span.start


def score_lexical(preds: Sequence[Triple], gold: Sequence[Triple], sentences: Mapping[str, Sentence]) -> ScoreReport:
    """A prediction matches a gold tuple when each of its S, P, O contains the gold element's head.

    Predictions are taken in order and each claims the first unmatched gold tuple it fits.
    """
    pred_by, gold_by = _by_sentence(preds), _by_sentence(gold)
    matched = 0
    for sid, ps in pred_by.items():
        gs = gold_by.get(sid, [])
        if not gs:
            continue
        sentence = sentences[sid]
        heads = [(head_token(g.subject, sentence), head_token(g.predicate, sentence), head_token(g.object, sentence))
                 for g in gs]
        used = [False] * len(gs)
        for p in ps:
            for j, (hs, hp, ho) in enumerate(heads):
                if not used[j] and p.subject.contains(hs) and p.predicate.contains(hp) and p.object.contains(ho):
                    used[j] = True
                    matched += 1
                    break
    return ScoreReport.from_counts(LEXICAL_LABEL, matched, len(preds), matched, len(gold))
