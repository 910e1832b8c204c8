"""Per-pathway versus water-filled scores on a gold corpus."""
from __future__ import annotations

from typing import Sequence

from ..aggregate import water_fill
from ..core import Counters
from ..formats import GoldRecord, synsets_from_gold
from ..pathway import PATHWAYS, DecodeLimits, extract_all
from ..postprocess import binarize
from .scorers import score_benchie, score_carb, score_lexical

METRICS = ("benchie", "carb", "lexical")


def score(metric: str, preds, records: Sequence[GoldRecord], synsets=None):
    sentences = {r.id: r.sentence for r in records}
    if metric == "benchie":
        if synsets is None:
            synsets = [fs for r in records for fs in synsets_from_gold(r)]
        return score_benchie(preds, synsets, sentences)
    gold = [t for r in records for t in r.triples]
    if metric == "carb":
        return score_carb(preds, gold)
    if metric == "lexical":
        return score_lexical(preds, gold, sentences)
    raise ValueError(f"unknown metric {metric!r}")


def run_pipeline(records: Sequence[GoldRecord], model, limits: DecodeLimits = DecodeLimits(),
                 do_binarize: bool = False, min_votes: int = 1, jobs: int = 1,
                 diagnostics: Counters = None):
    """``{pathway name: triples}`` for each single pathway plus ``"WF"`` for the aggregate."""
    out = {p.name: [] for p in PATHWAYS}
    out["WF"] = []
    for rec in records:
        results = extract_all(rec.sentence, model, limits, jobs=jobs, diagnostics=diagnostics)
        for p, triples in results.items():
            out[p.name].extend(triples)
        out["WF"].extend(water_fill(results, min_votes=min_votes))
    if do_binarize:
        by_id = {r.id: r.sentence for r in records}
        for name, triples in out.items():
            out[name] = [b for t in triples for b in binarize(t, by_id[t.sentence_id], model, limits, diagnostics)]
    return out


def compare_pathways(records: Sequence[GoldRecord], model, metric: str = "benchie",
                     limits: DecodeLimits = DecodeLimits(), do_binarize: bool = False, synsets=None,
                     jobs: int = 1) -> list:
    """``[(label, ScoreReport)]`` for SPOA ... OPSA then WF."""
    outputs = run_pipeline(records, model, limits, do_binarize, jobs=jobs)
    return [(name, score(metric, preds, records, synsets)) for name, preds in outputs.items()]
