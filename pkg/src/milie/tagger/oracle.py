from __future__ import annotations

from typing import Iterable, Mapping

from ..core import A, ElementKind, MarkedSentence, Sentence, Triple, consistent, disjoint_spans, encode_bio_marked
from ..formats import GoldRecord, gold_from_json, gold_to_json
from .base import TaggerModel


class OracleTagger(TaggerModel):
    """Answers every query from gold triples.

    For a marked sentence and a kind, it labels exactly the spans of that kind
    belonging to gold triples consistent with every marker present; with no
    consistent triple the output is all ``O``. Overlapping candidate spans are
    thinned left to right since one BIO sequence cannot hold both.
    """

    model_type = "oracle"

    def __init__(self, records: Iterable[GoldRecord]):
        self.records = {r.id: r for r in records}

    def _predict(self, marked: MarkedSentence, kind: ElementKind):
        record = self.records.get(marked.base.id)
        if record is None or record.sentence.words != marked.base.words:
            return ("O",) * len(marked.rendered)
        spans = []
        for t in record.triples:
            if consistent(t, marked.markers):
                spans.extend(t.args if kind is A else [t.get(kind)])
        spans = [s for s in spans if not any(s.overlaps(m) for m in marked.markers.values())]
        kept, _ = disjoint_spans(spans)
        return encode_bio_marked(kept, marked)

    def state(self):
        records = [gold_to_json(self.records[k]) for k in sorted(self.records)]
        return {"records": records}, {}

    @classmethod
    def from_state(cls, meta, arrays):
        return cls(gold_from_json(r) for r in meta["records"])


def oracle_from_gold(gold) -> OracleTagger:
    """Build an oracle from gold records or from a ``{Sentence: [Triple]}`` mapping."""
    if isinstance(gold, Mapping):
        records = []
        for sentence, triples in gold.items():
            if not isinstance(sentence, Sentence):
                raise TypeError("gold mapping keys must be Sentence objects")
            triples = [Triple(t.subject, t.predicate, t.object, t.args, 1.0, sentence.id) for t in triples]
            records.append(GoldRecord(sentence, tuple(triples)))
        return OracleTagger(records)
    return OracleTagger(gold)
