"""Water-filling: rank triples by how many decoding pathways produced them."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .core import Triple, triple_key
from .errors import MixedSentenceError
from .pathway import PATHWAYS, Pathway


@dataclass(frozen=True)
class VotedTriple:
    triple: Triple
    pathways: frozenset

    @property
    def votes(self) -> int:
        return len(self.pathways)


def _key(t: Triple) -> tuple:
    return triple_key(t, t.sentence_id)


def vote(results: Mapping[Pathway, list]) -> list[VotedTriple]:
    """Group by identity key and count distinct producing pathways.

    The triple kept for a key is the first one met in fixed pathway order, so
    the outcome does not depend on the mapping's iteration order.
    """
    first: dict[tuple, Triple] = {}
    voters: dict[tuple, set] = {}
    sentence_ids = set()
    for pathway in sorted(results, key=PATHWAYS.index):
        for t in results[pathway]:
            k = _key(t)
            sentence_ids.add(t.sentence_id)
            first.setdefault(k, t)
            voters.setdefault(k, set()).add(pathway)
    if len(sentence_ids) > 1:
        raise MixedSentenceError(f"triples from {len(sentence_ids)} sentences: {sorted(sentence_ids)}")
    voted = [VotedTriple(first[k], frozenset(voters[k])) for k in first]
    voted.sort(key=lambda v: (-v.votes, v.triple.subject.start, v.triple.predicate.start,
                              v.triple.object.start, _key(v.triple)))
    return voted


def water_fill(results: Mapping[Pathway, list], min_votes: int = 1, n_pathways: int = len(PATHWAYS)) -> list[Triple]:
    """Fill the output from the most-voted triples down; confidence is votes / 6."""
    return [replace(v.triple, confidence=v.votes / n_pathways)
            for v in vote(results) if v.votes >= min_votes]
