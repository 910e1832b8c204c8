"""Iterative decoding along one of the six S/P/O extraction orders."""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .core import A, MAX_LEN, O, P, S, Counters, PartialTriple, Sentence, Triple, decode_bio, mark, normalize
from .errors import ConfigError, LengthError, OverlapError
from .tagger import predict


class Pathway(enum.Enum):
    SPOA = (S, P, O)
    SOPA = (S, O, P)
    PSOA = (P, S, O)
    POSA = (P, O, S)
    OSPA = (O, S, P)
    OPSA = (O, P, S)

    @property
    def order(self):
        return self.value

    @classmethod
    def parse(cls, name: str) -> "Pathway":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown pathway {name!r}; expected one of {', '.join(p.name for p in cls)}") from None

    def __repr__(self):
        return f"Pathway.{self.name}"


PATHWAYS = tuple(Pathway)


@dataclass(frozen=True)
class DecodeLimits:
    max_branch: int = 8
    max_triples: int = 64
    max_len: int = MAX_LEN

    def __post_init__(self):
        if self.max_branch < 1 or self.max_triples < 1:
            raise ConfigError("max_branch and max_triples must be >= 1")


def expand(sentence: Sentence, roots, kinds, model, limits: DecodeLimits = DecodeLimits(),
           diagnostics: Optional[Counters] = None) -> list[Triple]:
    """Grow each root breadth-wise through ``kinds``, then attach arguments.

    Every step marks all elements the branch already holds and asks the model
    for the next kind; each decoded span becomes its own branch and a branch
    with nothing decoded is dropped.
    """
    diag = diagnostics if diagnostics is not None else Counters()
    branches = list(roots)
    for kind in kinds:
        grown = []
        for branch in branches:
            spans = _query(sentence, branch, kind, model, limits, diag)
            if not spans:
                diag.add("pruned_empty")
                continue
            if len(spans) > limits.max_branch:
                diag.add("branch_limit_hits")
                spans = spans[:limits.max_branch]
            grown.extend(branch.with_element(kind, s) for s in spans)
        branches = grown
        if not branches:
            return []

    triples, seen = [], set()
    for branch in branches:
        if not branch.is_complete:
            continue
        args = _query(sentence, branch, A, model, limits, diag)
        if args is None:
            continue
        triple = Triple(branch.subject, branch.predicate, branch.object, tuple(args), 1.0, sentence.id)
        key = normalize(triple, sentence)
        if key in seen:
            diag.add("duplicates")
            continue
        if len(triples) >= limits.max_triples:
            diag.add("triple_limit_hits")
            break
        seen.add(key)
        triples.append(triple)
    return triples


def _query(sentence, branch: PartialTriple, kind, model, limits, diag):
    """Decoded spans for ``kind`` given the branch, or ``None`` if marking failed."""
    try:
        marked = mark(sentence, branch, max_len=limits.max_len)
    except LengthError:
        diag.add("length_overflows")
        return None
    except OverlapError:
        diag.add("overlap_pruned")
        return None
    spans = decode_bio(predict(model, marked, kind), marked)
    taken = list(branch.conditioned().values())
    kept = [s for s in spans if not any(s.overlaps(t) for t in taken)]
    if len(kept) < len(spans):
        diag.add("overlap_dropped", len(spans) - len(kept))
    return kept


def extract(sentence: Sentence, pathway: Pathway, model, limits: DecodeLimits = DecodeLimits(),
            diagnostics: Optional[Counters] = None) -> list[Triple]:
    return expand(sentence, [PartialTriple()], pathway.order, model, limits, diagnostics)


def extract_all(sentence: Sentence, model, limits: DecodeLimits = DecodeLimits(), pathways=PATHWAYS,
                jobs: int = 1, diagnostics: Optional[Counters] = None) -> dict[Pathway, list[Triple]]:
    """Run every pathway; results are keyed in fixed pathway order."""
    pathways = [p for p in PATHWAYS if p in set(pathways)]
    per_path = {p: Counters() for p in pathways}
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=min(jobs, len(pathways))) as pool:
            futures = {p: pool.submit(extract, sentence, p, model, limits, per_path[p]) for p in pathways}
            results = {p: futures[p].result() for p in pathways}
    else:
        results = {p: extract(sentence, p, model, limits, per_path[p]) for p in pathways}
    if diagnostics is not None:
        for p in pathways:
            diagnostics.update(per_path[p])
    return results
