from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Sequence

from ..core import CORE_KINDS, ElementKind
from ..errors import MissingTagError
from ..formats import GoldRecord

FAMILIES = ("dep", "pos")


def entropy(counts: Iterable[int]) -> float:
    """Shannon entropy in bits of a histogram."""
    counts = [c for c in counts if c > 0]
    total = sum(counts)
    if total == 0:
        return 0.0
    h = -sum(c / total * math.log2(c / total) for c in counts)
    return h + 0.0  # turns -0.0 into 0.0


def tag_histograms(records: Iterable[GoldRecord], families: Sequence[str] = FAMILIES) -> dict:
    """``{(kind, family): Counter}`` pooling the tags of every token in every gold span.

    Each gold triple contributes its own span tokens, so a span shared by two
    triples is counted twice.
    """
    for fam in families:
        if fam not in FAMILIES:
            raise ValueError(f"unknown tag family {fam!r}")
    hist = {(k, fam): Counter() for k in CORE_KINDS for fam in families}
    for rec in records:
        toks = rec.sentence.tokens
        for t in rec.triples:
            for k in CORE_KINDS:
                for i in t.get(k):
                    for fam in families:
                        tag = toks[i].dep if fam == "dep" else toks[i].pos
                        if not tag:
                            raise MissingTagError(f"sentence {rec.id!r}, token {i}: no {fam} tag")
                        hist[(k, fam)][tag] += 1
    return hist


def entropy_profile(records: Iterable[GoldRecord], families: Sequence[str] = FAMILIES) -> dict:
    """``{(kind, family): bits}`` over S, P and O spans."""
    return {key: entropy(c.values()) for key, c in tag_histograms(records, families).items()}


def format_entropy_table(profile: dict, title: str = "Entropy") -> str:
    families = [f for f in FAMILIES if any(fam == f for _, fam in profile)]
    cols = [(k, f) for k in CORE_KINDS for f in families]
    head1 = f"{title:<10}" + "".join(f"{_KIND_NAME[k]:>{9 * len(families)}}" for k in CORE_KINDS)
    head2 = " " * 10 + "".join(f"{f.upper():>9}" for _, f in cols)
    row = " " * 10 + "".join(f"{profile[c]:9.3f}" for c in cols)
    return "\n".join([head1, head2, row]) + "\n"


def format_entropy_tsv(profile: dict) -> str:
    lines = ["element\tfamily\tentropy_bits"]
    for (k, fam), h in profile.items():
        lines.append(f"{_KIND_NAME[k].lower()}\t{fam}\t{h!r}")
    return "\n".join(lines) + "\n"


_KIND_NAME = {ElementKind.SUBJECT: "Subject", ElementKind.PREDICATE: "Predicate", ElementKind.OBJECT: "Object"}
