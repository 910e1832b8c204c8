"""Training instances from gold records: sampled extraction orders plus corrupted negatives."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (A, CORE_KINDS, MAX_LEN, O, P, S, Counters, ElementKind, Span, consistent, disjoint_spans,
                   encode_bio_marked, mark)
from .errors import ConfigError, LengthError, OverlapError
from .formats import GoldRecord
from .pathway import PATHWAYS
from .tagger import TrainingInstance

ORDERS = tuple(p.order for p in PATHWAYS)
TECHNIQUES = (1, 2, 3)
MAX_TRIES = 10


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    negatives_per_instance: int = 2
    negative_fraction: float = 1.0
    max_len: int = MAX_LEN

    def __post_init__(self):
        if self.negatives_per_instance < 0:
            raise ConfigError("negatives_per_instance must be >= 0")
        if not (0.0 <= self.negative_fraction <= 1.0):
            raise ConfigError("negative_fraction must lie in [0, 1]")


def record_rng(seed: int, record_id: str, stream: str) -> random.Random:
    # str seeds are hashed with SHA-512, so this is stable across processes
    return random.Random(f"{seed}:{stream}:{record_id}")


def _target_spans(record: GoldRecord, conditioned, kind: ElementKind):
    spans = []
    for t in record.triples:
        if consistent(t, conditioned):
            spans.extend(t.args if kind is A else [t.get(kind)])
    return disjoint_spans(spans)


def _instance(record, conditioned, kind, max_len, diag) -> Optional[TrainingInstance]:
    try:
        marked = mark(record.sentence, conditioned, max_len=max_len)
    except LengthError:
        diag.add("length_skipped")
        return None
    except OverlapError:
        diag.add("overlap_skipped")
        return None
    spans, dropped = _target_spans(record, conditioned, kind)
    if dropped:
        diag.add("overlapping_targets_dropped", dropped)
    return TrainingInstance(marked, kind, encode_bio_marked(spans, marked), False)


def order_instances(record: GoldRecord, triple_index: int, order: Sequence[ElementKind],
                    max_len: int = MAX_LEN, diagnostics: Optional[Counters] = None) -> list[TrainingInstance]:
    """Instances for one gold triple under a fixed extraction order.

    Step ``k`` marks the first ``k`` elements of the order and targets element
    ``k + 1``; the targets are every gold span of that kind consistent with
    the marked prefix. A last instance marks S, P and O and targets the
    arguments.
    """
    diag = diagnostics if diagnostics is not None else Counters()
    t = record.triples[triple_index]
    out = []
    for k, kind in enumerate(order):
        prefix = {e: t.get(e) for e in order[:k]}
        inst = _instance(record, prefix, kind, max_len, diag)
        if inst is not None:
            out.append(inst)
    full = {e: t.get(e) for e in CORE_KINDS}
    inst = _instance(record, full, A, max_len, diag)
    if inst is not None:
        out.append(inst)
    return out


def draw_order(rng: random.Random) -> tuple:
    return ORDERS[rng.randrange(len(ORDERS))]


def generate(record: GoldRecord, config: SamplerConfig = SamplerConfig(),
             diagnostics: Optional[Counters] = None) -> list[TrainingInstance]:
    rng = record_rng(config.seed, record.id, "order")
    out = []
    for i in range(len(record.triples)):
        out.extend(order_instances(record, i, draw_order(rng), config.max_len, diagnostics))
    return out


# -- negatives ---------------------------------------------------------------

def _valid_marking(record: GoldRecord, conditioned) -> bool:
    """True if some gold triple agrees with every marked element."""
    return any(consistent(t, conditioned) for t in record.triples)


def _random_predicate(record: GoldRecord, t, rng: random.Random, avoid) -> Optional[Span]:
    # a same-length window drawn from tokens outside the true predicate
    n, width = len(record.sentence), len(t.predicate)
    starts = [i for i in range(n - width + 1)
              if not Span(i, i + width).overlaps(t.predicate)
              and not any(Span(i, i + width).overlaps(a) for a in avoid)]
    if not starts:
        return None
    s = rng.choice(starts)
    return Span(s, s + width)


def corrupt(record: GoldRecord, n_elements: int, technique: int, rng: random.Random) -> Optional[dict]:
    """One corrupted conditioning with ``n_elements`` marked elements, or ``None``."""
    triples = record.triples
    t = rng.choice(triples)
    if technique == 1:
        if n_elements == 1:
            pred = _random_predicate(record, t, rng, [])
            return None if pred is None else {P: pred}
        other = rng.choice((S, O))
        pred = _random_predicate(record, t, rng, [t.get(other)])
        return None if pred is None else {other: t.get(other), P: pred}
    if technique == 2:
        if n_elements == 1:
            return rng.choice(({S: t.object}, {O: t.subject}))
        return {S: t.object, O: t.subject}
    if technique == 3:
        others = [u for u in triples if u is not t]
        if not others:
            return None
        u = rng.choice(others)
        return {S: t.subject, O: u.object}
    raise ValueError(f"unknown corruption technique {technique}")


def applicable_techniques(record: GoldRecord, n_elements: int) -> tuple:
    if n_elements == 2 and len(record.triples) >= 2:
        return TECHNIQUES
    return (1, 2)


def make_negative(record: GoldRecord, n_elements: int, rng: random.Random, technique: Optional[int] = None,
                  max_len: int = MAX_LEN, diagnostics: Optional[Counters] = None) -> Optional[TrainingInstance]:
    """A negative instance whose marking no gold triple agrees with; target all ``O``.

    A requested technique that does not apply to the record is replaced by a
    draw among the applicable ones.
    """
    diag = diagnostics if diagnostics is not None else Counters()
    allowed = applicable_techniques(record, n_elements)
    if technique is None or technique not in allowed:
        if technique is not None:
            diag.add("technique_resampled")
        technique = rng.choice(allowed)
    for _ in range(MAX_TRIES):
        conditioned = corrupt(record, n_elements, technique, rng)
        if conditioned is None or _valid_marking(record, conditioned):
            continue
        spans = list(conditioned.values())
        if any(a.overlaps(b) for i, a in enumerate(spans) for b in spans[i + 1:]):
            continue
        try:
            marked = mark(record.sentence, conditioned, max_len=max_len)
        except LengthError:
            diag.add("length_skipped")
            return None
        target = rng.choice([k for k in CORE_KINDS if k not in conditioned])
        diag.add(f"technique_{technique}")
        return TrainingInstance(marked, target, ("O",) * len(marked.rendered), True)
    diag.add("negatives_skipped")
    return None


def negatives(record: GoldRecord, config: SamplerConfig = SamplerConfig(),
              diagnostics: Optional[Counters] = None) -> list[TrainingInstance]:
    if not record.triples:
        return []
    rng = record_rng(config.seed, record.id, "negative")
    if rng.random() >= config.negative_fraction:
        return []
    out = []
    for j in range(config.negatives_per_instance):
        inst = make_negative(record, 1 + j % 2, rng, max_len=config.max_len, diagnostics=diagnostics)
        if inst is not None:
            out.append(inst)
    return out


def instances(record: GoldRecord, config: SamplerConfig = SamplerConfig(),
              diagnostics: Optional[Counters] = None) -> list[TrainingInstance]:
    return generate(record, config, diagnostics) + negatives(record, config, diagnostics)
