"""Binarizing n-ary extractions and completing partial extractions from rule-based systems."""
from __future__ import annotations

from dataclasses import replace
from typing import Optional, Sequence

from .core import CORE_KINDS, O, P, S, Counters, PartialTriple, Sentence, Span, Triple, decode_bio, mark
from .errors import LengthError, OverlapError
from .formats import PriorRecord
from .pathway import DecodeLimits, expand
from .tagger import predict

COMPLETION_ORDER = (P, S, O)


def binarize(triple: Triple, sentence: Sentence, model, limits: DecodeLimits = DecodeLimits(),
             diagnostics: Optional[Counters] = None) -> list[Triple]:
    """Base ``(s, p, o)`` plus one re-extracted triple per accepted argument.

    Each argument is marked as a hypothesized object next to the subject and a
    fresh predicate is predicted; an argument whose prediction is empty is
    dropped.
    """
    diag = diagnostics if diagnostics is not None else Counters()
    out = [triple.binary()]
    for arg in triple.args:
        try:
            marked = mark(sentence, {S: triple.subject, O: arg}, max_len=limits.max_len)
        except LengthError:
            diag.add("length_overflows")
            continue
        except OverlapError:
            diag.add("overlap_pruned")
            continue
        spans = [s for s in decode_bio(predict(model, marked, P), marked)
                 if not s.overlaps(triple.subject) and not s.overlaps(arg)]
        if not spans:
            diag.add("arguments_rejected")
            continue
        out.append(replace(triple, predicate=spans[0], object=arg, args=()))
    return out


def complete(sentence: Sentence, prior: PartialTriple, model, limits: DecodeLimits = DecodeLimits(),
             diagnostics: Optional[Counters] = None) -> list[Triple]:
    """Fill the missing S/P/O elements around ``prior`` (P, then S, then O), then arguments."""
    missing = [k for k in COMPLETION_ORDER if prior.get(k) is None]
    root = PartialTriple(prior.subject, prior.predicate, prior.object)
    return expand(sentence, [root], missing, model, limits, diagnostics)


def find_tokens(sentence: Sentence, text: str) -> Optional[Span]:
    """Leftmost exact token-sequence match of ``text`` in the sentence."""
    needle = text.split()
    if not needle:
        return None
    words = sentence.words
    for i in range(len(words) - len(needle) + 1):
        if list(words[i:i + len(needle)]) == needle:
            return Span(i, i + len(needle))
    return None


def align_prior(record: PriorRecord, sentence: Sentence) -> Optional[PartialTriple]:
    """Turn a raw prior into token spans; ``None`` when a string does not occur."""
    spans = {}
    for name in ("subject", "predicate", "object"):
        value = getattr(record, name)
        if value is None:
            continue
        if isinstance(value, str):
            value = find_tokens(sentence, value)
            if value is None:
                return None
        elif value.end > len(sentence):
            return None
        spans[name] = value
    return PartialTriple(**spans)


def complete_many(sentence: Sentence, priors: Sequence[PriorRecord], model, limits: DecodeLimits = DecodeLimits(),
                  diagnostics: Optional[Counters] = None) -> list[Triple]:
    """Complete every prior of one sentence; duplicate completions are kept once."""
    diag = diagnostics if diagnostics is not None else Counters()
    out, seen = [], set()
    for record in priors:
        prior = align_prior(record, sentence)
        if prior is None:
            diag.add("priors_unaligned")
            continue
        if not any(prior.get(k) is not None for k in CORE_KINDS):
            diag.add("priors_empty")
            continue
        for t in complete(sentence, prior, model, limits, diag):
            key = (t.subject, t.predicate, t.object, t.args)
            if key not in seen:
                seen.add(key)
                out.append(t)
    return out
