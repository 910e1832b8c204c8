"""JSONL record codecs for sentences, triples, gold records, fact synsets and priors.

All readers stream line by line and raise :class:`FormatError` carrying the
1-based line number of the offending record.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Optional

from .core import MARKERS, MAX_LEN, Sentence, Span, Token, Triple
from .errors import FormatError

SCHEMA_VERSIONS = {
    "sentence": 1,
    "triple": 1,
    "gold-record": 1,
    "fact-synset": 1,
    "prior": 1,
    "training-instance": 1,
}


@dataclass(frozen=True)
class GoldRecord:
    sentence: Sentence
    triples: tuple[Triple, ...]

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(self.triples))
        n = len(self.sentence)
        for t in self.triples:
            for s in t.spans():
                s.check(n)

    @property
    def id(self):
        return self.sentence.id


@dataclass(frozen=True)
class FactSynset:
    """One gold fact with every acceptable ``(subject, predicate, object)`` surface."""

    sentence_id: str
    variants: frozenset

    def __post_init__(self):
        if not self.variants:
            raise ValueError("a fact synset needs at least one variant")


def _ws(text: str) -> str:
    return " ".join(text.split())


# -- sentences ---------------------------------------------------------------

def sentence_from_json(obj, max_len: int = MAX_LEN) -> Sentence:
    try:
        sid = obj["id"]
        raw = obj["tokens"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"sentence record missing field {exc}") from None
    if not isinstance(sid, str):
        raise FormatError("sentence id must be a string")
    if not isinstance(raw, list) or not raw:
        raise FormatError(f"sentence {sid!r} has no tokens")
    if len(raw) > max_len:
        raise FormatError(f"sentence {sid!r} has {len(raw)} tokens, more than max_len {max_len}")
    tokens = []
    for i, t in enumerate(raw):
        if not isinstance(t, dict) or not isinstance(t.get("text"), str) or not t["text"]:
            raise FormatError(f"sentence {sid!r}: token {i} has no text")
        if t["text"] in MARKERS:
            raise FormatError(f"sentence {sid!r}: token {i} is the reserved marker {t['text']}")
        head = t.get("head")
        if head is not None and not (isinstance(head, int) and -1 <= head < len(raw)):
            raise FormatError(f"sentence {sid!r}: token {i} has invalid head {head!r}")
        tokens.append(Token(i, t["text"], str(t.get("dep", "")), t.get("pos"), head))
    return Sentence(sid, tuple(tokens))


def sentence_to_json(sentence: Sentence) -> dict:
    toks = []
    for t in sentence.tokens:
        d = {"text": t.text, "dep": t.dep}
        if t.pos is not None:
            d["pos"] = t.pos
        if t.head is not None:
            d["head"] = t.head
        toks.append(d)
    return {"id": sentence.id, "tokens": toks}


# -- triples -----------------------------------------------------------------

def _span(value, what) -> Span:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
        raise FormatError(f"{what} must be a [start, end] pair, got {value!r}")
    try:
        return Span(value[0], value[1])
    except ValueError as exc:
        raise FormatError(f"{what}: {exc}") from None


def triple_from_json(obj, sentence_id: Optional[str] = None) -> Triple:
    if not isinstance(obj, dict):
        raise FormatError("triple record must be an object")
    try:
        args = tuple(_span(a, "argument") for a in obj.get("args", []))
        conf = float(obj.get("confidence", 1.0))
        return Triple(
            _span(obj["subject"], "subject"),
            _span(obj["predicate"], "predicate"),
            _span(obj["object"], "object"),
            args,
            conf,
            obj.get("sentence_id", sentence_id) or "",
        )
    except KeyError as exc:
        raise FormatError(f"triple record missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc)) from None


def triple_to_json(triple: Triple, with_confidence: bool = True) -> dict:
    d = {
        "sentence_id": triple.sentence_id,
        "subject": triple.subject.to_list(),
        "predicate": triple.predicate.to_list(),
        "object": triple.object.to_list(),
        "args": [a.to_list() for a in triple.args],
    }
    if with_confidence:
        d["confidence"] = round(float(triple.confidence), 12)
    return d


# -- gold records and synsets ------------------------------------------------

def gold_from_json(obj, max_len: int = MAX_LEN) -> GoldRecord:
    if not isinstance(obj, dict) or "sentence" not in obj:
        raise FormatError("gold record needs a 'sentence' field")
    sentence = sentence_from_json(obj["sentence"], max_len)
    triples = [triple_from_json(t, sentence.id) for t in obj.get("triples", [])]
    triples = [Triple(t.subject, t.predicate, t.object, t.args, 1.0, sentence.id) for t in triples]
    try:
        return GoldRecord(sentence, tuple(triples))
    except ValueError as exc:
        raise FormatError(f"sentence {sentence.id!r}: {exc}") from None


def gold_to_json(record: GoldRecord) -> dict:
    return {
        "sentence": sentence_to_json(record.sentence),
        "triples": [triple_to_json(t, with_confidence=False) for t in record.triples],
    }


def synset_from_json(obj) -> list[FactSynset]:
    """One line carries every fact of a sentence, so it yields several synsets."""
    try:
        sid = obj["sentence_id"]
        facts = obj["facts"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"fact synset record missing field {exc}") from None
    out = []
    for fact in facts:
        try:
            variants = frozenset((_ws(v["s"]), _ws(v["p"]), _ws(v["o"])) for v in fact)
            out.append(FactSynset(sid, variants))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"sentence {sid!r}: bad fact variant ({exc})") from None
    return out


def synsets_from_gold(record: GoldRecord) -> list[FactSynset]:
    """Turn each gold triple into a single-variant binary synset."""
    out = []
    for t in record.triples:
        s, p, o, _ = t.surface(record.sentence)
        out.append(FactSynset(record.id, frozenset({(s, p, o)})))
    return out


def synset_to_json(sentence_id: str, synsets: Iterable[FactSynset]) -> dict:
    facts = [[{"s": s, "p": p, "o": o} for s, p, o in sorted(fs.variants)] for fs in synsets]
    return {"sentence_id": sentence_id, "facts": facts}


# -- priors ------------------------------------------------------------------

@dataclass(frozen=True)
class PriorRecord:
    """Raw hybrid prior: each element is a span, a surface string, or absent."""

    sentence_id: str
    subject: object = None
    predicate: object = None
    object: object = None


def prior_from_json(obj) -> PriorRecord:
    if not isinstance(obj, dict) or not isinstance(obj.get("sentence_id"), str):
        raise FormatError("prior record needs a string 'sentence_id'")
    fields = {}
    for name in ("subject", "predicate", "object"):
        value = obj.get(name)
        if value is None:
            continue
        if isinstance(value, str):
            fields[name] = value
        else:
            fields[name] = _span(value, name)
    return PriorRecord(obj["sentence_id"], **fields)


# -- streaming helpers -------------------------------------------------------

def read_jsonl(stream: IO[str], decode) -> Iterator:
    """Yield ``decode(obj)`` for each non-blank line, tagging errors with the line number."""
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON ({exc.msg})", line=lineno) from None
        try:
            yield decode(obj)
        except FormatError as exc:
            if exc.line is None:
                raise FormatError(str(exc), line=lineno) from None
            raise


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def write_jsonl(stream: IO[str], objs: Iterable[dict]) -> int:
    n = 0
    for obj in objs:
        stream.write(dumps(obj) + "\n")
        n += 1
    return n
