"""Domain types, the conditioning-marker codec and the BIO span codec."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .errors import AlignmentError, InvalidSpanError, LengthError, OverlapError

MAX_LEN = 120
MARKER_TAG = "MARKER"
LABELS = ("B", "I", "O")


class ElementKind(enum.Enum):
    SUBJECT = "S"
    PREDICATE = "P"
    OBJECT = "O"
    ARGUMENT = "A"

    @property
    def marker(self) -> str:
        if self is ElementKind.ARGUMENT:
            raise ValueError("arguments are never marked")
        return f"<{self.value}>"

    @classmethod
    def parse(cls, value) -> "ElementKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown element kind {value!r}") from None

    def __repr__(self):
        return f"ElementKind.{self.name}"


S, P, O, A = ElementKind.SUBJECT, ElementKind.PREDICATE, ElementKind.OBJECT, ElementKind.ARGUMENT
CORE_KINDS = (S, P, O)
MARKERS = {k.marker: k for k in CORE_KINDS}


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    dep: str = ""
    pos: Optional[str] = None
    # 0-based index of the syntactic governor, -1 for the root, None if unknown
    head: Optional[int] = None

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"token {self.index} has empty text")


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError(f"sentence {self.id!r} has no tokens")
        for i, tok in enumerate(self.tokens):
            if tok.index != i:
                raise ValueError(f"sentence {self.id!r}: token {i} has index {tok.index}")
            if tok.text in ("<S>", "<P>", "<O>"):
                raise ValueError(f"sentence {self.id!r}: token {i} is a reserved marker symbol")

    @classmethod
    def from_words(cls, id: str, words: Sequence[str], deps=None, pos=None, heads=None) -> "Sentence":
        n = len(words)
        deps = deps or ["dep"] * n
        pos = pos or [None] * n
        heads = heads or [None] * n
        return cls(id, tuple(Token(i, w, d, p, h) for i, (w, d, p, h) in enumerate(zip(words, deps, pos, heads))))

    def __len__(self):
        return len(self.tokens)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def text(self, span: "Span") -> str:
        return " ".join(t.text for t in self.tokens[span.start:span.end])


@dataclass(frozen=True, order=True)
class Span:
    """Half-open token interval ``[start, end)``."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise InvalidSpanError(f"invalid span [{self.start},{self.end})")

    def __len__(self):
        return self.end - self.start

    def __iter__(self):
        return iter(range(self.start, self.end))

    def __repr__(self):
        return f"[{self.start},{self.end})"

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def contains(self, index: int) -> bool:
        return self.start <= index < self.end

    def check(self, length: int) -> "Span":
        if self.end > length:
            raise InvalidSpanError(f"span {self!r} exceeds length {length}")
        return self

    def to_list(self) -> list[int]:
        return [self.start, self.end]


@dataclass(frozen=True)
class PartialTriple:
    subject: Optional[Span] = None
    predicate: Optional[Span] = None
    object: Optional[Span] = None
    args: tuple[Span, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def get(self, kind: ElementKind) -> Optional[Span]:
        return getattr(self, _FIELD[kind])

    def with_element(self, kind: ElementKind, span: Span) -> "PartialTriple":
        if kind is A:
            return replace(self, args=self.args + (span,))
        return replace(self, **{_FIELD[kind]: span})

    def conditioned(self) -> dict[ElementKind, Span]:
        """The present S/P/O elements, in S, P, O order."""
        return {k: self.get(k) for k in CORE_KINDS if self.get(k) is not None}

    @property
    def is_complete(self) -> bool:
        return all(self.get(k) is not None for k in CORE_KINDS)

    def to_triple(self, confidence=1.0, sentence_id="") -> "Triple":
        return Triple(self.subject, self.predicate, self.object, self.args, confidence, sentence_id)


_FIELD = {S: "subject", P: "predicate", O: "object"}


@dataclass(frozen=True)
class Triple:
    subject: Span
    predicate: Span
    object: Span
    args: tuple[Span, ...] = ()
    confidence: float = 1.0
    sentence_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if self.subject is None or self.predicate is None or self.object is None:
            raise ValueError("a triple needs subject, predicate and object")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")

    def get(self, kind: ElementKind) -> Optional[Span]:
        return getattr(self, _FIELD[kind])

    def partial(self) -> PartialTriple:
        return PartialTriple(self.subject, self.predicate, self.object, self.args)

    def spans(self) -> tuple[Span, ...]:
        return (self.subject, self.predicate, self.object) + self.args

    def binary(self) -> "Triple":
        return replace(self, args=())

    def surface(self, sentence: Sentence) -> tuple[str, str, str, tuple[str, ...]]:
        return (sentence.text(self.subject), sentence.text(self.predicate), sentence.text(self.object),
                tuple(sentence.text(a) for a in self.args))


@dataclass(frozen=True)
class MarkedSentence:
    """A sentence with conditioning markers inserted around extracted elements.

    ``rendered_to_base[i]`` is ``None`` at marker positions.
    """

    base: Sentence
    markers: Mapping[ElementKind, Span]
    rendered: tuple[str, ...]
    tags: tuple[str, ...]
    pos: tuple[str, ...]
    base_to_rendered: tuple[int, ...]
    rendered_to_base: tuple[Optional[int], ...]

    def __len__(self):
        return len(self.rendered)

    def is_marker(self, i: int) -> bool:
        return self.rendered_to_base[i] is None

    def marker_positions(self) -> list[int]:
        return [i for i, b in enumerate(self.rendered_to_base) if b is None]

    def rendered_span(self, span: Span) -> Span:
        return Span(self.base_to_rendered[span.start], self.base_to_rendered[span.end - 1] + 1)

    def conditioned(self) -> PartialTriple:
        return PartialTriple(**{_FIELD[k]: s for k, s in self.markers.items()})

    def __str__(self):
        return " ".join(self.rendered)


def _check_spans(sentence: Sentence, conditioned: Mapping[ElementKind, Span]):
    for kind, span in conditioned.items():
        if kind is A:
            raise ValueError("arguments are never marked")
        span.check(len(sentence))
    items = sorted(conditioned.items(), key=lambda kv: kv[1])
    for (k1, s1), (k2, s2) in zip(items, items[1:]):
        if s1.overlaps(s2):
            raise OverlapError(f"{k1.name.lower()} {s1!r} overlaps {k2.name.lower()} {s2!r}")


def mark(sentence: Sentence, conditioned=None, max_len: int = MAX_LEN) -> MarkedSentence:
    """Insert ``<S>``/``<P>``/``<O>`` marker pairs around the conditioned spans."""
    if conditioned is None:
        conditioned = {}
    elif isinstance(conditioned, PartialTriple):
        conditioned = conditioned.conditioned()
    if A in conditioned:
        raise ValueError("arguments are never marked")
    conditioned = {k: conditioned[k] for k in CORE_KINDS if k in conditioned}
    _check_spans(sentence, conditioned)

    opens: dict[int, ElementKind] = {s.start: k for k, s in conditioned.items()}
    closes: dict[int, ElementKind] = {s.end: k for k, s in conditioned.items()}
    rendered, tags, pos, r2b, b2r = [], [], [], [], []

    def put_marker(kind):
        rendered.append(kind.marker)
        tags.append(MARKER_TAG)
        pos.append(MARKER_TAG)
        r2b.append(None)

    n = len(sentence)
    for i in range(n + 1):
        if i in closes:
            put_marker(closes[i])
        if i == n:
            break
        if i in opens:
            put_marker(opens[i])
        tok = sentence.tokens[i]
        b2r.append(len(rendered))
        r2b.append(i)
        rendered.append(tok.text)
        tags.append(tok.dep)
        pos.append(tok.pos or "")
    if len(rendered) > max_len:
        raise LengthError(f"rendered length {len(rendered)} exceeds max_len {max_len}")
    return MarkedSentence(sentence, conditioned, tuple(rendered), tuple(tags), tuple(pos), tuple(b2r), tuple(r2b))


def strip(marked: MarkedSentence) -> Sentence:
    """Drop the marker positions and rebuild the base sentence from what remains."""
    tokens = []
    for r, b in enumerate(marked.rendered_to_base):
        if b is None:
            continue
        head = marked.base.tokens[b].head
        tokens.append(Token(len(tokens), marked.rendered[r], marked.tags[r], marked.pos[r] or None, head))
    return Sentence(marked.base.id, tuple(tokens))


def parse_rendered(rendered: Sequence[str], tags: Sequence[str], pos=None, sentence_id: str = "",
                   max_len: int = MAX_LEN) -> MarkedSentence:
    """Rebuild a :class:`MarkedSentence` from its rendered token sequence."""
    if len(tags) != len(rendered):
        raise AlignmentError("rendered tokens and tags differ in length")
    pos = list(pos) if pos is not None else [""] * len(rendered)
    words, deps, poses = [], [], []
    open_at: dict[ElementKind, int] = {}
    markers: dict[ElementKind, Span] = {}
    for tok, tag, p in zip(rendered, tags, pos):
        if tok in MARKERS:
            kind = MARKERS[tok]
            if kind in open_at:
                start = open_at.pop(kind)
                if start == len(words):
                    raise AlignmentError(f"empty {tok} marker pair")
                markers[kind] = Span(start, len(words))
            elif kind in markers:
                raise AlignmentError(f"marker {tok} occurs more than once")
            else:
                open_at[kind] = len(words)
        else:
            words.append(tok)
            deps.append(tag)
            poses.append(p or None)
    if open_at:
        raise AlignmentError(f"unbalanced markers: {sorted(k.marker for k in open_at)}")
    sentence = Sentence.from_words(sentence_id, words, deps, poses)
    try:
        marked = mark(sentence, markers, max_len=max(max_len, len(rendered)))
    except OverlapError:
        raise AlignmentError("markers are nested or interleaved") from None
    if marked.rendered != tuple(rendered):
        raise AlignmentError("markers are nested or interleaved")
    return marked


def decode_bio(labels: Sequence[str], over: MarkedSentence) -> list[Span]:
    """Read maximal B/I runs as spans in base-sentence indices.

    A stray ``I`` (after ``O`` or at position 0) opens a new span.
    """
    if len(labels) != len(over.rendered):
        raise AlignmentError(f"{len(labels)} labels for {len(over.rendered)} rendered tokens")
    raw = []
    start = None
    for i, lab in enumerate(labels):
        if lab == "B":
            if start is not None:
                raw.append((start, i))
            start = i
        elif lab == "I":
            if start is None:
                start = i
        elif lab == "O":
            if start is not None:
                raw.append((start, i))
            start = None
        else:
            raise ValueError(f"unknown BIO label {lab!r}")
    if start is not None:
        raw.append((start, len(labels)))

    spans = []
    r2b = over.rendered_to_base
    for a, b in raw:
        if any(r2b[i] is None for i in range(a, b)):
            raise AlignmentError(f"decoded span [{a},{b}) crosses a marker symbol")
        spans.append(Span(r2b[a], r2b[b - 1] + 1))
    return spans


def encode_bio(spans: Iterable[Span], length: int) -> tuple[str, ...]:
    spans = sorted(spans)
    for s in spans:
        s.check(length)
    for s1, s2 in zip(spans, spans[1:]):
        if s1.overlaps(s2):
            raise OverlapError(f"spans {s1!r} and {s2!r} overlap")
    labels = ["O"] * length
    for s in spans:
        labels[s.start] = "B"
        for i in range(s.start + 1, s.end):
            labels[i] = "I"
    return tuple(labels)


def encode_bio_marked(spans: Iterable[Span], over: MarkedSentence) -> tuple[str, ...]:
    """Encode base-index spans against the rendered positions of ``over``."""
    return encode_bio([over.rendered_span(s) for s in spans], len(over.rendered))


def normalize(triple: Triple, sentence: Sentence) -> tuple:
    """Canonical identity key of an extraction; confidence is not part of it."""
    for s in triple.spans():
        s.check(len(sentence))
    return triple_key(triple, sentence.id)


def triple_key(triple: Triple, sentence_id: str) -> tuple:
    return (
        sentence_id,
        tuple(triple.subject),
        tuple(triple.predicate),
        tuple(triple.object),
        tuple(sorted(tuple(a) for a in triple.args)),
    )


def disjoint_spans(spans: Iterable[Span]) -> tuple[list[Span], int]:
    """Deduplicate and keep a left-to-right non-overlapping subset.

    Returns the kept spans and the number of overlapping spans dropped; BIO
    cannot represent overlapping spans of the same kind in one sequence.
    """
    kept: list[Span] = []
    dropped = 0
    for s in sorted(set(spans)):
        if kept and kept[-1].overlaps(s):
            dropped += 1
            continue
        kept.append(s)
    return kept, dropped


def consistent(triple, conditioned: Mapping[ElementKind, Span]) -> bool:
    return all(triple.get(k) == s for k, s in conditioned.items())


@dataclass
class Counters:
    """Mutable diagnostic counters, merged across sentences by addition."""

    values: dict = field(default_factory=dict)

    def add(self, name: str, n: int = 1):
        self.values[name] = self.values.get(name, 0) + n

    def update(self, other: "Counters"):
        for k, v in other.values.items():
            self.add(k, v)

    def __getitem__(self, name):
        return self.values.get(name, 0)

    def as_dict(self):
        return dict(sorted(self.values.items()))
