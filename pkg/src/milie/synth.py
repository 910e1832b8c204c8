"""Templated synthetic corpus with dependency/POS tags and gold n-ary triples.

Each template yields a fully tagged sentence (UD-style relations, 0-based
heads) and its gold extractions. Used for oracle checks and for training and
evaluating the desk-scale tagger.
"""
from __future__ import annotations

import random
from typing import Callable, Optional

from .core import Sentence, Span, Token, Triple
from .formats import GoldRecord

NAMES = ["Anna", "Marco", "Lena", "Omar", "Sofia", "Ivan", "Mei", "Kofi", "Elena", "Tariq", "Nora", "Pablo",
         "Yuki", "Ines", "Ravi", "Greta"]
SURNAMES = ["Rossi", "Okafor", "Tanaka", "Silva", "Novak", "Haddad", "Berg", "Costa"]
PERSON_NOUNS = ["king", "queen", "architect", "engineer", "painter", "merchant", "poet", "duke"]
THING_NOUNS = ["palace", "bridge", "school", "museum", "library", "novel", "song", "painting", "garden", "tower",
               "temple", "ship"]
ADJECTIVES = ["old", "young", "famous", "small", "new", "great"]
VERBS = ["built", "designed", "founded", "wrote", "painted", "sold", "restored", "bought", "opened", "funded"]
PLACES = ["Paris", "Rome", "Kyoto", "Lagos", "Lima", "Oslo", "Delhi", "Cairo", "Quito", "Hanoi"]
ROLES = ["mayor", "founder", "owner", "director", "president", "governor"]


class _Builder:
    def __init__(self):
        self.words, self.deps, self.pos, self.heads = [], [], [], []

    def add(self, word, pos, dep="dep", head=None) -> int:
        self.words.append(word)
        self.pos.append(pos)
        self.deps.append(dep)
        self.heads.append(head)
        return len(self.words) - 1

    def attach(self, i, head, dep):
        self.heads[i] = head
        self.deps[i] = dep

    def __len__(self):
        return len(self.words)

    def sentence(self, sid) -> Sentence:
        return Sentence(sid, tuple(Token(i, w, d, p, h) for i, (w, d, p, h) in
                                   enumerate(zip(self.words, self.deps, self.pos, self.heads))))


def _person(b: _Builder, rng: random.Random, capital: bool = False) -> tuple[Span, int]:
    """A person noun phrase; returns its span and the index of its head token."""
    start = len(b)
    style = rng.randrange(4)
    if style == 0:
        h = b.add(rng.choice(NAMES), "PROPN")
    elif style == 1:
        h = b.add(rng.choice(NAMES), "PROPN")
        b.add(rng.choice(SURNAMES), "PROPN", "flat", h)
    else:
        det = b.add("The" if capital else "the", "DET")
        adj = b.add(rng.choice(ADJECTIVES), "ADJ") if style == 3 else None
        h = b.add(rng.choice(PERSON_NOUNS), "NOUN")
        b.attach(det, h, "det")
        if adj is not None:
            b.attach(adj, h, "amod")
    return Span(start, len(b)), h


def _thing(b: _Builder, rng: random.Random, capital: bool = False) -> tuple[Span, int]:
    start = len(b)
    det_word = rng.choice(["the", "a"])
    det = b.add(det_word.capitalize() if capital else det_word, "DET")
    adj = b.add(rng.choice(ADJECTIVES), "ADJ") if rng.random() < 0.4 else None
    h = b.add(rng.choice(THING_NOUNS), "NOUN")
    b.attach(det, h, "det")
    if adj is not None:
        b.attach(adj, h, "amod")
    return Span(start, len(b)), h


def _pp(b: _Builder, rng: random.Random, governor: int, kind: str) -> Span:
    start = len(b)
    case = b.add("in", "ADP")
    if kind == "year":
        h = b.add(str(rng.randrange(1500, 2021)), "NUM", "obl", governor)
    else:
        h = b.add(rng.choice(PLACES), "PROPN", "obl", governor)
    b.attach(case, h, "case")
    return Span(start, len(b))


def _end(b: _Builder, root: int):
    b.add(".", "PUNCT", "punct", root)


def active(b: _Builder, rng: random.Random):
    """SUBJ VERB OBJ [in YEAR|PLACE] ."""
    subj, sh = _person(b, rng, capital=True)
    v = b.add(rng.choice(VERBS), "VERB", "root", -1)
    b.attach(sh, v, "nsubj")
    obj, oh = _thing(b, rng)
    b.attach(oh, v, "obj")
    args = []
    if rng.random() < 0.7:
        args.append(_pp(b, rng, v, rng.choice(["year", "place"])))
    _end(b, v)
    return [(subj, Span(v, v + 1), obj, args)]


def passive(b: _Builder, rng: random.Random):
    """OBJ was VERB by SUBJ in PLACE [in YEAR] ."""
    obj, oh = _thing(b, rng, capital=True)
    aux = b.add("was", "AUX")
    v = b.add(rng.choice(VERBS), "VERB", "root", -1)
    by = b.add("by", "ADP")
    b.attach(oh, v, "nsubj:pass")
    b.attach(aux, v, "aux:pass")
    agent, ah = _person(b, rng)
    b.attach(ah, v, "obl:agent")
    b.attach(by, ah, "case")
    args = [_pp(b, rng, v, "place")]
    if rng.random() < 0.5:
        args.append(_pp(b, rng, v, "year"))
    _end(b, v)
    return [(obj, Span(aux, by + 1), agent, args)]


def copular(b: _Builder, rng: random.Random):
    """NAME is the ROLE of PLACE ."""
    subj, sh = _person(b, rng, capital=True)
    cop = b.add("is", "AUX")
    det = b.add("the", "DET")
    role = b.add(rng.choice(ROLES), "NOUN", "root", -1)
    of = b.add("of", "ADP")
    place = b.add(rng.choice(PLACES), "PROPN", "nmod", role)
    b.attach(sh, role, "nsubj")
    b.attach(cop, role, "cop")
    b.attach(det, role, "det")
    b.attach(of, place, "case")
    _end(b, role)
    return [(subj, Span(cop, of + 1), Span(place, place + 1), [])]


def clauses(b: _Builder, rng: random.Random):
    """S1 V1 O1 and S2 V2 O2 ."""
    s1, s1h = _person(b, rng, capital=True)
    v1 = b.add(rng.choice(VERBS), "VERB", "root", -1)
    b.attach(s1h, v1, "nsubj")
    o1, o1h = _thing(b, rng)
    b.attach(o1h, v1, "obj")
    cc = b.add("and", "CCONJ")
    s2, s2h = _person(b, rng)
    v2 = b.add(rng.choice(VERBS), "VERB", "conj", v1)
    b.attach(cc, v2, "cc")
    b.attach(s2h, v2, "nsubj")
    o2, o2h = _thing(b, rng)
    b.attach(o2h, v2, "obj")
    _end(b, v1)
    return [(s1, Span(v1, v1 + 1), o1, []), (s2, Span(v2, v2 + 1), o2, [])]


def shared_subject(b: _Builder, rng: random.Random):
    """S V1 O1 and V2 O2 [in YEAR] ."""
    s, sh = _person(b, rng, capital=True)
    v1 = b.add(rng.choice(VERBS), "VERB", "root", -1)
    b.attach(sh, v1, "nsubj")
    o1, o1h = _thing(b, rng)
    b.attach(o1h, v1, "obj")
    cc = b.add("and", "CCONJ")
    v2 = b.add(rng.choice([v for v in VERBS if v != b.words[v1]]), "VERB", "conj", v1)
    b.attach(cc, v2, "cc")
    o2, o2h = _thing(b, rng)
    b.attach(o2h, v2, "obj")
    args = [_pp(b, rng, v2, "year")] if rng.random() < 0.5 else []
    _end(b, v1)
    return [(s, Span(v1, v1 + 1), o1, []), (s, Span(v2, v2 + 1), o2, args)]


def apposition(b: _Builder, rng: random.Random):
    """NAME , the ROLE of PLACE , VERB OBJ ."""
    n = b.add(rng.choice(NAMES), "PROPN")
    c1 = b.add(",", "PUNCT")
    det = b.add("the", "DET")
    role = b.add(rng.choice(ROLES), "NOUN", "appos", n)
    of = b.add("of", "ADP")
    place = b.add(rng.choice(PLACES), "PROPN", "nmod", role)
    b.add(",", "PUNCT", "punct", role)
    v = b.add(rng.choice(VERBS), "VERB", "root", -1)
    b.attach(n, v, "nsubj")
    b.attach(c1, role, "punct")
    b.attach(det, role, "det")
    b.attach(of, place, "case")
    obj, oh = _thing(b, rng)
    b.attach(oh, v, "obj")
    _end(b, v)
    subj = Span(n, n + 1)
    return [(subj, Span(role, of + 1), Span(place, place + 1), []), (subj, Span(v, v + 1), obj, [])]


TEMPLATES: dict[str, Callable] = {
    "active": active,
    "passive": passive,
    "copular": copular,
    "clauses": clauses,
    "shared_subject": shared_subject,
    "apposition": apposition,
}


def make_record(template: str, rng: random.Random, sid: str) -> GoldRecord:
    b = _Builder()
    parts = TEMPLATES[template](b, rng)
    sentence = b.sentence(sid)
    triples = tuple(Triple(s, p, o, tuple(args), 1.0, sid) for s, p, o, args in parts)
    return GoldRecord(sentence, triples)


def corpus(n: int, seed: int = 0, templates: Optional[list[str]] = None, prefix: str = "syn") -> list[GoldRecord]:
    """``n`` records cycling through ``templates`` with randomized fillers."""
    rng = random.Random(seed)
    names = list(templates or TEMPLATES)
    return [make_record(names[i % len(names)], rng, f"{prefix}-{seed}-{i:05d}") for i in range(n)]


def taj_mahal() -> GoldRecord:
    """The running example: (Taj Mahal; built by; Shah Jahan; in 1643)."""
    words = "The Taj Mahal was built by Shah Jahan in 1643".split()
    deps = ["det", "compound", "nsubj:pass", "aux:pass", "root", "case", "obl:agent", "flat", "case", "obl"]
    pos = ["DET", "PROPN", "PROPN", "AUX", "VERB", "ADP", "PROPN", "PROPN", "ADP", "NUM"]
    heads = [2, 2, 4, 4, -1, 6, 4, 6, 9, 4]
    sentence = Sentence.from_words("taj", words, deps, pos, heads)
    triple = Triple(Span(1, 3), Span(4, 6), Span(6, 8), (Span(8, 10),), 1.0, "taj")
    return GoldRecord(sentence, (triple,))
