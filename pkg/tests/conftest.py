from __future__ import annotations

import random
import time

import pytest
from hypothesis import strategies as st

from milie import synth
from milie.core import O, P, S, PartialTriple, Sentence, Span
from milie.tagger import TrainConfig, oracle_from_gold, train
from milie.traindata import SamplerConfig, instances

# (name, passed, detail) rows filled in by the acceptance suite
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


WORDS = ["the", "a", "river", "Anna", "built", "in", "1990", "of", "and", ",", "Rome", "old", "was", "by"]
DEPS = ["det", "nsubj", "root", "obj", "case", "obl", "amod", "cc", "punct", "conj", "flat"]
POS = ["DET", "NOUN", "VERB", "ADP", "NUM", "PROPN", "ADJ", "PUNCT", None]


def random_sentence(rng: random.Random, min_len=1, max_len=25, sid="r") -> Sentence:
    n = rng.randint(min_len, max_len)
    words = [rng.choice(WORDS) for _ in range(n)]
    deps = [rng.choice(DEPS) for _ in range(n)]
    pos = [rng.choice(POS) for _ in range(n)]
    heads = [rng.choice([-1] + list(range(n))) for _ in range(n)]
    return Sentence.from_words(sid, words, deps, pos, heads)


def random_disjoint_spans(rng: random.Random, n: int, k: int) -> list[Span]:
    """Up to ``k`` non-overlapping spans in ``[0, n)``."""
    cuts = sorted(rng.sample(range(n + 1), min(2 * k, n + 1)))
    spans = []
    for a, b in zip(cuts[::2], cuts[1::2]):
        if b > a:
            spans.append(Span(a, b))
    return spans


def random_partial(rng: random.Random, n: int) -> PartialTriple:
    spans = random_disjoint_spans(rng, n, 3)
    rng.shuffle(spans)
    kinds = rng.sample([S, P, O], len(spans))
    chosen = {k: s for k, s in zip(kinds, spans) if rng.random() < 0.8}
    return PartialTriple(chosen.get(S), chosen.get(P), chosen.get(O))


@st.composite
def sentences(draw, min_len=1, max_len=20):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_sentence(random.Random(seed), min_len, max_len)


@st.composite
def sentence_and_partial(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    s = random_sentence(rng)
    return s, random_partial(rng, len(s))


@pytest.fixture(scope="session")
def taj():
    return synth.taj_mahal()


@pytest.fixture(scope="session")
def small_corpus():
    return synth.corpus(60, seed=5)


@pytest.fixture(scope="session")
def small_oracle(small_corpus):
    return oracle_from_gold(small_corpus)


@pytest.fixture(scope="session")
def desk_model():
    """Tagger trained on 600 template records; shared so it is trained once per session."""
    records = synth.corpus(600, seed=11, prefix="train")
    insts = [i for r in records for i in instances(r, SamplerConfig(seed=3))]
    t0 = time.perf_counter()
    model = train(insts, TrainConfig(seed=0, epochs=8, learning_rate=0.003))
    return model, len(insts), time.perf_counter() - t0
