import json

import numpy as np
import pytest

from milie import synth
from milie.core import A, O, P, S, Sentence, Span, decode_bio, mark
from milie.errors import DataError, FormatError, ModelError, ConfigError
from milie.tagger import (TaggerModel, TrainConfig, TrainingInstance, featurize, load, oracle_from_gold, predict,
                          save, train)
from milie.traindata import SamplerConfig, instances, negatives


class Constant(TaggerModel):
    model_type = "constant"

    def __init__(self, label="B", kinds=(S, P, O, A), length_delta=0):
        self.label, self.kinds, self.delta = label, kinds, length_delta

    def _predict(self, marked, kind):
        return [self.label] * (len(marked.rendered) + self.delta)


def test_predict_forces_markers_to_o(taj):
    marked = mark(taj.sentence, {P: Span(4, 6)})
    labels = predict(Constant("I"), marked, O)
    assert [labels[i] for i in marked.marker_positions()] == ["O", "O"]
    assert labels.count("I") == len(taj.sentence)


def test_predict_errors(taj):
    marked = mark(taj.sentence)
    with pytest.raises(ModelError):
        predict(Constant(kinds=(S, P, O)), marked, A)
    with pytest.raises(ModelError):
        predict(Constant(length_delta=1), marked, S)


def test_oracle_answers_from_gold(taj):
    oracle = oracle_from_gold([taj])
    m0 = mark(taj.sentence)
    assert decode_bio(predict(oracle, m0, P), m0) == [Span(4, 6)]
    m1 = mark(taj.sentence, {O: Span(6, 8)})
    assert decode_bio(predict(oracle, m1, S), m1) == [Span(1, 3)]
    full = mark(taj.sentence, taj.triples[0].partial())
    assert decode_bio(predict(oracle, full, A), full) == [Span(8, 10)]
    wrong = mark(taj.sentence, {O: Span(8, 10)})
    assert set(predict(oracle, wrong, S)) == {"O"}


def test_oracle_unknown_sentence_is_all_o(taj):
    oracle = oracle_from_gold([taj])
    other = Sentence.from_words("nope", ["x", "y"])
    assert predict(oracle, mark(other), P) == ("O", "O")
    renamed = Sentence.from_words("taj", ["x"] * len(taj.sentence))
    assert set(predict(oracle, mark(renamed), P)) == {"O"}


def test_oracle_from_mapping(taj):
    oracle = oracle_from_gold({taj.sentence: list(taj.triples)})
    assert oracle.records["taj"] == taj
    with pytest.raises(TypeError):
        oracle_from_gold({"taj": []})


def test_training_instance_validation_and_json(taj):
    marked = mark(taj.sentence, {P: Span(4, 6)})
    with pytest.raises(DataError):
        TrainingInstance(marked, S, ("O",))
    with pytest.raises(DataError):
        TrainingInstance(marked, S, ("B",) + ("O",) * (len(marked) - 1), is_negative=True)
    inst = TrainingInstance(marked, S, ("O", "B", "I") + ("O",) * (len(marked) - 3))
    back = TrainingInstance.from_json(json.loads(json.dumps(inst.to_json())))
    assert back.marked.rendered == marked.rendered and back.marked.markers == marked.markers
    assert back.target_labels == inst.target_labels and back.target_kind is S
    bad = inst.to_json() | {"labels": ["X"] * len(marked)}
    with pytest.raises(FormatError):
        TrainingInstance.from_json(bad)


def test_model_file_round_trip_oracle(taj):
    oracle = oracle_from_gold([taj])
    data = save(oracle)
    assert data.startswith(b"MILIE-TAGGER\n1\n")
    again = load(data)
    assert save(again) == data
    m = mark(taj.sentence)
    assert predict(again, m, P) == predict(oracle, m, P)


@pytest.mark.parametrize("blob", [b"", b"NOT-A-MODEL\n1\n{}\n", b"MILIE-TAGGER\n9\n{}\n",
                                  b"MILIE-TAGGER\n1\n{\"type\": \"alien\"}\n", b"MILIE-TAGGER\nx\n{}\n"])
def test_model_file_rejects_garbage(blob):
    with pytest.raises(FormatError):
        load(blob)


@pytest.fixture(scope="module")
def tiny_training():
    records = synth.corpus(60, seed=4, prefix="tiny")
    insts = [i for r in records for i in instances(r, SamplerConfig(seed=1))]
    return records, insts


def test_window_tagger_trains_and_round_trips(tiny_training):
    records, insts = tiny_training
    model = train(insts, TrainConfig(seed=0, epochs=3))
    data = save(model)
    assert save(train(insts, TrainConfig(seed=0, epochs=3))) == data  # same seed, same bytes
    again = load(data)
    hits = total = 0
    for inst in insts:
        if inst.is_negative:
            continue
        got = predict(again, inst.marked, inst.target_kind)
        assert got == predict(model, inst.marked, inst.target_kind)
        hits += got == inst.target_labels
        total += 1
    assert hits / total > 0.6  # fits most of its own training sequences


def test_window_tagger_respects_markers(tiny_training):
    _, insts = tiny_training
    model = train(insts, TrainConfig(seed=0, epochs=1))
    marked = insts[1].marked
    labels = predict(model, marked, S)
    assert all(labels[i] == "O" for i in marked.marker_positions())


def test_train_errors(tiny_training):
    _, insts = tiny_training
    with pytest.raises(DataError):
        train([])
    with pytest.raises(DataError):
        train([i for i in insts if i.target_kind is not A])
    with pytest.raises(ConfigError):
        train(insts, TrainConfig(epochs=0))
    with pytest.raises(ConfigError):
        train(insts, TrainConfig(learning_rate=0))


def test_featurize_shapes(taj):
    marked = mark(taj.sentence, {S: Span(1, 3)})
    feats = featurize(marked)
    assert len(feats) == len(marked)
    assert feats[1] == [] and feats[4] == []
    assert "S:in" in feats[2] and "S:L1" in feats[0]
    assert all("bias" in f for i, f in enumerate(feats) if not marked.is_marker(i))


def test_gradients_match_finite_differences():
    from milie.tagger.window import _batch_grads
    rng = np.random.default_rng(0)
    n_feat, hidden = 7, 5
    params = {"E": rng.normal(size=(n_feat, hidden)), "b": rng.normal(size=hidden) * 0.1,
              "W": rng.normal(size=(4, hidden, 3)), "c": rng.normal(size=(4, 3))}
    batch = [(np.array([0, 3, 1, 5, 6, 2]), np.array([2, 3, 1]), np.array([0, 2, 1]), 1, 1.0),
             (np.array([4, 0]), np.array([1, 1]), np.array([2, 2]), 3, 0.5)]
    _, n, grads = _batch_grads(params, batch)
    eps = 1e-6
    for name in ("E", "b", "W", "c"):
        flat = params[name].reshape(-1)
        for idx in range(0, flat.size, max(1, flat.size // 9)):
            old = flat[idx]
            flat[idx] = old + eps
            up = _batch_grads(params, batch)[0]
            flat[idx] = old - eps
            down = _batch_grads(params, batch)[0]
            flat[idx] = old
            numeric = (up - down) / (2 * eps) / n
            assert grads[name].reshape(-1)[idx] == pytest.approx(numeric, rel=1e-4, abs=1e-7)


def test_trained_tagger_rejects_held_out_negatives(desk_model):
    model = desk_model[0]
    held = synth.corpus(200, seed=99)
    negs = [i for r in held for i in negatives(r, SamplerConfig(seed=42))]
    all_o = sum(set(predict(model, i.marked, i.target_kind)) == {"O"} for i in negs)
    assert len(negs) > 100
    assert all_o / len(negs) >= 0.90
