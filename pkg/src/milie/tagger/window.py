"""Desk-scale trainable tagger.

A per-token classifier: sparse window features are summed into a shared hidden
layer (an embedding bag followed by a ReLU), and each element kind has its own
softmax output layer over ``B``/``I``/``O``. Only the head named by an
instance's target kind receives a loss term from that instance.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from ..core import CORE_KINDS, LABELS, ElementKind, MarkedSentence
from ..errors import ConfigError, DataError
from .base import ALL_KINDS, TaggerModel, TrainingInstance

log = logging.getLogger(__name__)

_LABEL_ID = {lab: i for i, lab in enumerate(LABELS)}
_KIND_ID = {k: i for i, k in enumerate(ALL_KINDS)}
_BOUNDARY_DEPS = frozenset({"cc", "punct", "mark"})
_LEFT_MODIFIERS = frozenset({"det", "amod", "compound", "case", "nummod", "advmod"})
_RIGHT_MODIFIERS = frozenset({"flat", "fixed"})
_PAD = "<PAD>"


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    epochs: int = 2
    learning_rate: float = 0.003
    negative_weight: float = 1.0
    hidden: int = 64
    batch_size: int = 32
    init_scale: float = 0.1

    def validate(self):
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if not (self.learning_rate > 0):
            raise ConfigError("learning_rate must be > 0")
        if self.negative_weight < 0:
            raise ConfigError("negative_weight must be >= 0")
        if self.hidden < 1 or self.batch_size < 1:
            raise ConfigError("hidden and batch_size must be >= 1")
        if not (self.init_scale > 0):
            raise ConfigError("init_scale must be > 0")
        return self


def _shape(word: str) -> str:
    if word.isdigit():
        return "num"
    if word[:1].isupper():
        return "cap"
    if word.isalpha():
        return "low"
    return "sym"


def _relation(bi: int, start: int, end: int) -> str:
    if start <= bi < end:
        return "in"
    if bi < start:
        return f"L{min(start - bi, 8)}"
    return f"R{min(bi - end + 1, 8)}"


def phrase_tags(deps) -> tuple[list[str], list[int]]:
    """Per-token dependency tag of the enclosing phrase, and a phrase id.

    Left modifiers (det, amod, case, ...) take the tag of the first following
    non-modifier; flat/fixed continuations take the tag of what they extend.
    Only the tag sequence is used, not head indices.
    """
    n = len(deps)
    anchor = list(range(n))
    for i in range(n - 1, -1, -1):
        if deps[i] in _LEFT_MODIFIERS and i + 1 < n:
            anchor[i] = anchor[i + 1]
    for i in range(1, n):
        if deps[i] in _RIGHT_MODIFIERS:
            anchor[i] = anchor[i - 1]
    return [deps[a] for a in anchor], anchor


def featurize(marked: MarkedSentence) -> list[list[str]]:
    """Feature strings for every rendered position (empty at markers)."""
    words = [w.lower() for w in marked.rendered]
    tags = marked.tags
    pos = marked.pos
    base = marked.base
    boundary = [t.dep in _BOUNDARY_DEPS for t in base.tokens]
    pdeps, anchor = phrase_tags([t.dep for t in base.tokens])
    cond = "".join(k.value for k in CORE_KINDS if k in marked.markers) or "-"
    n = len(words)

    out = []
    for i in range(n):
        bi = marked.rendered_to_base[i]
        if bi is None:
            out.append([])
            continue
        d, p = tags[i], pos[i]
        pd = pdeps[bi]
        first = int(bi == 0 or anchor[bi - 1] != anchor[bi])
        f = ["bias", f"w={words[i]}", f"d={d}", f"p={p}", f"shape={_shape(marked.rendered[i])}",
             f"pd={pd}", f"pd={pd}|d={d}", f"cond={cond}", f"cond={cond}|d={d}", f"cond={cond}|p={p}",
             f"cond={cond}|pd={pd}", f"first={first}|pd={pd}|d={d}"]
        for off in (-2, -1, 1, 2):
            j = i + off
            if 0 <= j < n:
                f.append(f"w{off}={words[j]}")
                f.append(f"d{off}={tags[j]}")
                f.append(f"p{off}={pos[j]}")
            else:
                f.append(f"w{off}={_PAD}")
        prev_d = tags[i - 1] if i > 0 else _PAD
        next_d = tags[i + 1] if i + 1 < n else _PAD
        f.append(f"d={d}|d-1={prev_d}")
        f.append(f"d={d}|d+1={next_d}")
        for k in CORE_KINDS:
            span = marked.markers.get(k)
            if span is None:
                f.append(f"{k.value}:-")
                continue
            rel = _relation(bi, span.start, span.end)
            lo, hi = (bi + 1, span.start) if bi < span.start else (span.end, bi)
            crossed = any(boundary[lo:hi])
            f.append(f"{k.value}:{rel}")
            f.append(f"{k.value}:{rel}|d={d}")
            f.append(f"{k.value}:{rel}|p={p}")
            # another phrase with the same role sits between this token and the span
            same = any(pdeps[j] == pd and anchor[j] != anchor[bi] for j in range(lo, hi))
            side = rel[0]
            f.append(f"{k.value}:{side}|x={int(crossed)}")
            f.append(f"{k.value}:{side}|x={int(crossed)}|d={d}")
            f.append(f"{k.value}:{rel}|pd={pd}")
            f.append(f"{k.value}:{side}|x={int(crossed)}|pd={pd}")
            f.append(f"{k.value}:{side}|sb={int(same)}|pd={pd}")
            f.append(f"{k.value}:{side}|sb={int(same)}|x={int(crossed)}|pd={pd}|d={d}")
            f.append(f"{k.value}:{side}|sb={int(same)}|x={int(crossed)}|pd={pd}|first={first}")
        out.append(f)
    return out


class WindowTagger(TaggerModel):
    model_type = "window-mlp"

    def __init__(self, features: list[str], params: dict[str, np.ndarray], config: TrainConfig):
        self.features = list(features)
        self.index = {f: i for i, f in enumerate(self.features)}
        self.params = params
        self.config = config

    def _encode(self, marked: MarkedSentence):
        rows, ids, starts = [], [], []
        for i, feats in enumerate(featurize(marked)):
            if not feats:
                continue
            rows.append(i)
            starts.append(len(ids))
            ids.extend(self.index[f] for f in feats if f in self.index)
        return rows, np.asarray(ids, dtype=np.int64), np.asarray(starts, dtype=np.int64)

    def _predict(self, marked: MarkedSentence, kind: ElementKind):
        labels = ["O"] * len(marked.rendered)
        rows, ids, starts = self._encode(marked)
        if not rows:
            return labels
        h = _hidden(self.params, ids, starts)
        k = _KIND_ID[kind]
        logits = h @ self.params["W"][k] + self.params["c"][k]
        for r, best in zip(rows, logits.argmax(axis=1)):
            labels[r] = LABELS[best]
        return labels

    def state(self):
        meta = {"features": self.features, "config": asdict(self.config)}
        return meta, self.params

    @classmethod
    def from_state(cls, meta, arrays):
        return cls(meta["features"], {k: arrays[k] for k in ("E", "b", "W", "c")}, TrainConfig(**meta["config"]))


def _hidden(params, ids, starts):
    # every row carries the bias feature, so no bag is empty
    x = np.add.reduceat(params["E"][ids], starts, axis=0) + params["b"]
    return np.maximum(x, 0.0)


def train(instances: Iterable[TrainingInstance], config: TrainConfig = TrainConfig()) -> WindowTagger:
    config.validate()
    data = []
    for inst in instances:
        if len(inst.target_labels) != len(inst.marked.rendered):
            raise DataError("instance labels and rendered tokens differ in length")
        data.append((featurize(inst.marked), inst))
    if not data:
        raise DataError("no training instances")
    missing = set(ALL_KINDS) - {inst.target_kind for _, inst in data}
    if missing:
        raise DataError(f"no instances for kinds {sorted(k.value for k in missing)}")

    features = sorted({f for feats, _ in data for row in feats for f in row})
    index = {f: i for i, f in enumerate(features)}

    encoded = []
    for feats, inst in data:
        ids, lens, labels = [], [], []
        for i, row in enumerate(feats):
            if not row:
                continue
            ids.extend(index[f] for f in row)
            lens.append(len(row))
            labels.append(_LABEL_ID[inst.target_labels[i]])
        weight = config.negative_weight if inst.is_negative else 1.0
        encoded.append((np.asarray(ids, np.int64), np.asarray(lens, np.int64),
                        np.asarray(labels, np.int64), _KIND_ID[inst.target_kind], weight))

    rng = np.random.default_rng(config.seed)
    H = config.hidden
    params = {
        "E": rng.normal(0.0, config.init_scale, (len(features), H)),
        "b": np.zeros(H),
        "W": rng.normal(0.0, 1.0 / np.sqrt(H), (len(ALL_KINDS), H, len(LABELS))),
        "c": np.zeros((len(ALL_KINDS), len(LABELS))),
    }
    adam = _Adam(params, config.learning_rate)

    for epoch in range(config.epochs):
        order = rng.permutation(len(encoded))
        total, count = 0.0, 0
        for b0 in range(0, len(order), config.batch_size):
            batch = [encoded[j] for j in order[b0:b0 + config.batch_size]]
            loss, n, grads = _batch_grads(params, batch)
            adam.step(grads)
            total += loss
            count += n
        log.info("epoch %d: mean token loss %.4f", epoch + 1, total / max(count, 1))
    return WindowTagger(features, params, config)


def _batch_grads(params, batch):
    ids = np.concatenate([b[0] for b in batch])
    lens = np.concatenate([b[1] for b in batch])
    labels = np.concatenate([b[2] for b in batch])
    kinds = np.concatenate([np.full(len(b[1]), b[3]) for b in batch])
    weights = np.concatenate([np.full(len(b[1]), b[4]) for b in batch])
    starts = np.concatenate([[0], np.cumsum(lens)[:-1]])

    pre = np.add.reduceat(params["E"][ids], starts, axis=0) + params["b"]
    h = np.maximum(pre, 0.0)
    dh = np.zeros_like(h)
    dW = np.zeros_like(params["W"])
    dc = np.zeros_like(params["c"])
    n = len(labels)
    loss = 0.0
    for k in np.unique(kinds):
        rows = np.flatnonzero(kinds == k)
        hk = h[rows]
        logits = hk @ params["W"][k] + params["c"][k]
        logits -= logits.max(axis=1, keepdims=True)
        prob = np.exp(logits)
        prob /= prob.sum(axis=1, keepdims=True)
        y = labels[rows]
        w = weights[rows]
        loss += float(-(w * np.log(prob[np.arange(len(rows)), y] + 1e-12)).sum())
        g = prob
        g[np.arange(len(rows)), y] -= 1.0
        g *= (w / n)[:, None]
        dW[k] = hk.T @ g
        dc[k] = g.sum(axis=0)
        dh[rows] = g @ params["W"][k].T
    dpre = dh * (pre > 0)
    db = dpre.sum(axis=0)
    dE = np.zeros_like(params["E"])
    np.add.at(dE, ids, np.repeat(dpre, lens, axis=0))
    return loss, n, {"E": dE, "b": db, "W": dW, "c": dc}


class _Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, grads):
        self.t += 1
        c1 = 1 - self.beta1 ** self.t
        c2 = 1 - self.beta2 ** self.t
        for k, g in grads.items():
            m, v = self.m[k], self.v[k]
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            self.params[k] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
