from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..core import A, ElementKind, MarkedSentence, parse_rendered
from ..errors import DataError, FormatError, ModelError

ALL_KINDS = (ElementKind.SUBJECT, ElementKind.PREDICATE, ElementKind.OBJECT, A)


class TaggerModel:
    """Four-head BIO tagger: one labelling function per element kind.

    Subclasses implement :meth:`_predict`; callers go through :func:`predict`,
    which validates the kind and forces marker positions to ``O``.
    """

    kinds: tuple = ALL_KINDS
    model_type: str = "abstract"

    def _predict(self, marked: MarkedSentence, kind: ElementKind) -> Sequence[str]:
        raise NotImplementedError

    def predict(self, marked: MarkedSentence, kind: ElementKind) -> tuple[str, ...]:
        return predict(self, marked, kind)

    def state(self) -> tuple[dict, dict]:
        """``(metadata, arrays)`` for the model container."""
        raise NotImplementedError


def predict(model: TaggerModel, marked: MarkedSentence, kind) -> tuple[str, ...]:
    kind = ElementKind.parse(kind)
    if kind not in model.kinds:
        raise ModelError(f"{model.model_type} model has no {kind.name.lower()} head")
    labels = list(model._predict(marked, kind))
    if len(labels) != len(marked.rendered):
        raise ModelError(f"model returned {len(labels)} labels for {len(marked.rendered)} positions")
    for i in marked.marker_positions():
        labels[i] = "O"
    return tuple(labels)


@dataclass(frozen=True)
class TrainingInstance:
    marked: MarkedSentence
    target_kind: ElementKind
    target_labels: tuple[str, ...]
    is_negative: bool = False

    def __post_init__(self):
        object.__setattr__(self, "target_labels", tuple(self.target_labels))
        if len(self.target_labels) != len(self.marked.rendered):
            raise DataError(
                f"{len(self.target_labels)} labels for {len(self.marked.rendered)} rendered tokens")
        if self.is_negative and any(lab != "O" for lab in self.target_labels):
            raise DataError("negative instance with non-O labels")

    def to_json(self) -> dict:
        return {
            "rendered": list(self.marked.rendered),
            "tags": list(self.marked.tags),
            "pos": list(self.marked.pos),
            "target_kind": self.target_kind.value,
            "labels": list(self.target_labels),
            "negative": self.is_negative,
            "sentence_id": self.marked.base.id,
        }

    @classmethod
    def from_json(cls, obj) -> "TrainingInstance":
        try:
            rendered, tags, labels = obj["rendered"], obj["tags"], obj["labels"]
            kind = ElementKind.parse(obj["target_kind"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad training instance ({exc})") from None
        if any(lab not in ("B", "I", "O") for lab in labels):
            raise FormatError("labels must be B, I or O")
        try:
            marked = parse_rendered(rendered, tags, obj.get("pos"), obj.get("sentence_id", ""))
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        return cls(marked, kind, tuple(labels), bool(obj.get("negative", False)))
