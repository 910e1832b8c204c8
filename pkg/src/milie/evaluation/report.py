from __future__ import annotations

import json
from dataclasses import asdict, dataclass


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class ScoreReport:
    precision: float
    recall: float
    f1: float
    matched_predictions: float
    total_predictions: int
    matched_facts: float
    total_facts: int
    metric: str = ""

    @classmethod
    def from_counts(cls, metric, matched_preds, total_preds, matched_facts, total_facts,
                    precision_mass=None, recall_mass=None):
        """Ratios from counts; the ``*_mass`` overrides carry similarity-weighted sums."""
        p_num = matched_preds if precision_mass is None else precision_mass
        r_num = matched_facts if recall_mass is None else recall_mass
        p = p_num / total_preds if total_preds else 0.0
        r = r_num / total_facts if total_facts else 0.0
        return cls(p, r, f1_score(p, r), matched_preds, total_preds, matched_facts, total_facts, metric)

    def to_dict(self):
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def format_table(rows, title: str = "") -> str:
    """Aligned text table with F1 / Prec. / Rec. columns, values in percent.

    ``rows`` is a sequence of ``(label, ScoreReport)``.
    """
    rows = list(rows)
    width = max([len(title)] + [len(label) for label, _ in rows])
    lines = [f"{title:<{width}}  {'F1':>7}  {'Prec.':>7}  {'Rec.':>7}"]
    for label, rep in rows:
        lines.append(f"{label:<{width}}  {100 * rep.f1:7.2f}  {100 * rep.precision:7.2f}  {100 * rep.recall:7.2f}")
    return "\n".join(lines) + "\n"


def format_tsv(rows) -> str:
    lines = ["\t".join(["name", "f1", "precision", "recall", "matched_predictions", "total_predictions",
                        "matched_facts", "total_facts"])]
    for label, rep in rows:
        lines.append("\t".join([label] + [repr(round(float(v), 12)) for v in (rep.f1, rep.precision, rep.recall)]
                               + [str(v) for v in (rep.matched_predictions, rep.total_predictions,
                                                   rep.matched_facts, rep.total_facts)]))
    return "\n".join(lines) + "\n"
