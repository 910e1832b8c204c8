"""Report figures: score bars per system/pathway and the tag-entropy profile."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import CORE_KINDS  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "milie",
}

# no timestamps or version strings, so repeated runs give identical files
_METADATA = {
    ".png": {"Software": None},
    ".svg": {"Date": None, "Creator": None},
    ".pdf": {"CreationDate": None, "Producer": None, "Creator": None},
}


def _size(width=5.0, ratio=(np.sqrt(5.0) - 1.0) / 2.0):
    return width, width * ratio


def _save(fig, path):
    suffix = "." + str(path).rsplit(".", 1)[-1].lower()
    fig.savefig(path, metadata=_METADATA.get(suffix), dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_scores(rows, path, title=""):
    """Grouped F1 / precision / recall bars, one group per ``(label, ScoreReport)``."""
    labels = [label for label, _ in rows]
    values = np.array([[r.f1, r.precision, r.recall] for _, r in rows]) * 100
    x = np.arange(len(labels))
    width = 0.26
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_size(max(4.0, 0.7 * len(labels) + 2)))
        for j, name in enumerate(("F1", "Prec.", "Rec.")):
            ax.bar(x + (j - 1) * width, values[:, j], width, label=name)
        ax.set_xticks(x)
        ax.set_xticklabels(labels)
        ax.set_ylim(0, 105)
        ax.set_ylabel("score (%)")
        if title:
            ax.set_title(title)
        ax.legend(ncol=3, frameon=False, loc="lower right")
        _save(fig, path)


def plot_entropy(profile, path, title="Tag entropy per element"):
    families = sorted({fam for _, fam in profile})
    kinds = [k for k in CORE_KINDS if any(kk == k for kk, _ in profile)]
    x = np.arange(len(kinds))
    width = 0.8 / max(len(families), 1)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_size(4.0))
        for j, fam in enumerate(families):
            ax.bar(x + (j - (len(families) - 1) / 2) * width, [profile[(k, fam)] for k in kinds], width,
                   label=fam.upper())
        ax.set_xticks(x)
        ax.set_xticklabels([k.name.capitalize() for k in kinds])
        ax.set_ylabel("entropy (bits)")
        ax.set_title(title)
        ax.legend(frameon=False)
        _save(fig, path)
