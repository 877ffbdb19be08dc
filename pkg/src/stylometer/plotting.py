"""Figures for learning curves and category differences.

Rendering uses the Agg backend so it works headless; every function writes
one file and closes its figure.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "stylometer",
}

_MARKERS = "os^Dv<>p"


def _save(fig, path):
    # fixed metadata keeps repeated renders byte-stable
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def plot_learning_curves(curves, path, title=None):
    """Accuracy against percentage of data used, one line per feature set.

    ``curves`` maps a feature-set label to ``[(fraction, accuracy), ...]``.
    """
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        for i, (label, points) in enumerate(curves.items()):
            xs = [100 * f for f, _ in points]
            ys = [a for _, a in points]
            ax.plot(xs, ys, marker=_MARKERS[i % len(_MARKERS)], linewidth=1.5, label=label)
        ax.set_xlabel("Fraction of the data (%)")
        ax.set_ylabel("Accuracy")
        ax.set_ylim(0.4, 0.9)
        ax.legend(loc="lower right", frameon=False)
        ax.grid(axis="y", linewidth=0.4, alpha=0.6)
        if title:
            ax.set_title(title)
        _save(fig, path)


def plot_category_differences(diffs, path, title=None, only_significant=True):
    """Bar chart of legitimate-minus-fake percentages per category."""
    rows = [d for d in diffs if d.significant or not only_significant]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(max(3.0, 0.28 * len(rows) + 1.0), 3.2))
        xs = range(len(rows))
        colors = ["#7f7fff" if d.diff > 0 else "#ff7f7f" for d in rows]
        ax.bar(xs, [d.diff for d in rows], color=colors, edgecolor="black", linewidth=0.5)
        ax.axhline(0, color="black", linewidth=0.8)
        ax.set_xticks(list(xs))
        ax.set_xticklabels([d.category for d in rows], rotation=90)
        ax.set_ylabel("Legitimate - fake (%)")
        ax.grid(axis="y", linewidth=0.4, alpha=0.6)
        if title:
            ax.set_title(title)
        _save(fig, path)
