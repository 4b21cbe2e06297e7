"""Figure rendering for report-producing commands.

Renders alongside the delimited/JSON outputs: a label-distribution bar chart
for `stats` and the F0.5-vs-threshold curve for `tune-threshold`. Import is
headless-safe (Agg backend).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_label_distribution(
    counts: dict[str, int],
    path: str,
    title: str = "Label distribution",
    realized_counts: dict[str, int] | None = None,
) -> str:
    """Bar chart of per-tag occurrence counts, highest first.

    When realized counts are given (generation records), they are overlaid so
    requested-but-unrealized mass is visible.
    """
    names = sorted(counts, key=lambda n: (-counts[n], n))
    values = [counts[n] for n in names]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.4 * len(names) + 2), 4.0))
    x = range(len(names))
    ax.bar(x, values, color="#4878d0", label="requested" if realized_counts else None)
    if realized_counts:
        ax.bar(
            x,
            [realized_counts.get(n, 0) for n in names],
            color="#ee854a",
            width=0.5,
            label="realized",
        )
        ax.legend(frameon=False)
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=8)
    ax.set_ylabel("sentences")
    ax.set_title(title)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_threshold_curve(
    thresholds: list[float],
    scores: list[float],
    chosen: float,
    path: str,
) -> str:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(thresholds, scores, marker="o", markersize=3, color="#4878d0")
    ax.axvline(chosen, color="#d65f5f", linestyle="--", label=f"chosen = {chosen:.2f}")
    ax.set_xlabel("decision threshold")
    ax.set_ylabel("micro F0.5")
    ax.set_title("Threshold search")
    ax.legend(frameon=False)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
