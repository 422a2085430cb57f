"""Figure rendering for evaluation reports.

Kept apart from the metric computations so the scoring code stays free of
plotting concerns; the CLI report path writes these PNGs next to the CSVs.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from hybridrank.evalmetrics import METRICS, TopicScores


def plot_topic_metrics(
    per_topic: Sequence[TopicScores], out_path: str | Path, run_name: str = "run"
) -> Path:
    """Bar chart of every metric per topic for one evaluated run."""
    out_path = Path(out_path)
    topics = [t.topic for t in per_topic]
    fig, axes = plt.subplots(len(METRICS), 1, figsize=(max(6, 0.35 * len(topics) + 2), 9), sharex=True)
    for ax, metric in zip(axes, METRICS):
        ax.bar(range(len(topics)), [t.metric(metric) for t in per_topic], color="#4878a8")
        ax.set_ylabel(metric)
        ax.set_ylim(0, 1)
    axes[-1].set_xticks(range(len(topics)))
    axes[-1].set_xticklabels([str(t) for t in topics], rotation=90, fontsize=7)
    axes[-1].set_xlabel("topic")
    axes[0].set_title(f"Per-topic metrics: {run_name}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_run_comparison(
    scores_a: Sequence[TopicScores],
    scores_b: Sequence[TopicScores],
    out_path: str | Path,
    name_a: str = "run A",
    name_b: str = "run B",
    metric: str = "ndcg10",
) -> Path:
    """Side-by-side per-topic bars for one metric across two runs."""
    out_path = Path(out_path)
    a_by_topic = {t.topic: t for t in scores_a}
    b_by_topic = {t.topic: t for t in scores_b}
    topics = sorted(set(a_by_topic) & set(b_by_topic))
    xs = range(len(topics))
    width = 0.4
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(topics) + 2), 4))
    ax.bar([x - width / 2 for x in xs], [a_by_topic[t].metric(metric) for t in topics],
           width, label=name_a, color="#4878a8")
    ax.bar([x + width / 2 for x in xs], [b_by_topic[t].metric(metric) for t in topics],
           width, label=name_b, color="#d1605e")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([str(t) for t in topics], rotation=90, fontsize=7)
    ax.set_xlabel("topic")
    ax.set_ylabel(metric)
    ax.set_ylim(0, 1)
    ax.legend()
    ax.set_title(f"{metric} per topic: {name_a} vs {name_b}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_ablation(
    rows: Sequence[tuple[str, float, float]], out_path: str | Path
) -> Path:
    """Grouped bars of P@5 and NDCG@10 per ablation variant."""
    out_path = Path(out_path)
    labels = [r[0] for r in rows]
    xs = range(len(labels))
    width = 0.4
    fig, ax = plt.subplots(figsize=(max(5, 0.9 * len(labels)), 4))
    ax.bar([x - width / 2 for x in xs], [r[1] for r in rows], width, label="P@5", color="#4878a8")
    ax.bar([x + width / 2 for x in xs], [r[2] for r in rows], width, label="NDCG@10", color="#d1605e")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylim(0, 1)
    ax.legend()
    ax.set_title("Ablation study")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
