"""Graded-relevance evaluation: NDCG@10, P@5, MAP, BPref, and reports.

Binarization for P@5/MAP/BPref treats grade >= 1 as relevant; NDCG uses
the graded 2^g - 1 gain with log2(i+1) discount. Unjudged documents count
as nonrelevant for precision metrics and are ignored entirely by BPref.
Macro averages run over the qrels topics; topics absent from a run score 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from hybridrank.trec import Qrel, RunEntry

log = logging.getLogger(__name__)

METRICS = ("ndcg10", "p5", "ap", "bpref")


@dataclass(frozen=True)
class TopicScores:
    topic: int
    ndcg10: float
    p5: float
    ap: float
    bpref: float
    judged_at_10: int

    def metric(self, name: str) -> float:
        return getattr(self, name)


def _grades_by_topic(qrels: Sequence[Qrel]) -> dict[int, dict[str, int]]:
    grades: dict[int, dict[str, int]] = {}
    for qrel in qrels:
        grades.setdefault(qrel.topic, {})[qrel.doc_id] = qrel.grade
    return grades


def _ranked_ids(run: Sequence[RunEntry]) -> list[str]:
    return [e.doc_id for e in sorted(run, key=lambda e: e.rank)]


def ndcg_at_k(ranked: Sequence[str], grades: Mapping[str, int], k: int = 10) -> float:
    """NDCG with gain 2^g - 1 and discount log2(i+1); 0 when no relevant
    documents are judged for the topic."""
    ideal = sorted((g for g in grades.values() if g > 0), reverse=True)
    if not ideal:
        return 0.0
    dcg = sum(
        (2 ** grades.get(doc_id, 0) - 1) / math.log2(i + 1)
        for i, doc_id in enumerate(ranked[:k], start=1)
    )
    idcg = sum((2**g - 1) / math.log2(i + 1) for i, g in enumerate(ideal[:k], start=1))
    return dcg / idcg


def precision_at_k(ranked: Sequence[str], grades: Mapping[str, int], k: int = 5) -> float:
    """Fraction of the top k that is judged relevant (grade >= 1); short
    runs count as padded with nonrelevant documents."""
    hits = sum(1 for doc_id in ranked[:k] if grades.get(doc_id, 0) >= 1)
    return hits / k


def average_precision(ranked: Sequence[str], grades: Mapping[str, int]) -> float:
    """AP = mean over relevant ranks of P@rank; 0 when nothing is judged
    relevant."""
    total_relevant = sum(1 for g in grades.values() if g >= 1)
    if total_relevant == 0:
        return 0.0
    hits = 0
    precision_sum = 0.0
    for i, doc_id in enumerate(ranked, start=1):
        if grades.get(doc_id, 0) >= 1:
            hits += 1
            precision_sum += hits / i
    return precision_sum / total_relevant


def bpref(ranked: Sequence[str], grades: Mapping[str, int]) -> float:
    """Binary preference over judged documents only.

    bpref = (1/R) * sum over retrieved relevant docs of
    (1 - nonrelevant-above / min(R, N)). Unjudged documents never matter;
    with N = 0 every retrieved relevant doc contributes 1.
    """
    n_rel = sum(1 for g in grades.values() if g >= 1)
    n_nonrel = sum(1 for g in grades.values() if g == 0)
    if n_rel == 0:
        return 0.0
    denom = min(n_rel, n_nonrel)
    total = 0.0
    nonrel_above = 0
    for doc_id in ranked:
        grade = grades.get(doc_id)
        if grade is None:
            continue
        if grade >= 1:
            total += 1.0 if denom == 0 else max(0.0, 1.0 - nonrel_above / denom)
        else:
            nonrel_above += 1
    return total / n_rel


def score_topic(ranked: Sequence[str], grades: Mapping[str, int], topic: int) -> TopicScores:
    return TopicScores(
        topic=topic,
        ndcg10=ndcg_at_k(ranked, grades, 10),
        p5=precision_at_k(ranked, grades, 5),
        ap=average_precision(ranked, grades),
        bpref=bpref(ranked, grades),
        judged_at_10=sum(1 for d in ranked[:10] if d in grades),
    )


def evaluate_run(
    run: Sequence[RunEntry], qrels: Sequence[Qrel]
) -> tuple[list[TopicScores], TopicScores]:
    """Per-topic scores plus the macro average over qrels topics.

    Topics judged but absent from the run score 0 on every metric. The
    macro row reuses TopicScores with topic number -1.
    """
    grades_by_topic = _grades_by_topic(qrels)
    by_topic: dict[int, list[RunEntry]] = {}
    for entry in run:
        by_topic.setdefault(entry.topic, []).append(entry)

    per_topic = []
    for topic in sorted(grades_by_topic):
        ranked = _ranked_ids(by_topic.get(topic, []))
        per_topic.append(score_topic(ranked, grades_by_topic[topic], topic))
    n = len(per_topic)
    macro = TopicScores(
        topic=-1,
        ndcg10=sum(t.ndcg10 for t in per_topic) / n if n else 0.0,
        p5=sum(t.p5 for t in per_topic) / n if n else 0.0,
        ap=sum(t.ap for t in per_topic) / n if n else 0.0,
        bpref=sum(t.bpref for t in per_topic) / n if n else 0.0,
        judged_at_10=round(sum(t.judged_at_10 for t in per_topic) / n) if n else 0,
    )
    return per_topic, macro


def scores_to_csv(per_topic: Sequence[TopicScores], macro: TopicScores) -> str:
    """CSV report: one row per topic plus a final ALL macro row."""
    lines = ["topic,ndcg10,p5,ap,bpref,judged_at_10"]
    for t in per_topic:
        lines.append(f"{t.topic},{t.ndcg10:.4f},{t.p5:.4f},{t.ap:.4f},{t.bpref:.4f},{t.judged_at_10}")
    lines.append(f"ALL,{macro.ndcg10:.4f},{macro.p5:.4f},{macro.ap:.4f},{macro.bpref:.4f},{macro.judged_at_10}")
    return "\n".join(lines) + "\n"


def scores_to_table(per_topic: Sequence[TopicScores], macro: TopicScores) -> str:
    """Aligned plain-text table mirroring the CSV report."""
    header = f"{'topic':>6} {'ndcg10':>8} {'p5':>8} {'ap':>8} {'bpref':>8} {'judged@10':>10}"
    lines = [header]
    for t in list(per_topic) + [macro]:
        label = "ALL" if t.topic == -1 else str(t.topic)
        lines.append(
            f"{label:>6} {t.ndcg10:>8.4f} {t.p5:>8.4f} {t.ap:>8.4f} {t.bpref:>8.4f} {t.judged_at_10:>10}"
        )
    return "\n".join(lines) + "\n"


def compare_runs(
    scores_a: Sequence[TopicScores], scores_b: Sequence[TopicScores]
) -> list[tuple[int, str, float, float, float]]:
    """Per-topic metric deltas (B - A) over the topic intersection.

    Rows are (topic, metric, run_a, run_b, delta) sorted by topic then
    metric order. Differing topic sets narrow to the intersection with a
    warning; disjoint sets give an empty table.
    """
    a_by_topic = {t.topic: t for t in scores_a}
    b_by_topic = {t.topic: t for t in scores_b}
    common = sorted(set(a_by_topic) & set(b_by_topic))
    if set(a_by_topic) != set(b_by_topic):
        log.warning(
            "run topic sets differ (%d vs %d topics); comparing %d common",
            len(a_by_topic), len(b_by_topic), len(common),
        )
    rows = []
    for topic in common:
        for metric in METRICS:
            va = a_by_topic[topic].metric(metric)
            vb = b_by_topic[topic].metric(metric)
            rows.append((topic, metric, va, vb, vb - va))
    return rows


def comparison_to_csv(rows: Sequence[tuple[int, str, float, float, float]]) -> str:
    lines = ["topic,metric,run_a,run_b,delta"]
    for topic, metric, va, vb, delta in rows:
        lines.append(f"{topic},{metric},{va:.4f},{vb:.4f},{delta:.4f}")
    return "\n".join(lines) + "\n"
