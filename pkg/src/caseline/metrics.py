"""Micro-averaged multi-label metrics.

All metrics pool every (case, label) pair into a single binary
problem before computing anything ("micro" averaging): one confusion
table for the thresholded decisions, one flat score/bit list for the
ranking metrics.  ROC-AUC uses the rank-statistic form with average
ranks over ties; PR-AUC is average precision with tied scores grouped
at a single threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import LengthMismatchError, NoPositivesError, SingleClassError

__all__ = [
    "ConfusionCounts",
    "micro_confusion",
    "micro_f1",
    "micro_jaccard",
    "micro_roc_auc",
    "micro_pr_auc",
    "MetricsReport",
    "compute_report",
    "format_report_table",
]


class ConfusionCounts(NamedTuple):
    tp: int
    fp: int
    fn: int
    tn: int


def _as_bit_matrix(x, name: str) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise LengthMismatchError(f"{name} must be 2-D (cases x labels)")
    return arr.astype(np.int64)


def micro_confusion(decisions, truth) -> ConfusionCounts:
    """Pooled confusion counts over all (case, label) pairs."""
    d = _as_bit_matrix(decisions, "decisions")
    t = _as_bit_matrix(truth, "truth")
    if d.shape != t.shape:
        raise LengthMismatchError(
            f"decisions shape {d.shape} != truth shape {t.shape}")
    tp = int(np.sum((d == 1) & (t == 1)))
    fp = int(np.sum((d == 1) & (t == 0)))
    fn = int(np.sum((d == 0) & (t == 1)))
    tn = int(np.sum((d == 0) & (t == 0)))
    return ConfusionCounts(tp, fp, fn, tn)


def micro_f1(counts: ConfusionCounts) -> float:
    """2TP / (2TP + FP + FN); 0 when the denominator is 0."""
    denom = 2 * counts.tp + counts.fp + counts.fn
    return 2 * counts.tp / denom if denom else 0.0


def micro_jaccard(counts: ConfusionCounts) -> float:
    """TP / (TP + FP + FN); 0 when the denominator is 0."""
    denom = counts.tp + counts.fp + counts.fn
    return counts.tp / denom if denom else 0.0


def _flatten_scores(scores, truth) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    t = np.asarray(truth).reshape(-1).astype(np.int64)
    if s.shape[0] != t.shape[0]:
        raise LengthMismatchError(
            f"{s.shape[0]} scores for {t.shape[0]} truth bits")
    return s, t


def _average_ranks(s: np.ndarray) -> np.ndarray:
    """1-based ranks of s, tied values sharing their average rank."""
    order = np.argsort(s, kind="stable")
    ranks = np.empty(s.shape[0], dtype=np.float64)
    i = 0
    while i < s.shape[0]:
        j = i
        while j + 1 < s.shape[0] and s[order[j + 1]] == s[order[i]]:
            j += 1
        # positions i..j (0-based) share the average of ranks i+1..j+1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def micro_roc_auc(scores, truth) -> float:
    """P(score of a positive > score of a negative) + half the ties.

    Computed from the rank-sum statistic over the pooled pairs, which
    equals pairwise comparison counting with ties worth one half.
    """
    s, t = _flatten_scores(scores, truth)
    n_pos = int(t.sum())
    n_neg = t.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError(
            f"ROC-AUC undefined with {n_pos} positives and {n_neg} "
            "negatives")
    ranks = _average_ranks(s)
    rank_sum_pos = float(ranks[t == 1].sum())
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def micro_pr_auc(scores, truth) -> float:
    """Average precision: sum of precision x recall-increment over the
    distinct score thresholds, descending, with tied scores entering
    together."""
    s, t = _flatten_scores(scores, truth)
    n_pos = int(t.sum())
    if n_pos == 0:
        raise NoPositivesError("PR-AUC undefined without positives")
    order = np.argsort(-s, kind="stable")
    s, t = s[order], t[order]
    ap = 0.0
    tp = 0
    seen = 0
    i = 0
    n = s.shape[0]
    while i < n:
        j = i
        while j + 1 < n and s[j + 1] == s[i]:
            j += 1
        group_tp = int(t[i:j + 1].sum())
        tp += group_tp
        seen += j - i + 1
        if group_tp:
            ap += (group_tp / n_pos) * (tp / seen)
        i = j + 1
    return ap


@dataclass(frozen=True)
class MetricsReport:
    """Metric bundle for one evaluation run.

    micro_roc_auc is None when the pooled truth contains a single
    class (the metric is reported as absent, never as 0).
    """

    micro_f1: float
    micro_jaccard: float
    micro_pr_auc: float
    micro_roc_auc: float | None
    tp: int
    fp: int
    fn: int
    tn: int
    n_cases: int
    seed: int

    def counts(self) -> ConfusionCounts:
        return ConfusionCounts(self.tp, self.fp, self.fn, self.tn)

    def to_json(self) -> str:
        """Canonical single-line JSON (stable key order, no spaces)."""
        return json.dumps(
            {k: getattr(self, k) for k in (
                "micro_f1", "micro_jaccard", "micro_pr_auc",
                "micro_roc_auc", "tp", "fp", "fn", "tn",
                "n_cases", "seed")},
            sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        obj = json.loads(text)
        return cls(**{k: obj[k] for k in (
            "micro_f1", "micro_jaccard", "micro_pr_auc", "micro_roc_auc",
            "tp", "fp", "fn", "tn", "n_cases", "seed")})


def compute_report(probabilities, decisions, truth,
                   seed: int = 0) -> MetricsReport:
    """All four micro metrics from per-case probability and decision
    matrices against the truth matrix."""
    counts = micro_confusion(decisions, truth)
    try:
        roc = micro_roc_auc(probabilities, truth)
    except SingleClassError:
        roc = None
    return MetricsReport(
        micro_f1=micro_f1(counts),
        micro_jaccard=micro_jaccard(counts),
        micro_pr_auc=micro_pr_auc(probabilities, truth),
        micro_roc_auc=roc,
        tp=counts.tp, fp=counts.fp, fn=counts.fn, tn=counts.tn,
        n_cases=_as_bit_matrix(truth, "truth").shape[0],
        seed=seed)


def format_report_table(rows: Sequence[tuple[str, Sequence[MetricsReport]]]
                        ) -> str:
    """Aligned text table: one line per named configuration with
    mean +/- std over its reports for each metric."""
    headers = ["configuration", "micro-F1", "micro-Jaccard",
               "micro-PR-AUC", "micro-ROC-AUC", "runs"]
    lines = []
    for name, reports in rows:
        cells = [name]
        for attr in ("micro_f1", "micro_jaccard", "micro_pr_auc",
                     "micro_roc_auc"):
            vals = [getattr(r, attr) for r in reports]
            if any(v is None for v in vals):
                cells.append("absent")
                continue
            mean = sum(vals) / len(vals)
            if len(vals) > 1:
                var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
                cells.append(f"{mean:.3f} +/- {math.sqrt(var):.3f}")
            else:
                cells.append(f"{mean:.3f}")
        cells.append(str(len(reports)))
        lines.append(cells)
    widths = [max(len(h), *(len(row[i]) for row in lines)) if lines
              else len(h) for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in lines:
        out.append("  ".join(c.ljust(w)
                             for c, w in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"
