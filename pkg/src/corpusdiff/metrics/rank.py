"""Ranking metrics over binary relevance: recall, precision, MMRR, NDCG,
and bootstrap confidence intervals by query resampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyGold, TooFewQueries


def _check(retrieved: Sequence[str], gold: set, l: int) -> None:
    if l < 1:
        raise ValueError("l must be >= 1")
    if not gold:
        raise EmptyGold("query has no gold passages; exclude it from aggregation")


def recall_at(retrieved: Sequence[str], gold: set, l: int) -> float:
    _check(retrieved, gold, l)
    hits = sum(1 for p in retrieved[:l] if p in gold)
    return hits / len(gold)


def precision_at(retrieved: Sequence[str], gold: set, l: int) -> float:
    _check(retrieved, gold, l)
    hits = sum(1 for p in retrieved[:l] if p in gold)
    return hits / l


def mmrr(retrieved: Sequence[str], gold: set, l: int) -> float:
    """Mean over gold items of their reciprocal rank in the top-l (0 if absent)."""
    _check(retrieved, gold, l)
    rank_of = {p: r for r, p in enumerate(retrieved[:l], 1)}
    total = sum(1.0 / rank_of[g] for g in gold if g in rank_of)
    return total / len(gold)


def ndcg(retrieved: Sequence[str], gold: set, l: int) -> float:
    """Binary-gain NDCG with 1/log2(rank+1) discounting from rank 1."""
    _check(retrieved, gold, l)
    dcg = sum(
        1.0 / math.log2(r + 1) for r, p in enumerate(retrieved[:l], 1) if p in gold
    )
    ideal_hits = min(len(gold), l)
    idcg = sum(1.0 / math.log2(r + 1) for r in range(1, ideal_hits + 1))
    return dcg / idcg


def bootstrap_ci(
    values: Sequence[float],
    resamples: int = 10000,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float, float]:
    """Percentile bootstrap over query resampling: (lower, mean, upper)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        raise TooFewQueries("bootstrap needs at least 2 per-query values")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, values.size, size=(resamples, values.size))
    means = values[idx].mean(axis=1)
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(means, [tail, 1.0 - tail])
    return float(lower), float(values.mean()), float(upper)


METRIC_NAMES = ("recall", "precision", "mmrr", "ndcg")
_METRIC_FN = {"recall": recall_at, "precision": precision_at, "mmrr": mmrr, "ndcg": ndcg}


@dataclass
class MetricReport:
    l: int
    query_count: int
    excluded_queries: int
    per_query: dict[str, list[float]]
    mean: dict[str, float]
    ci_lower: dict[str, float]
    ci_upper: dict[str, float]

    def as_rows(self) -> list[dict]:
        return [
            {
                "metric": f"{name}@{self.l}",
                "mean": self.mean[name],
                "ci_lower": self.ci_lower[name],
                "ci_upper": self.ci_upper[name],
                "queries": self.query_count,
            }
            for name in METRIC_NAMES
        ]


def evaluate_rankings(
    rankings: Sequence[Sequence[str]],
    golds: Sequence[set],
    l: int,
    resamples: int = 10000,
    level: float = 0.95,
    seed: int = 0,
) -> MetricReport:
    """Aggregate the four metrics; queries with empty gold are excluded."""
    if len(rankings) != len(golds):
        raise ValueError("rankings and golds must align")
    per_query: dict[str, list[float]] = {name: [] for name in METRIC_NAMES}
    excluded = 0
    for retrieved, gold in zip(rankings, golds):
        if not gold:
            excluded += 1
            continue
        for name in METRIC_NAMES:
            per_query[name].append(_METRIC_FN[name](retrieved, gold, l))
    kept = len(per_query["recall"])
    mean, lower, upper = {}, {}, {}
    for name in METRIC_NAMES:
        vals = per_query[name]
        if kept >= 2:
            lo, mid, hi = bootstrap_ci(vals, resamples=resamples, level=level, seed=seed)
        elif kept == 1:
            lo = mid = hi = vals[0]
        else:
            raise EmptyGold("no query has gold passages")
        mean[name], lower[name], upper[name] = mid, lo, hi
    return MetricReport(
        l=l,
        query_count=kept,
        excluded_queries=excluded,
        per_query=per_query,
        mean=mean,
        ci_lower=lower,
        ci_upper=upper,
    )
