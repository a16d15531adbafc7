"""Benchmark retrieval modes on a query set with known gold passages.

Wall-clock is measured around the search call only, on a single thread, and
distance evaluations (member similarities plus centroid comparisons) are
counted per mode.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..metrics.rank import evaluate_rankings
from .search import MODES, TopicIndex


@dataclass
class BenchQuery:
    id: str
    text: str | None
    theta: object  # anchor passage topic weights
    gold: set
    vector: object = None  # precomputed embedding, optional


@dataclass
class BenchRow:
    mode: str
    weighted: bool
    l: int
    h: int
    queries: int
    repetitions: int
    mean_seconds: float
    min_seconds: float
    max_seconds: float
    distance_evals: int
    recall: float
    precision: float
    mmrr: float
    ndcg: float


def benchmark(
    index: TopicIndex,
    queries: Sequence[BenchQuery],
    modes: Sequence[str] = MODES,
    repetitions: int = 1,
    l: int = 5,
    h: int = 10,
    weighted: bool = False,
    epsilon_mode: str = "static",
    epsilon: float = 0.0,
    seed: int = 0,
) -> list[BenchRow]:
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if not queries:
        raise ValueError("query set is empty")
    rows = []
    for mode in modes:
        times: list[float] = []
        stats = {"distance_evals": 0}
        rankings: list[list[str]] = []
        golds: list[set] = []
        for rep in range(repetitions):
            for query in queries:
                t0 = time.perf_counter()
                results = index.search(
                    query_text=query.text,
                    theta_anchor=query.theta,
                    mode=mode,
                    weighted=weighted,
                    l=l,
                    h=h,
                    epsilon_mode=epsilon_mode,
                    epsilon=epsilon,
                    query_vector=query.vector,
                    stats=stats,
                )
                times.append(time.perf_counter() - t0)
                if rep == 0:
                    rankings.append([sp.passage_id for sp in results])
                    golds.append(query.gold)
        report = evaluate_rankings(rankings, golds, l=l, resamples=1000, seed=seed)
        rows.append(
            BenchRow(
                mode=mode,
                weighted=weighted,
                l=l,
                h=h,
                queries=len(queries),
                repetitions=repetitions,
                mean_seconds=sum(times) / len(times),
                min_seconds=min(times),
                max_seconds=max(times),
                distance_evals=stats["distance_evals"],
                recall=report.mean["recall"],
                precision=report.mean["precision"],
                mmrr=report.mean["mmrr"],
                ndcg=report.mean["ndcg"],
            )
        )
    return rows


def write_csv(rows: Sequence[BenchRow], path) -> None:
    path = Path(path)
    fields = list(BenchRow.__dataclass_fields__)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({f: getattr(row, f) for f in fields})
