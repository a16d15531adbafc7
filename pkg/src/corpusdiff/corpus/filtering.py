"""Topic-based relevance filtering of passages.

Word-topic weights are re-ranked to favor topic-specific terms (words spread
evenly across topics are penalized), then each passage gets a score built from
the maxima of the re-ranked weights over its retained words, normalized by the
retained count and by the excluded share of the vocabulary. Low-scoring
passages are candidates for removal.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateBeta, EmptyPassage, FullCoverage, InsufficientPassages
from .model import FilterScore

ROW_SUM_TOL = 1e-6


def smooth_rows(beta: np.ndarray, eta: float) -> np.ndarray:
    """Add the sampler's symmetric prior and renormalize rows.

    Guarantees strictly positive entries so the re-ranking log is defined.
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    smoothed = np.asarray(beta, dtype=np.float64) + eta
    return smoothed / smoothed.sum(axis=1, keepdims=True)


def ds_rerank(beta: np.ndarray) -> np.ndarray:
    """Re-rank word-topic probabilities against their per-word geometric mean.

    out[k, v] = beta[k, v] * ln(beta[k, v] / geomean_j beta[j, v]), natural log.
    """
    beta = np.asarray(beta, dtype=np.float64)
    if beta.ndim != 2:
        raise ValueError("beta must be a K x V matrix")
    row_sums = beta.sum(axis=1)
    if not np.allclose(row_sums, 1.0, atol=ROW_SUM_TOL):
        raise ValueError("each row of beta must sum to 1 within 1e-6")
    if np.any(beta <= 0):
        raise DegenerateBeta("beta has non-positive entries; smooth before re-ranking")
    log_beta = np.log(beta)
    geo_log = log_beta.mean(axis=0)
    return beta * (log_beta - geo_log)


def passage_score(
    tokens,
    beta_ds: np.ndarray,
    vocab,
    passage_id: str = "",
) -> FilterScore:
    """Score one passage from re-ranked word-topic weights.

    Tokens outside ``vocab`` are dropped first; duplicates count once.
    """
    beta_ds = np.asarray(beta_ds, dtype=np.float64)
    word_col = {w: i for i, w in enumerate(vocab)}
    if beta_ds.shape[1] != len(word_col):
        raise ValueError("beta_ds column count must match vocab size")
    retained = sorted({t for t in tokens if t in word_col})
    n_retained = len(retained)
    n_excluded = len(word_col) - n_retained
    if n_retained == 0:
        raise EmptyPassage(f"passage {passage_id!r} has no in-vocabulary tokens")
    if n_excluded == 0:
        raise FullCoverage(f"passage {passage_id!r} covers the entire vocabulary")
    cols = [word_col[w] for w in retained]
    total = float(beta_ds[:, cols].max(axis=0).sum())
    xi = (total / n_excluded) / n_retained
    return FilterScore(
        passage_id=passage_id,
        xi=xi,
        retained_word_count=n_retained,
        excluded_word_count=n_excluded,
    )


def filter_candidates(
    scores: list[FilterScore],
    bottom_percentile: float,
    n_good: int,
    seed: int,
    n_bad: int | None = None,
) -> dict[str, list[FilterScore]]:
    """Split scored passages into removal candidates and a clean sample.

    ``bad`` is the bottom ``bottom_percentile`` percent by score (count-based,
    so ties at the cutoff never inflate the set); ``good`` is a uniform random
    sample from the remainder, reproducible under ``seed``.
    """
    if not 0 < bottom_percentile < 100:
        raise ValueError("bottom_percentile must be in (0, 100)")
    n = len(scores)
    cutoff_count = math.ceil(n * bottom_percentile / 100.0)
    want_bad = cutoff_count if n_bad is None else min(n_bad, cutoff_count)
    if want_bad + n_good > n:
        raise InsufficientPassages(
            f"requested {want_bad} bad + {n_good} good from {n} passages"
        )
    ordered = sorted(scores, key=lambda s: (s.xi, s.passage_id))
    bad = ordered[:want_bad]
    rest = ordered[cutoff_count:]
    if n_good > len(rest):
        raise InsufficientPassages(
            f"requested {n_good} good passages, only {len(rest)} remain above the cutoff"
        )
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(rest), size=n_good, replace=False)
    good = [rest[i] for i in sorted(picks)]
    return {"bad": bad, "good": good}
