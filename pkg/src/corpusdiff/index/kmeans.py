"""Deterministic k-means with k-means++ seeding.

Written in-house instead of delegating to a library so that partition layouts
are bit-reproducible across runs regardless of thread count.
"""

from __future__ import annotations

import numpy as np


def _pairwise_sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # ||x - c||^2 = ||x||^2 + ||c||^2 - 2 x.c
    sq = (
        np.sum(points**2, axis=1)[:, None]
        + np.sum(centers**2, axis=1)[None, :]
        - 2.0 * points @ centers.T
    )
    np.maximum(sq, 0.0, out=sq)
    return sq


def _plus_plus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    closest = _pairwise_sq_dists(points, points[chosen[:1]])[:, 0]
    for i in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            chosen[i] = rng.integers(n)
        else:
            chosen[i] = rng.choice(n, p=closest / total)
        d_new = _pairwise_sq_dists(points, points[chosen[i : i + 1]])[:, 0]
        np.minimum(closest, d_new, out=closest)
    return points[chosen].copy()


def kmeans(
    points: np.ndarray,
    k: int,
    rng: np.random.Generator,
    iterations: int = 25,
) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm; returns (centroids k x d, labels n).

    Ties in assignment go to the lowest centroid index; an emptied cluster is
    reseeded with the point farthest from its current centroid.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got {k}")
    if k == n:
        return points.copy(), np.arange(n, dtype=np.int64)
    centroids = _plus_plus_init(points, k, rng)
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(iterations):
        dists = _pairwise_sq_dists(points, centroids)
        new_labels = np.argmin(dists, axis=1)
        for c in range(k):
            mask = new_labels == c
            if mask.any():
                centroids[c] = points[mask].mean(axis=0)
            else:
                own = dists[np.arange(n), new_labels]
                far = int(np.argmax(own))
                centroids[c] = points[far]
                new_labels[far] = c
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    return centroids, labels
