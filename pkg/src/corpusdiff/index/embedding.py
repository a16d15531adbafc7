"""Embedding provider contract, HTTP client, and the deterministic fallback."""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from typing import Sequence

import httpx
import numpy as np

from ..errors import DimensionMismatch, ProviderError

UNIT_TOL = 1e-6


class EmbeddingProvider(ABC):
    dimension: int
    provider_id: str

    @abstractmethod
    def embed(self, texts: Sequence[str]) -> np.ndarray:
        """Return unit-norm float64 vectors, one row per text."""
        ...


class HashingEmbedder(EmbeddingProvider):
    """Seeded feature hashing onto the unit sphere.

    Stateless and fully deterministic: the same text always maps to the same
    vector, which is what tests and offline runs need. Not a semantic model.
    """

    def __init__(self, dimension: int = 16, seed: int = 0):
        if dimension < 2:
            raise ValueError("dimension must be >= 2")
        self.dimension = dimension
        self.seed = seed
        self.provider_id = f"hash:{dimension}:{seed}"

    def _token_feature(self, token: str) -> tuple[int, float]:
        digest = hashlib.blake2b(
            f"{self.seed}\x00{token}".encode("utf-8"), digest_size=8
        ).digest()
        value = int.from_bytes(digest, "little")
        index = value % self.dimension
        sign = 1.0 if (value >> 32) & 1 else -1.0
        return index, sign

    def embed(self, texts):
        out = np.zeros((len(texts), self.dimension), dtype=np.float64)
        for row, text in enumerate(texts):
            tokens = text.lower().split() or ["\x00empty"]
            for tok in tokens:
                index, sign = self._token_feature(tok)
                out[row, index] += sign
            norm = np.linalg.norm(out[row])
            if norm == 0.0:
                # All token contributions cancelled; fall back to a sentinel.
                index, sign = self._token_feature("\x00cancelled")
                out[row, index] = sign
                norm = 1.0
            out[row] /= norm
        return out


class HTTPEmbeddingProvider(EmbeddingProvider):
    """Endpoint accepting {texts: [...]} and returning {vectors: [[...]]}."""

    def __init__(
        self,
        url: str,
        dimension: int | None = None,
        provider_id: str | None = None,
        timeout: float = 120.0,
    ):
        self.url = url
        self.dimension = dimension or 0
        self.provider_id = provider_id or f"http:{url}"
        self._client = httpx.Client(timeout=timeout)

    def embed(self, texts):
        try:
            resp = self._client.post(self.url, json={"texts": list(texts)})
            resp.raise_for_status()
            vectors = np.asarray(resp.json()["vectors"], dtype=np.float64)
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise ProviderError(f"embedding call to {self.url} failed: {exc}") from exc
        if vectors.ndim != 2 or vectors.shape[0] != len(texts):
            raise ProviderError("embedding endpoint returned a malformed matrix")
        if not np.all(np.isfinite(vectors)):
            raise ProviderError("embedding endpoint returned non-finite values")
        if self.dimension == 0:
            self.dimension = int(vectors.shape[1])
        elif vectors.shape[1] != self.dimension:
            raise DimensionMismatch(
                f"expected dimension {self.dimension}, got {vectors.shape[1]}"
            )
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(norms == 0.0):
            raise ProviderError("embedding endpoint returned a zero vector")
        return vectors / norms[:, None]
