"""Chat and NLI provider contracts, HTTP clients, disk cache, and audit log.

The HTTP chat client speaks a chat-completions-style protocol so it works
against common local and hosted servers. Responses are cached on disk keyed by
a hash of the full request, making desk-scale reruns cheap and reproducible.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

import httpx

from ..errors import ProviderError

NLI_LABELS = ("entail", "neutral", "contradict")


@dataclass(frozen=True)
class DecodingParams:
    temperature: float = 0.0
    top_p: float = 0.1
    frequency_penalty: float = 0.0
    seed: int = 1234

    def as_dict(self) -> dict:
        return {
            "temperature": self.temperature,
            "top_p": self.top_p,
            "frequency_penalty": self.frequency_penalty,
            "seed": self.seed,
        }


class ChatProvider(ABC):
    provider_id: str = "chat"
    model_name: str = "unknown"

    @abstractmethod
    def complete(
        self,
        user_prompt: str,
        system: str | None = None,
        decoding: DecodingParams | None = None,
    ) -> str:
        ...


class NLIProvider(ABC):
    provider_id: str = "nli"

    @abstractmethod
    def classify(self, premise: str, hypothesis: str) -> str:
        """Return one of 'entail', 'neutral', 'contradict'."""
        ...


class HTTPChatProvider(ChatProvider):
    """Chat-completions endpoint: POST {model, messages, temperature, top_p, seed}."""

    def __init__(
        self,
        url: str,
        model: str,
        provider_id: str | None = None,
        api_key: str | None = None,
        timeout: float = 120.0,
    ):
        self.url = url
        self.model_name = model
        self.provider_id = provider_id or f"http:{model}"
        self._headers = {"Content-Type": "application/json"}
        if api_key:
            self._headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(timeout=timeout)

    def complete(self, user_prompt, system=None, decoding=None):
        decoding = decoding or DecodingParams()
        messages = []
        if system:
            messages.append({"role": "system", "content": system})
        messages.append({"role": "user", "content": user_prompt})
        payload = {"model": self.model_name, "messages": messages, **decoding.as_dict()}
        try:
            resp = self._client.post(self.url, json=payload, headers=self._headers)
            resp.raise_for_status()
            body = resp.json()
            return body["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"chat call to {self.url} failed: {exc}") from exc


class HTTPNLIProvider(NLIProvider):
    """Classification endpoint: POST {premise, hypothesis} -> {label}."""

    def __init__(self, url: str, provider_id: str = "http:nli", timeout: float = 60.0):
        self.url = url
        self.provider_id = provider_id
        self._client = httpx.Client(timeout=timeout)

    def classify(self, premise, hypothesis):
        try:
            resp = self._client.post(
                self.url, json={"premise": premise, "hypothesis": hypothesis}
            )
            resp.raise_for_status()
            label = resp.json()["label"]
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise ProviderError(f"nli call to {self.url} failed: {exc}") from exc
        if label not in NLI_LABELS:
            raise ProviderError(f"nli endpoint returned unknown label {label!r}")
        return label


def idempotency_key(
    provider_id: str,
    model: str,
    user_prompt: str,
    system: str | None,
    decoding: DecodingParams,
) -> str:
    material = json.dumps(
        [provider_id, model, system or "", user_prompt, decoding.as_dict()],
        ensure_ascii=False,
        sort_keys=True,
    )
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


class CachedChatProvider(ChatProvider):
    """Disk-backed response cache with append-only JSONL storage.

    Entries are keyed by a hash of the full request; the cache file is the
    only shared state and is appended under a lock. An optional audit log
    records every completion, cached or not.
    """

    def __init__(self, inner: ChatProvider, cache_path, audit_path=None):
        self.inner = inner
        self.provider_id = inner.provider_id
        self.model_name = inner.model_name
        self._cache_path = Path(cache_path)
        self._audit_path = Path(audit_path) if audit_path else None
        self._lock = threading.Lock()
        self._cache: dict[str, str] = {}
        if self._cache_path.exists():
            with self._cache_path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        entry = json.loads(line)
                        self._cache[entry["key"]] = entry["response"]

    def complete(self, user_prompt, system=None, decoding=None):
        decoding = decoding or DecodingParams()
        key = idempotency_key(
            self.provider_id, self.model_name, user_prompt, system, decoding
        )
        with self._lock:
            cached = self._cache.get(key)
        if cached is None:
            response = self.inner.complete(user_prompt, system=system, decoding=decoding)
            with self._lock:
                self._cache[key] = response
                self._cache_path.parent.mkdir(parents=True, exist_ok=True)
                with self._cache_path.open("a", encoding="utf-8") as fh:
                    fh.write(
                        json.dumps({"key": key, "response": response}, ensure_ascii=False)
                        + "\n"
                    )
        else:
            response = cached
        self._audit(key, user_prompt, system, response, cached is not None)
        return response

    def _audit(self, key, prompt, system, response, was_cached):
        if self._audit_path is None:
            return
        record = {
            "ts": time.time(),
            "provider": self.provider_id,
            "model": self.model_name,
            "key": key,
            "system": system,
            "prompt": prompt,
            "response": response,
            "cached": was_cached,
        }
        with self._lock:
            self._audit_path.parent.mkdir(parents=True, exist_ok=True)
            with self._audit_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")


T = TypeVar("T")
R = TypeVar("R")


def map_concurrent(
    fn: Callable[[T], R], items: Sequence[T], max_in_flight: int = 4
) -> list[R]:
    """Apply ``fn`` over independent items concurrently, preserving order."""
    if max_in_flight <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        return list(pool.map(fn, items))
