"""Language-specific passage preprocessing.

Steps run in a fixed order: language check, contraction/acronym expansion,
tokenization with lowercasing and removal of non-alphanumerics, stopword
removal, and finally lemmatization through a user-supplied hook (no lemmatizer
is bundled).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable

from ..errors import LanguageMismatch
from .model import Passage

# Letters and digits in any script; underscores excluded.
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)

# Deliberately small defaults; real runs supply their own lists.
DEFAULT_STOPWORDS: dict[str, frozenset[str]] = {
    "en": frozenset(
        "a an and are as at be by for from has have in is it of on or that the to was were with".split()
    ),
    "es": frozenset(
        "a al como con de del el en es la las lo los para por que se su un una y".split()
    ),
    "de": frozenset(
        "der die das den dem des ein eine und oder in im an auf mit von zu ist sind war für".split()
    ),
}

DEFAULT_CONTRACTIONS: dict[str, dict[str, str]] = {
    "en": {
        "don't": "do not",
        "doesn't": "does not",
        "didn't": "did not",
        "can't": "cannot",
        "won't": "will not",
        "isn't": "is not",
        "aren't": "are not",
        "wasn't": "was not",
        "it's": "it is",
        "that's": "that is",
        "i'm": "i am",
        "you're": "you are",
        "they're": "they are",
    },
}


@dataclass
class LangConfig:
    language: str
    stopwords: frozenset[str] = frozenset()
    contraction_map: dict[str, str] = field(default_factory=dict)
    lemmatizer_hook: Callable[[list[str]], list[str]] | None = None

    @classmethod
    def default(cls, language: str, **overrides) -> "LangConfig":
        base = dict(
            stopwords=DEFAULT_STOPWORDS.get(language, frozenset()),
            contraction_map=dict(DEFAULT_CONTRACTIONS.get(language, {})),
        )
        base.update(overrides)
        return cls(language=language, **base)


def _expand_contractions(text: str, mapping: dict[str, str]) -> str:
    if not mapping:
        return text
    # Longest keys first so e.g. "can't've" wins over "can't".
    keys = sorted(mapping, key=len, reverse=True)
    pattern = re.compile(
        r"(?<!\w)(" + "|".join(re.escape(k) for k in keys) + r")(?!\w)",
        re.IGNORECASE,
    )
    lowered = {k.lower(): v for k, v in mapping.items()}
    return pattern.sub(lambda m: lowered[m.group(0).lower()], text)


def tokenize(text: str) -> list[str]:
    return [t.lower() for t in _TOKEN.findall(text)]


def preprocess_text(text: str, cfg: LangConfig) -> list[str]:
    expanded = _expand_contractions(text, cfg.contraction_map)
    tokens = [t for t in tokenize(expanded) if t not in cfg.stopwords]
    if cfg.lemmatizer_hook is not None:
        tokens = list(cfg.lemmatizer_hook(tokens))
    return tokens


def preprocess_passage(p: Passage, cfg: LangConfig) -> Passage:
    if p.language != cfg.language:
        raise LanguageMismatch(
            f"passage {p.id!r} is {p.language!r}, config is {cfg.language!r}"
        )
    return p.with_tokens(preprocess_text(p.text, cfg))


def preprocess_passages(passages: Iterable[Passage], cfg: LangConfig) -> list[Passage]:
    return [preprocess_passage(p, cfg) for p in passages]
