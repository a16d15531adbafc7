"""Prompt template loading and rendering.

Templates live as plain text files with ``{placeholder}`` fields and ship with
the package; they are part of the method, not incidental strings.
"""

from __future__ import annotations

import string
from functools import lru_cache
from importlib import resources

TEMPLATE_NAMES = (
    "topic_labeling",
    "question_generation",
    "query_generation",
    "relevant_passages",
    "answer_generation",
    "discrepancy_detection",
    "fever_conversion",
    "dplace_conversion",
)

_formatter = string.Formatter()


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    if name not in TEMPLATE_NAMES:
        raise KeyError(f"unknown template {name!r}")
    ref = resources.files("corpusdiff.llm") / "templates" / f"{name}.txt"
    return ref.read_text(encoding="utf-8")


def placeholders(name: str) -> set[str]:
    return {
        field
        for _, field, _, _ in _formatter.parse(load_template(name))
        if field is not None
    }


def render(name: str, **fields: str) -> str:
    """Fill every placeholder; missing or extra fields are errors."""
    needed = placeholders(name)
    given = set(fields)
    if needed - given:
        raise ValueError(f"template {name!r} missing fields {sorted(needed - given)}")
    if given - needed:
        raise ValueError(f"template {name!r} got unknown fields {sorted(given - needed)}")
    return load_template(name).format(**fields)
