"""Deterministic scripted providers for tests and offline runs.

The mock chat provider recognizes which task a rendered prompt belongs to,
pulls the task fields back out, and produces a stable, content-derived
response. Everything is a pure function of the prompt text.
"""

from __future__ import annotations

import hashlib
import re
from typing import Callable

from ..errors import ParseError
from .provider import ChatProvider, NLIProvider

_KIND_OPENERS = [
    ("topic_labeling", "You are given a set of keywords"),
    ("question_generation", "You will be given a PASSAGE and an excerpt"),
    ("query_generation", "You will receive a PASSAGE and a QUESTION"),
    ("relevant_passages", "Determine whether the passage contains information"),
    ("answer_generation", "You will be given a QUESTION, a PASSAGE,"),
    ("discrepancy_detection", "You will be given a QUESTION along with two responses"),
    ("fever_conversion", "You will receive a CLAIM"),
    ("dplace_conversion", "You will receive a DEFINITION"),
]

_FIELD_PATTERNS: dict[str, re.Pattern] = {
    "question_generation": re.compile(
        r"PASSAGE:\s*(?P<passage>.*?)\nFULL_DOCUMENT:\s*(?P<full_document>.*?)\nQUESTIONS:",
        re.DOTALL,
    ),
    "query_generation": re.compile(
        r"PASSAGE:\s*(?P<passage>.*?)\nQUESTION:\s*(?P<question>.*?)\nSEARCH_QUERY:",
        re.DOTALL,
    ),
    "relevant_passages": re.compile(
        r"PASSAGE:\s*(?P<passage>.*?)\nQUESTION:\s*(?P<question>.*?)\nRELEVANT:",
        re.DOTALL,
    ),
    "answer_generation": re.compile(
        r"QUESTION:\s*(?P<question>.*?)\nPASSAGE:\s*(?P<passage>.*?)"
        r"\nFULL_DOCUMENT:\s*(?P<full_document>.*?)\nANSWER:",
        re.DOTALL,
    ),
    "discrepancy_detection": re.compile(
        r"QUESTION:\s*(?P<question>.*?)\nANSWER_1:\s*(?P<answer_1>.*?)"
        r"\nANSWER_2:\s*(?P<answer_2>.*?)\n\nBefore answering",
        re.DOTALL,
    ),
    "fever_conversion": re.compile(
        r"CLAIM:\s*(?P<claim>.*?)\nLABEL:\s*(?P<label>.*?)\nEVIDENCE:\s*(?P<evidence>.*)$",
        re.DOTALL,
    ),
    "dplace_conversion": re.compile(
        r"DEFINITION:\s*(?P<definition>.*?)\nEXAMPLE1:\s*(?P<example1>.*?)"
        r"\nEXAMPLE2:\s*(?P<example2>.*)$",
        re.DOTALL,
    ),
    "topic_labeling": re.compile(
        r"Keywords:\s*(?P<keywords>.*?)\nDocuments:\s*(?P<docs>.*?)\nLabel:",
        re.DOTALL,
    ),
}

_SUBJECTIVE_MARKERS = ("i'm ", "i am ", "my kids", "in my experience", "i think", "i feel")


def dissect_prompt(prompt: str) -> tuple[str, dict[str, str]]:
    """Recognize the task kind of a rendered prompt and recover its fields."""
    kind = None
    for name, opener in _KIND_OPENERS:
        if prompt.lstrip().startswith(opener):
            kind = name
            break
    if kind is None:
        raise ParseError(f"unrecognized prompt: {prompt[:80]!r}")
    section = prompt.split("#### YOUR TASK ####")[-1]
    match = _FIELD_PATTERNS[kind].search(section)
    if match is None:
        raise ParseError(f"could not extract fields for {kind} prompt")
    fields = {k: v.strip() for k, v in match.groupdict().items()}
    return kind, fields


def _stable_bucket(text: str, buckets: int) -> int:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return digest[0] % buckets


def _words(text: str, n: int) -> str:
    return " ".join(text.split()[:n]).rstrip(".,:;!?")


def _content_words(text: str) -> set[str]:
    return {w.lower().strip(".,:;!?()\"'") for w in text.split() if len(w) > 3}


class MockChatProvider(ChatProvider):
    """Content-derived canned completions for every prompt kind."""

    def __init__(
        self,
        overrides: dict[str, Callable[[dict[str, str]], str]] | None = None,
        provider_id: str = "mock:chat",
        model_name: str = "scripted-mock",
    ):
        self.overrides = overrides or {}
        self.provider_id = provider_id
        self.model_name = model_name
        self.calls: list[tuple[str, dict[str, str]]] = []

    def complete(self, user_prompt, system=None, decoding=None):
        kind, fields = dissect_prompt(user_prompt)
        self.calls.append((kind, fields))
        if kind in self.overrides:
            return self.overrides[kind](fields)
        return getattr(self, f"_do_{kind}")(fields)

    def _do_topic_labeling(self, fields):
        keywords = [k.strip() for k in fields["keywords"].split(",") if k.strip()]
        return keywords[0] if keywords else "Miscellaneous"

    def _do_question_generation(self, fields):
        passage = fields["passage"]
        lowered = passage.lower()
        if any(marker in lowered for marker in _SUBJECTIVE_MARKERS):
            return (
                "N/A, the passage provides subjective information about personal "
                "experiences, which is not suitable for generating Yes/No questions."
            )
        snippet = _words(passage, 10)
        return (
            f"Is it accurate that {snippet}?\n"
            f"Does available information confirm that {snippet}?"
        )

    def _do_query_generation(self, fields):
        question = fields["question"].rstrip("?")
        words = question.split()
        if words and words[0].lower() in {"is", "are", "does", "do", "can", "did", "was", "were"}:
            words = words[1:]
        base = " ".join(words)
        return f'"{base}; {_words(base, 6)} details"'

    def _do_relevant_passages(self, fields):
        shared = _content_words(fields["passage"]) & _content_words(fields["question"])
        return "Yes" if len(shared) >= 2 else "No"

    def _do_answer_generation(self, fields):
        question, passage = fields["question"], fields["passage"]
        shared = _content_words(passage) & _content_words(question)
        if len(shared) < 2:
            return "I cannot answer the question given the context."
        polarity = "Yes" if _stable_bucket(question + "|" + passage, 2) == 0 else "No"
        return f"{polarity}, {_words(passage, 12)}."

    def _do_discrepancy_detection(self, fields):
        a1 = fields["answer_1"].split(",")[0].strip().lower()
        a2 = fields["answer_2"].split(",")[0].strip().lower()
        same_polarity = a1.split()[:1] == a2.split()[:1]
        if same_polarity:
            label = "NO_DISCREPANCY"
            reason = "Both answers present aligned information."
        elif _stable_bucket(fields["question"], 3) == 0:
            label = "CULTURAL_DISCREPANCY"
            reason = "The answers reflect practices that vary across regions."
        else:
            label = "CONTRADICTION"
            reason = "The answers provide directly opposing factual information."
        return f"REASON: {reason}\nDISCREPANCY_TYPE: {label}"

    def _do_fever_conversion(self, fields):
        claim = fields["claim"].rstrip(".")
        evidence = _words(fields["evidence"], 15)
        question = f"Is it true that {claim}?"
        answer1 = f"Yes, {claim}."
        if fields["label"].strip().upper() == "REFUTES":
            answer2 = f"No, {evidence}."
        else:
            answer2 = f"Yes, {evidence}."
        return f"QUESTION: {question}\nANSWER1: {answer1}\nANSWER2: {answer2}"

    def _do_dplace_conversion(self, fields):
        definition = fields["definition"].rstrip(".")
        question = f"Is it typically the case that {definition.lower()}?"
        answer1 = f"No, {_words(fields['example1'], 15)}."
        answer2 = f"Yes, {_words(fields['example2'], 15)}."
        return f"QUESTION: {question}\nANSWER1: {answer1}\nANSWER2: {answer2}"


_NEGATION = re.compile(r"\b(not|no|never|cannot)\b|n't\b", re.IGNORECASE)


class MockNLIProvider(NLIProvider):
    """Labels by a negation-parity rule unless pinned to a fixed verdict."""

    provider_id = "mock:nli"

    def __init__(self, fixed: str | None = None):
        self.fixed = fixed

    def classify(self, premise, hypothesis):
        if self.fixed is not None:
            return self.fixed
        premise_neg = bool(_NEGATION.search(premise))
        hypothesis_neg = bool(_NEGATION.search(hypothesis))
        return "contradict" if premise_neg != hypothesis_neg else "entail"
