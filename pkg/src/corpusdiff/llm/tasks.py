"""Chat-model tasks: question generation, entailment filtering, query
decomposition, grounded answering with abstention, and discrepancy labeling.

Parsers are exposed separately from the provider calls so scripted outputs can
round-trip through them in tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from ..corpus.model import Passage
from ..errors import ParseError
from . import prompts
from .provider import ChatProvider, DecodingParams, NLIProvider

ABSTENTION_SENTINEL = "I cannot answer the question given the context."

LABELS = (
    "NO_DISCREPANCY",
    "CONTRADICTION",
    "CULTURAL_DISCREPANCY",
    "NOT_ENOUGH_INFO",
)

# Leading auxiliaries/modals accepted by the yes/no shape heuristic.
AUX_VERBS = frozenset(
    "is are was were am do does did can could will would should shall may might "
    "must has have had".split()
)


@dataclass(frozen=True)
class NotSuitable:
    """The passage holds no objective content to question."""

    reason: str


@dataclass(frozen=True)
class Question:
    id: str
    passage_id: str
    text: str
    status: str = "generated"  # generated | nli_rejected | active


@dataclass(frozen=True)
class SubQuery:
    question_id: str
    text: str
    order: int


@dataclass(frozen=True)
class Answer:
    id: str
    question_id: str
    passage_id: str
    side: str  # anchor | comparison
    text: str
    abstained: bool


@dataclass(frozen=True)
class DiscrepancyRecord:
    id: str
    question_id: str
    anchor_answer_id: str
    comparison_answer_id: str
    label: str
    reason: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label {self.label!r} outside the closed set")


def _retry_once(call, parse):
    """Deterministic decoding makes long retry loops pointless; try twice."""
    try:
        return parse(call())
    except ParseError:
        return parse(call())


def is_yes_no_shaped(text: str) -> bool:
    words = text.strip().split()
    return bool(words) and words[0].lower() in AUX_VERBS


def parse_questions(output: str) -> list[str] | NotSuitable:
    text = output.strip()
    if text.upper().startswith("N/A"):
        reason = text[3:].lstrip(" ,;:.")
        return NotSuitable(reason=reason)
    lines = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        line = re.sub(r"^(QUESTIONS?:\s*|\d+[.)]\s*|-\s*)", "", line)
        if not line:
            continue
        if is_yes_no_shaped(line):
            lines.append(line)
    if not lines:
        raise ParseError(f"no yes/no questions in output: {output[:120]!r}")
    return lines


def generate_questions(
    passage: Passage,
    document_excerpt: str,
    chat: ChatProvider,
    decoding: DecodingParams | None = None,
) -> list[Question] | NotSuitable:
    if not passage.text.strip():
        raise ValueError("passage text must be non-empty")
    prompt = prompts.render(
        "question_generation", passage=passage.text, full_document=document_excerpt
    )
    parsed = _retry_once(lambda: chat.complete(prompt, decoding=decoding), parse_questions)
    if isinstance(parsed, NotSuitable):
        return parsed
    return [
        Question(id=f"{passage.id}#q{i}", passage_id=passage.id, text=q)
        for i, q in enumerate(parsed, 1)
    ]


def affirmative_restatement(question_text: str) -> str:
    """Restate a yes/no question as a declarative hypothesis.

    Drops the leading auxiliary and the question mark; no parser is involved,
    so the result is rough but stable.
    """
    text = question_text.strip().rstrip("?").strip()
    words = text.split()
    if words and words[0].lower() in AUX_VERBS:
        words = words[1:]
    return " ".join(words) + "."


def nli_filter(question: Question, anchor_passage: Passage, nli: NLIProvider) -> Question:
    """Reject questions contradicted by the passage they came from.

    Neutral outcomes pass: only contradictions are discarded.
    """
    verdict = nli.classify(
        premise=anchor_passage.text,
        hypothesis=affirmative_restatement(question.text),
    )
    status = "nli_rejected" if verdict == "contradict" else "active"
    return replace(question, status=status)


def parse_subqueries(output: str) -> list[str]:
    text = output.strip()
    text = re.sub(r"^SEARCH_QUERY:\s*", "", text)
    text = text.strip().strip('"').strip()
    parts = [p.strip() for p in text.split(";")]
    return [p for p in parts if p]


def decompose_query(
    passage: Passage,
    question: Question,
    chat: ChatProvider,
    decoding: DecodingParams | None = None,
) -> list[SubQuery]:
    prompt = prompts.render(
        "query_generation", passage=passage.text, question=question.text
    )
    parts = parse_subqueries(chat.complete(prompt, decoding=decoding))
    if not parts:
        parts = [question.text]  # fall back to the question itself
    return [
        SubQuery(question_id=question.id, text=p, order=m)
        for m, p in enumerate(parts, 1)
    ]


def generate_answer(
    question: Question,
    evidence: Passage,
    document_excerpt: str,
    chat: ChatProvider,
    side: str,
    decoding: DecodingParams | None = None,
) -> Answer:
    if not evidence.text.strip():
        raise ValueError("evidence passage must be non-empty")
    if side not in ("anchor", "comparison"):
        raise ValueError(f"side must be anchor or comparison, got {side!r}")
    prompt = prompts.render(
        "answer_generation",
        question=question.text,
        passage=evidence.text,
        full_document=document_excerpt,
    )
    text = chat.complete(prompt, decoding=decoding).strip()
    return Answer(
        id=f"{question.id}|{evidence.id}|{side}",
        question_id=question.id,
        passage_id=evidence.id,
        side=side,
        text=text,
        abstained=text.startswith(ABSTENTION_SENTINEL),
    )


_REASON_LINE = re.compile(r"^\s*-?\s*REASON:\s*(.+)$", re.MULTILINE)
_TYPE_LINE = re.compile(r"^\s*-?\s*DISCREPANCY_TYPE:\s*(.+)$", re.MULTILINE)


def parse_discrepancy(output: str) -> tuple[str, str]:
    """Extract (label, reason); the last occurrence wins if examples echo."""
    reasons = _REASON_LINE.findall(output)
    types = _TYPE_LINE.findall(output)
    if not reasons or not types:
        raise ParseError(f"missing REASON/DISCREPANCY_TYPE lines: {output[:120]!r}")
    raw = types[-1].strip().strip("[]").strip().upper().replace(" ", "_")
    if raw not in LABELS:
        raise ParseError(f"unknown discrepancy label {types[-1].strip()!r}")
    return raw, reasons[-1].strip()


def classify_discrepancy(
    question: Question,
    anchor_answer: Answer,
    comparison_answer: Answer,
    chat: ChatProvider,
    decoding: DecodingParams | None = None,
) -> DiscrepancyRecord:
    if anchor_answer.abstained:
        raise ValueError("anchor answer abstained; nothing to classify")
    record_id = f"{question.id}|{comparison_answer.passage_id}"
    if comparison_answer.abstained:
        return DiscrepancyRecord(
            id=record_id,
            question_id=question.id,
            anchor_answer_id=anchor_answer.id,
            comparison_answer_id=comparison_answer.id,
            label="NOT_ENOUGH_INFO",
            reason="The comparison corpus does not contain enough information to answer.",
        )
    prompt = prompts.render(
        "discrepancy_detection",
        question=question.text,
        answer_1=anchor_answer.text,
        answer_2=comparison_answer.text,
    )
    label, reason = _retry_once(
        lambda: chat.complete(prompt, decoding=decoding), parse_discrepancy
    )
    return DiscrepancyRecord(
        id=record_id,
        question_id=question.id,
        anchor_answer_id=anchor_answer.id,
        comparison_answer_id=comparison_answer.id,
        label=label,
        reason=reason,
    )
