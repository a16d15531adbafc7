"""Gold-passage construction by unanimous multi-judge relevance verdicts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import ParseError
from ..llm import prompts
from ..llm.provider import ChatProvider, DecodingParams


@dataclass(frozen=True)
class GoldJudgment:
    question_id: str
    passage_id: str
    verdicts: dict  # provider_id -> "yes" | "no"
    is_gold: bool


def parse_verdict(output: str) -> str:
    """Accept only Yes/No, uppercase-normalized."""
    token = output.strip().strip(".").upper()
    if token == "YES":
        return "yes"
    if token == "NO":
        return "no"
    raise ParseError(f"verdict must be Yes or No, got {output[:40]!r}")


def _judge_once(judge: ChatProvider, prompt: str, decoding) -> str:
    try:
        return parse_verdict(judge.complete(prompt, decoding=decoding))
    except ParseError:
        return parse_verdict(judge.complete(prompt, decoding=decoding))


def judge_gold(
    question_id: str,
    question_text: str,
    candidates: Sequence[tuple[str, str]],
    judges: Sequence[ChatProvider],
    decoding: DecodingParams | None = None,
) -> list[GoldJudgment]:
    """A candidate is gold only when every judge answers Yes."""
    if not judges:
        raise ValueError("at least one judge is required")
    out = []
    for passage_id, passage_text in candidates:
        prompt = prompts.render(
            "relevant_passages", passage=passage_text, question=question_text
        )
        verdicts = {j.provider_id: _judge_once(j, prompt, decoding) for j in judges}
        out.append(
            GoldJudgment(
                question_id=question_id,
                passage_id=passage_id,
                verdicts=verdicts,
                is_gold=all(v == "yes" for v in verdicts.values()),
            )
        )
    return out
