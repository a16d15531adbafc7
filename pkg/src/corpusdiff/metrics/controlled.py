"""Controlled dataset builder: claim-verification pairs become entailment and
contradiction items, cross-cultural trait definitions become cultural
discrepancies, and traits with a missing-data code become unanswerable items.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

from ..errors import ParseError
from ..llm import prompts
from ..llm.provider import ChatProvider, DecodingParams

SOURCE_TO_LABEL = {
    "fever_supports": "NO_DISCREPANCY",
    "fever_refutes": "CONTRADICTION",
    "dplace": "CULTURAL_DISCREPANCY",
    "dplace_missing": "NOT_ENOUGH_INFO",
}

MISSING_DATA = "missing data"


@dataclass(frozen=True)
class FeverClaim:
    claim: str
    label: str  # SUPPORTS | REFUTES
    evidence: str


@dataclass(frozen=True)
class CulturalTrait:
    definition: str
    code1: str
    code2: str


@dataclass(frozen=True)
class ControlledItem:
    id: str
    source: str
    question: str
    answer1: str
    answer2: str
    gold_label: str


_TRIPLET = re.compile(
    r"QUESTION:\s*(?P<question>.+?)\s*\n\s*ANSWER1:\s*(?P<answer1>.+?)\s*\n\s*ANSWER2:\s*(?P<answer2>.+?)\s*$",
    re.DOTALL,
)


def parse_triplet(output: str) -> tuple[str, str, str]:
    match = _TRIPLET.search(output.strip())
    if match is None:
        raise ParseError(f"expected QUESTION/ANSWER1/ANSWER2 lines: {output[:120]!r}")
    return (
        match["question"].strip(),
        match["answer1"].strip(),
        match["answer2"].strip(),
    )


def _complete_triplet(chat: ChatProvider, prompt: str, decoding) -> tuple[str, str, str]:
    try:
        return parse_triplet(chat.complete(prompt, decoding=decoding))
    except ParseError:
        return parse_triplet(chat.complete(prompt, decoding=decoding))


def build_controlled_dataset(
    fever_claims: Sequence[FeverClaim],
    traits: Sequence[CulturalTrait],
    chat: ChatProvider,
    decoding: DecodingParams | None = None,
) -> list[ControlledItem]:
    """Gold labels follow the source, not the generated text."""
    items: list[ControlledItem] = []
    for i, claim in enumerate(fever_claims):
        label = claim.label.strip().upper()
        if label not in ("SUPPORTS", "REFUTES"):
            raise ValueError(f"fever label must be SUPPORTS or REFUTES, got {claim.label!r}")
        prompt = prompts.render(
            "fever_conversion", claim=claim.claim, label=label, evidence=claim.evidence
        )
        question, a1, a2 = _complete_triplet(chat, prompt, decoding)
        source = "fever_supports" if label == "SUPPORTS" else "fever_refutes"
        items.append(
            ControlledItem(
                id=f"fever-{i:04d}",
                source=source,
                question=question,
                answer1=a1,
                answer2=a2,
                gold_label=SOURCE_TO_LABEL[source],
            )
        )
    for i, trait in enumerate(traits):
        prompt = prompts.render(
            "dplace_conversion",
            definition=trait.definition,
            example1=trait.code1,
            example2=trait.code2,
        )
        question, a1, a2 = _complete_triplet(chat, prompt, decoding)
        missing = MISSING_DATA in (trait.code1.lower(), trait.code2.lower())
        source = "dplace_missing" if missing else "dplace"
        items.append(
            ControlledItem(
                id=f"dplace-{i:04d}",
                source=source,
                question=question,
                answer1=a1,
                answer2=a2,
                gold_label=SOURCE_TO_LABEL[source],
            )
        )
    return items


def dump_controlled_jsonl(items: Sequence[ControlledItem], path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(asdict(item), ensure_ascii=False) + "\n")


def load_controlled_jsonl(path) -> list[ControlledItem]:
    items = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                items.append(ControlledItem(**json.loads(line)))
    return items
