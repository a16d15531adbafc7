from .mock import MockChatProvider, MockNLIProvider, dissect_prompt
from .prompts import TEMPLATE_NAMES, load_template, placeholders, render
from .provider import (
    CachedChatProvider,
    ChatProvider,
    DecodingParams,
    HTTPChatProvider,
    HTTPNLIProvider,
    NLIProvider,
    idempotency_key,
    map_concurrent,
)
from .tasks import (
    ABSTENTION_SENTINEL,
    AUX_VERBS,
    LABELS,
    Answer,
    DiscrepancyRecord,
    NotSuitable,
    Question,
    SubQuery,
    affirmative_restatement,
    classify_discrepancy,
    decompose_query,
    generate_answer,
    generate_questions,
    is_yes_no_shaped,
    nli_filter,
    parse_discrepancy,
    parse_questions,
    parse_subqueries,
)

__all__ = [
    "ABSTENTION_SENTINEL",
    "AUX_VERBS",
    "LABELS",
    "Answer",
    "CachedChatProvider",
    "ChatProvider",
    "DecodingParams",
    "DiscrepancyRecord",
    "HTTPChatProvider",
    "HTTPNLIProvider",
    "MockChatProvider",
    "MockNLIProvider",
    "NLIProvider",
    "NotSuitable",
    "Question",
    "SubQuery",
    "TEMPLATE_NAMES",
    "affirmative_restatement",
    "classify_discrepancy",
    "decompose_query",
    "dissect_prompt",
    "generate_answer",
    "generate_questions",
    "idempotency_key",
    "is_yes_no_shaped",
    "load_template",
    "map_concurrent",
    "nli_filter",
    "parse_discrepancy",
    "parse_questions",
    "parse_subqueries",
    "placeholders",
    "render",
]
