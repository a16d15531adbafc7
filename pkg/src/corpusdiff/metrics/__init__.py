from .classify import ClassReport, score_classifier
from .controlled import (
    SOURCE_TO_LABEL,
    ControlledItem,
    CulturalTrait,
    FeverClaim,
    build_controlled_dataset,
    dump_controlled_jsonl,
    load_controlled_jsonl,
    parse_triplet,
)
from .gold import GoldJudgment, judge_gold, parse_verdict
from .rank import (
    METRIC_NAMES,
    MetricReport,
    bootstrap_ci,
    evaluate_rankings,
    mmrr,
    ndcg,
    precision_at,
    recall_at,
)

__all__ = [
    "ClassReport",
    "ControlledItem",
    "CulturalTrait",
    "FeverClaim",
    "GoldJudgment",
    "METRIC_NAMES",
    "MetricReport",
    "SOURCE_TO_LABEL",
    "bootstrap_ci",
    "build_controlled_dataset",
    "dump_controlled_jsonl",
    "evaluate_rankings",
    "judge_gold",
    "load_controlled_jsonl",
    "mmrr",
    "ndcg",
    "parse_triplet",
    "parse_verdict",
    "precision_at",
    "recall_at",
    "score_classifier",
]
