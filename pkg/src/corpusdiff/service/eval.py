"""Project-level evaluation helpers behind the eval-retrieval and sweep-k
commands: judge-based gold construction and mode benchmarking."""

from __future__ import annotations

from ..corpus.model import Passage
from ..errors import NothingToExport
from ..index.bench import BenchQuery, BenchRow, benchmark, write_csv
from ..index.persist import load_index
from ..metrics.gold import judge_gold
from ..pltm.coherence import sweep_k
from .project import Project
from .stages import _active_questions, _load_passages, _theta_table, _load_tuples


def _train_tuples(project: Project):
    cfg = project.config
    corpus_language = {
        cfg.anchor_corpus: cfg.anchor_language,
        cfg.comparison_corpus: cfg.comparison_language,
    }
    by_doc: dict[str, list[Passage]] = {}
    for role in ("anchor", "comparison"):
        for p in _load_passages(project, role):
            by_doc.setdefault(p.document_id, []).append(p)
    tuples = []
    for tup in _load_tuples(project):
        sides: dict[str, list[Passage]] = {}
        for member in tup["members"]:
            language = corpus_language[member["corpus_id"]]
            sides.setdefault(language, []).extend(by_doc.get(member["document_id"], []))
        if all(any(p.tokens for p in side) for side in sides.values()) and len(sides) >= 2:
            tuples.append(sides)
    return tuples


def sweep_project_k(
    project: Project, k_values: list[int], iterations: int = 300, top_n: int = 8
) -> list[dict]:
    """Coherence table over candidate topic counts; K selection stays with the user."""
    if project.states["preprocess"].status != "done":
        raise NothingToExport("run ingest and preprocess before sweeping K")
    cfg = project.config
    tuples = _train_tuples(project)
    reference = [list(p.tokens) for p in _load_passages(project, "anchor") if p.tokens]
    return sweep_k(
        tuples,
        k_values,
        reference,
        cfg.anchor_language,
        top_n=top_n,
        eta=cfg.eta,
        iterations=iterations,
        burn_in=min(cfg.burn_in, iterations // 2),
        seed=cfg.seed,
    )


def evaluate_retrieval(
    project: Project,
    modes: list[str],
    repetitions: int = 1,
    gold: dict[str, set] | None = None,
    output_csv: str | None = None,
    candidate_depth: int = 10,
) -> list[BenchRow]:
    """Benchmark modes on this project's subqueries.

    Without a supplied gold map, candidates are pooled from each mode's
    top-``candidate_depth`` results per question and judged by the configured
    chat provider; a passage is gold only if every judge accepts it.
    """
    if project.states["retrieve"].status != "done":
        raise NothingToExport("run the pipeline through retrieve before evaluating")
    cfg = project.config
    index = load_index(
        project.stage_dir("index") / "index_data", provider=project.embedding_provider()
    )
    theta_table = _theta_table(project, "anchor")
    questions = _active_questions(project)
    subqueries: dict[str, list[dict]] = {}
    for row in project.load_jsonl("queries", "subqueries.jsonl"):
        subqueries.setdefault(row["question_id"], []).append(row)
    passage_text = {
        p.id: p.text for p in _load_passages(project, "comparison")
    }

    if gold is None:
        judges = [project.chat_provider()]
        gold = {}
        for q in questions:
            theta = theta_table[q.passage_id]
            candidate_ids: set[str] = set()
            for mode in modes:
                for sq in subqueries.get(q.id, []):
                    results = index.search(
                        query_text=sq["text"],
                        theta_anchor=theta,
                        mode=mode,
                        weighted=cfg.weighted,
                        l=candidate_depth,
                        h=max(candidate_depth, cfg.h),
                        epsilon_mode=cfg.epsilon_mode,
                        epsilon=cfg.epsilon,
                    )
                    candidate_ids.update(sp.passage_id for sp in results)
            judgments = judge_gold(
                q.id,
                q.text,
                [(pid, passage_text[pid]) for pid in sorted(candidate_ids)],
                judges,
            )
            gold[q.id] = {j.passage_id for j in judgments if j.is_gold}

    queries = []
    for q in questions:
        q_gold = gold.get(q.id, set())
        for sq in subqueries.get(q.id, []):
            queries.append(
                BenchQuery(
                    id=f"{q.id}/{sq['order']}",
                    text=sq["text"],
                    theta=theta_table[q.passage_id],
                    gold=q_gold,
                )
            )
    queries = [bq for bq in queries if bq.gold]
    if not queries:
        raise NothingToExport("no query has gold passages; nothing to evaluate")
    rows = benchmark(
        index,
        queries,
        modes=modes,
        repetitions=repetitions,
        l=cfg.l,
        h=cfg.h,
        weighted=cfg.weighted,
        epsilon_mode=cfg.epsilon_mode,
        epsilon=cfg.epsilon,
        seed=cfg.seed,
    )
    if output_csv:
        write_csv(rows, output_csv)
    return rows
