"""Stage implementations wiring the pipeline end to end.

Each stage reads its predecessors' artifacts, writes its own into a temp
workspace that is swapped in atomically, and records a config hash so later
configuration changes mark only the affected suffix of the pipeline stale.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..corpus.io import load_corpus_jsonl
from ..corpus.model import Corpus, Passage
from ..corpus.preprocess import DEFAULT_STOPWORDS, LangConfig, preprocess_passage
from ..corpus.segment import segment_document
from ..corpus.tuples import ExplicitPairs, ViaTranslation, form_tuples
from ..errors import NothingToExport, StageFailure
from ..index.persist import load_index, save_index
from ..index.search import ScoredPassage, TopicIndex, merge_evidence
from ..llm.provider import map_concurrent
from ..llm.tasks import (
    Answer,
    NotSuitable,
    Question,
    classify_discrepancy,
    decompose_query,
    generate_answer,
    generate_questions,
    nli_filter,
)
from ..pltm.gibbs import dominant_topic, infer_theta, train
from ..pltm.labeling import label_topics, top_words
from ..pltm.model import PolyTopicModel, load_matrix, save_matrix
from .project import STAGES, Project


def _write_jsonl(path: Path, rows) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")


def _write_json(path: Path, obj) -> None:
    path.write_text(
        json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2), encoding="utf-8"
    )


# ---------------------------------------------------------------- registration

def add_corpus(project: Project, role: str, documents: list[dict]) -> dict:
    """Register documents for the anchor or comparison side."""
    if role not in ("anchor", "comparison"):
        raise ValueError("role must be anchor or comparison")
    corpus_id = getattr(project.config, f"{role}_corpus")
    language = getattr(project.config, f"{role}_language")
    path = project.corpora_dir / f"{corpus_id}.jsonl"
    skipped = []
    with path.open("w", encoding="utf-8") as fh:
        for doc in documents:
            text = doc.get("text", "")
            if not text or not text.strip():
                skipped.append(doc.get("id"))
                continue
            row = {
                "id": str(doc["id"]),
                "language": doc.get("language", language),
                "text": text,
            }
            if doc.get("source_uri"):
                row["source_uri"] = doc["source_uri"]
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return {"corpus_id": corpus_id, "documents": len(documents) - len(skipped), "skipped": skipped}


def add_alignment(
    project: Project,
    pairs: list | None = None,
    anchor_to_comparison: dict | None = None,
    comparison_to_anchor: dict | None = None,
) -> dict:
    if pairs is not None:
        _write_json(project.corpora_dir / "alignment.json", [[a, c] for a, c in pairs])
        return {"mode": "explicit", "pairs": len(pairs)}
    payload = {
        "anchor_to_comparison": anchor_to_comparison or {},
        "comparison_to_anchor": comparison_to_anchor or {},
    }
    _write_json(project.corpora_dir / "translations.json", payload)
    return {
        "mode": "via_translation",
        "pairs": len(payload["anchor_to_comparison"]) + len(payload["comparison_to_anchor"]),
    }


# ---------------------------------------------------------------- artifact loads

def _load_corpus(project: Project, role: str) -> Corpus:
    corpus_id = getattr(project.config, f"{role}_corpus")
    language = getattr(project.config, f"{role}_language")
    path = project.corpora_dir / f"{corpus_id}.jsonl"
    if not path.exists():
        raise StageFailure(f"no {role} corpus registered (expected {path.name})")
    corpus, _ = load_corpus_jsonl(path, corpus_id, language)
    return corpus


def _load_passages(project: Project, role: str) -> list[Passage]:
    rows = project.load_jsonl("preprocess", f"passages_{role}.jsonl")
    return [
        Passage(
            id=r["id"],
            document_id=r["document_id"],
            language=r["language"],
            text=r["text"],
            index_in_document=r["index_in_document"],
            tokens=tuple(r["tokens"]),
        )
        for r in rows
    ]


def _load_tuples(project: Project) -> list[dict]:
    path = project.stage_dir("ingest") / "tuples.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _synthetic_doc_ids(project: Project, corpus_id: str) -> set[str]:
    synthetic = set()
    for tup in _load_tuples(project):
        for member in tup["members"]:
            if member["corpus_id"] == corpus_id and member["synthetic"]:
                synthetic.add(member["document_id"])
    return synthetic


def _load_model(project: Project) -> PolyTopicModel:
    return PolyTopicModel.load(project.stage_dir("train") / "model")


def _theta_table(project: Project, role: str) -> dict[str, np.ndarray]:
    matrix, row_ids, _ = load_matrix(project.stage_dir("train") / f"theta_{role}")
    return {str(pid): matrix[i].astype(np.float64) for i, pid in enumerate(row_ids)}


# ---------------------------------------------------------------- stages

def _stage_ingest(project: Project, workdir: Path) -> dict:
    anchor = _load_corpus(project, "anchor")
    comparison = _load_corpus(project, "comparison")
    align_path = project.corpora_dir / "alignment.json"
    trans_path = project.corpora_dir / "translations.json"
    if align_path.exists():
        raw = json.loads(align_path.read_text(encoding="utf-8"))
        alignment = ExplicitPairs(pairs=tuple((str(a), str(c)) for a, c in raw))
    elif trans_path.exists():
        raw = json.loads(trans_path.read_text(encoding="utf-8"))
        alignment = ViaTranslation(
            anchor_to_comparison=raw.get("anchor_to_comparison", {}),
            comparison_to_anchor=raw.get("comparison_to_anchor", {}),
        )
    else:
        raise StageFailure("no alignment registered: add pairs or translations first")
    result = form_tuples(anchor, comparison, alignment)
    _write_json(
        workdir / "tuples.json",
        [
            {"members": [asdict(m) for m in tup.members]}
            for tup in result.tuples
        ],
    )
    report = {
        "tuples": len(result.tuples),
        "anchor_documents": len(anchor),
        "comparison_documents": len(comparison),
        "unaligned_anchor": result.unaligned_anchor,
        "unaligned_comparison": result.unaligned_comparison,
    }
    _write_json(workdir / "report.json", report)
    return report


def _lang_config(project: Project, language: str) -> LangConfig:
    extra = frozenset(project.config.extra_stopwords.get(language, []))
    base = DEFAULT_STOPWORDS.get(language, frozenset())
    return LangConfig.default(language, stopwords=base | extra)


def _stage_preprocess(project: Project, workdir: Path) -> dict:
    report = {}
    for role in ("anchor", "comparison"):
        corpus = _load_corpus(project, role)
        cfg = _lang_config(project, corpus.language)
        passages = []
        for doc_id in sorted(corpus.documents):
            doc = corpus.documents[doc_id]
            for passage in segment_document(
                doc, mode=project.config.segment_mode, n_sentences=project.config.n_sentences
            ):
                passages.append(preprocess_passage(passage, cfg))
        _write_jsonl(
            workdir / f"passages_{role}.jsonl",
            (
                {
                    "id": p.id,
                    "document_id": p.document_id,
                    "language": p.language,
                    "text": p.text,
                    "index_in_document": p.index_in_document,
                    "tokens": list(p.tokens),
                }
                for p in passages
            ),
        )
        report[role] = {
            "passages": len(passages),
            "tokens": sum(len(p.tokens) for p in passages),
        }
    _write_json(workdir / "report.json", report)
    return report


def _stage_train(project: Project, workdir: Path) -> dict:
    cfg = project.config
    tuples_meta = _load_tuples(project)
    by_doc: dict[str, list[Passage]] = {}
    corpus_language = {
        cfg.anchor_corpus: cfg.anchor_language,
        cfg.comparison_corpus: cfg.comparison_language,
    }
    for role in ("anchor", "comparison"):
        for p in _load_passages(project, role):
            by_doc.setdefault(p.document_id, []).append(p)

    train_tuples = []
    skipped = 0
    for tup in tuples_meta:
        sides: dict[str, list[Passage]] = {}
        for member in tup["members"]:
            language = corpus_language[member["corpus_id"]]
            sides.setdefault(language, []).extend(by_doc.get(member["document_id"], []))
        if all(any(p.tokens for p in side) for side in sides.values()) and len(sides) >= 2:
            train_tuples.append(sides)
        else:
            skipped += 1
    if not train_tuples:
        raise StageFailure("no trainable tuples: every tuple has an empty side")

    model = train(
        train_tuples,
        k=cfg.k,
        alpha=cfg.alpha,
        eta=cfg.eta,
        iterations=cfg.iterations,
        burn_in=cfg.burn_in,
        seed=cfg.seed,
    )
    model.save(workdir / "model")

    # Passages outside the training tuples still need topic distributions.
    inferred = 0
    for role in ("anchor", "comparison"):
        language = getattr(cfg, f"{role}_language")
        passages = _load_passages(project, role)
        rows, ids = [], []
        for p in sorted(passages, key=lambda p: p.id):
            if p.id in model.theta:
                rows.append(model.theta[p.id])
            else:
                rows.append(
                    infer_theta(model, list(p.tokens), language, seed=cfg.seed)
                )
                inferred += 1
            ids.append(p.id)
        matrix = np.stack(rows) if rows else np.zeros((0, cfg.k))
        save_matrix(workdir / f"theta_{role}", matrix, ids, list(range(cfg.k)))
    report = {
        "k": cfg.k,
        "languages": model.languages,
        "tuples_trained": len(train_tuples),
        "tuples_skipped": skipped,
        "theta_inferred": inferred,
        "kernel": model.kernel,
    }
    _write_json(workdir / "report.json", report)
    return report


def _stage_label(project: Project, workdir: Path) -> dict:
    cfg = project.config
    model = _load_model(project)
    texts = {p.id: p.text for p in _load_passages(project, "anchor")}
    chat = project.chat_provider()
    labels = label_topics(
        model,
        chat,
        texts,
        language=cfg.anchor_language,
        docs_per_topic=cfg.docs_per_topic,
        n_keywords=cfg.n_keywords,
    )
    _write_json(
        workdir / "topic_labels.json",
        [{"topic_id": lab.topic_id, "label": lab.label, "status": lab.status} for lab in labels],
    )
    words = {
        str(topic): {
            lang: top_words(model, lang, topic, n=cfg.n_keywords)
            for lang in model.languages
        }
        for topic in range(model.k)
    }
    _write_json(workdir / "top_words.json", words)
    return {"topics": len(labels)}


def _stage_index(project: Project, workdir: Path) -> dict:
    cfg = project.config
    synthetic = _synthetic_doc_ids(project, cfg.comparison_corpus)
    passages = [
        p for p in _load_passages(project, "comparison") if p.document_id not in synthetic
    ]
    passages.sort(key=lambda p: p.id)
    if not passages:
        raise StageFailure("comparison corpus has no indexable passages")
    theta_table = _theta_table(project, "comparison")
    theta = np.stack([theta_table[p.id] for p in passages])
    provider = project.embedding_provider()
    texts = [p.text for p in passages]
    chunks = [
        provider.embed(texts[i : i + 64]) for i in range(0, len(texts), 64)
    ]
    embeddings = np.vstack(chunks)
    index = TopicIndex(
        [p.id for p in passages],
        embeddings,
        theta,
        lam=cfg.lam,
        l_min=cfg.l_min,
        seed=cfg.seed,
        provider=provider,
    )
    save_index(index, workdir / "index_data")
    return {
        "passages": len(passages),
        "topics_with_partitions": len(index.partitions),
        "dimension": int(embeddings.shape[1]),
    }


def _stage_questions(project: Project, workdir: Path) -> dict:
    cfg = project.config
    topic_states = project.topic_states()
    active_topics = {t for t, s in topic_states.items() if s == "active"}
    synthetic = _synthetic_doc_ids(project, cfg.anchor_corpus)
    passages = [
        p for p in _load_passages(project, "anchor") if p.document_id not in synthetic
    ]
    passages.sort(key=lambda p: p.id)
    theta_table = _theta_table(project, "anchor")
    docs = _load_corpus(project, "anchor").documents
    chat = project.chat_provider()
    nli = project.nli_provider()

    eligible = [
        p for p in passages if dominant_topic(theta_table[p.id]) in active_topics
    ]

    def produce(p: Passage):
        excerpt = docs[p.document_id].raw_text[: cfg.document_excerpt_chars]
        result = generate_questions(p, excerpt, chat)
        if isinstance(result, NotSuitable):
            return p.id, result, []
        return p.id, None, [nli_filter(q, p, nli) for q in result]

    outcomes = map_concurrent(produce, eligible, cfg.max_in_flight)
    questions: list[Question] = []
    skipped: list[dict] = []
    for pid, notsuitable, qs in outcomes:
        if notsuitable is not None:
            skipped.append({"passage_id": pid, "reason": notsuitable.reason})
        questions.extend(qs)
    _write_jsonl(
        workdir / "questions.jsonl",
        (
            {"id": q.id, "passage_id": q.passage_id, "text": q.text, "status": q.status}
            for q in questions
        ),
    )
    _write_jsonl(workdir / "skipped.jsonl", skipped)
    report = {
        "eligible_passages": len(eligible),
        "skipped_passages": len(skipped),
        "questions": len(questions),
        "active": sum(1 for q in questions if q.status == "active"),
        "nli_rejected": sum(1 for q in questions if q.status == "nli_rejected"),
        "discarded_topics": sorted(t for t in topic_states if topic_states[t] == "discarded"),
    }
    if not active_topics:
        report["warning"] = "all topics discarded; no questions generated"
    _write_json(workdir / "report.json", report)
    return report


def _active_questions(project: Project) -> list[Question]:
    rows = project.load_jsonl("questions", "questions.jsonl")
    return [
        Question(id=r["id"], passage_id=r["passage_id"], text=r["text"], status=r["status"])
        for r in rows
        if r["status"] == "active"
    ]


def _stage_queries(project: Project, workdir: Path) -> dict:
    cfg = project.config
    questions = _active_questions(project)
    passages = {p.id: p for p in _load_passages(project, "anchor")}
    chat = project.chat_provider()

    def produce(q: Question):
        return decompose_query(passages[q.passage_id], q, chat)

    results = map_concurrent(produce, questions, cfg.max_in_flight)
    rows = []
    for subqueries in results:
        for sq in subqueries:
            rows.append({"question_id": sq.question_id, "order": sq.order, "text": sq.text})
    _write_jsonl(workdir / "subqueries.jsonl", rows)
    return {"questions": len(questions), "subqueries": len(rows)}


def _stage_retrieve(project: Project, workdir: Path) -> dict:
    cfg = project.config
    index = load_index(
        project.stage_dir("index") / "index_data", provider=project.embedding_provider()
    )
    theta_table = _theta_table(project, "anchor")
    questions = _active_questions(project)
    by_question: dict[str, list[dict]] = {}
    for row in project.load_jsonl("queries", "subqueries.jsonl"):
        by_question.setdefault(row["question_id"], []).append(row)
    rows = []
    for q in questions:
        theta = theta_table[q.passage_id]
        subqueries = sorted(by_question.get(q.id, []), key=lambda r: r["order"])
        per_subquery = [
            index.search(
                query_text=sq["text"],
                theta_anchor=theta,
                mode=cfg.search_mode,
                weighted=cfg.weighted,
                l=cfg.l,
                h=cfg.h,
                epsilon_mode=cfg.epsilon_mode,
                epsilon=cfg.epsilon,
            )
            for sq in subqueries
        ]
        evidence = merge_evidence(q.id, per_subquery, cfg.l)
        rows.append(
            {
                "question_id": q.id,
                "l_requested": evidence.l_requested,
                "passages": [
                    {
                        "passage_id": sp.passage_id,
                        "score": sp.score,
                        "similarity": sp.similarity,
                        "source_topic": sp.source_topic,
                        "weight": sp.weight,
                    }
                    for sp in evidence.passages
                ],
            }
        )
    _write_jsonl(workdir / "evidence.jsonl", rows)
    return {
        "questions": len(rows),
        "evidence_passages": sum(len(r["passages"]) for r in rows),
    }


def _stage_answer(project: Project, workdir: Path) -> dict:
    cfg = project.config
    questions = _active_questions(project)
    anchor_passages = {p.id: p for p in _load_passages(project, "anchor")}
    comparison_passages = {p.id: p for p in _load_passages(project, "comparison")}
    anchor_docs = _load_corpus(project, "anchor").documents
    comparison_docs = _load_corpus(project, "comparison").documents
    evidence = {
        r["question_id"]: r["passages"]
        for r in project.load_jsonl("retrieve", "evidence.jsonl")
    }
    chat = project.chat_provider()

    def produce(q: Question) -> list[Answer]:
        out = []
        anchor_p = anchor_passages[q.passage_id]
        excerpt = anchor_docs[anchor_p.document_id].raw_text[: cfg.document_excerpt_chars]
        out.append(generate_answer(q, anchor_p, excerpt, chat, side="anchor"))
        for entry in evidence.get(q.id, []):
            cp = comparison_passages[entry["passage_id"]]
            cp_excerpt = comparison_docs[cp.document_id].raw_text[: cfg.document_excerpt_chars]
            out.append(generate_answer(q, cp, cp_excerpt, chat, side="comparison"))
        return out

    results = map_concurrent(produce, questions, cfg.max_in_flight)
    rows = []
    for answers in results:
        for a in answers:
            rows.append(
                {
                    "id": a.id,
                    "question_id": a.question_id,
                    "passage_id": a.passage_id,
                    "side": a.side,
                    "text": a.text,
                    "abstained": a.abstained,
                }
            )
    _write_jsonl(workdir / "answers.jsonl", rows)
    return {
        "answers": len(rows),
        "abstained": sum(1 for r in rows if r["abstained"]),
    }


def _stage_detect(project: Project, workdir: Path) -> dict:
    cfg = project.config
    questions = {q.id: q for q in _active_questions(project)}
    answers = project.load_jsonl("answer", "answers.jsonl")
    anchor_answer: dict[str, Answer] = {}
    comparison_answers: dict[str, list[Answer]] = {}
    for row in answers:
        a = Answer(**row)
        if a.side == "anchor":
            anchor_answer[a.question_id] = a
        else:
            comparison_answers.setdefault(a.question_id, []).append(a)
    chat = project.chat_provider()

    skipped_anchor_abstained = []
    tasks = []
    for qid in sorted(questions):
        anchor = anchor_answer.get(qid)
        if anchor is None:
            continue
        if anchor.abstained:
            skipped_anchor_abstained.append(qid)
            continue
        for comp in sorted(comparison_answers.get(qid, []), key=lambda a: a.id):
            tasks.append((questions[qid], anchor, comp))

    def produce(task):
        question, anchor, comp = task
        return classify_discrepancy(question, anchor, comp, chat)

    records = map_concurrent(produce, tasks, cfg.max_in_flight)
    _write_jsonl(
        workdir / "records.jsonl",
        (
            {
                "id": r.id,
                "question_id": r.question_id,
                "anchor_answer_id": r.anchor_answer_id,
                "comparison_answer_id": r.comparison_answer_id,
                "label": r.label,
                "reason": r.reason,
            }
            for r in records
        ),
    )
    counts: dict[str, int] = {}
    for r in records:
        counts[r.label] = counts.get(r.label, 0) + 1
    report = {
        "records": len(records),
        "by_label": counts,
        "skipped_anchor_abstained": skipped_anchor_abstained,
    }
    _write_json(workdir / "report.json", report)
    return report


def export_records(project: Project, include_rejected: bool = False) -> list[dict]:
    """Joined view of detect records with answers, passages, and review state."""
    if project.states["detect"].status != "done":
        raise NothingToExport("run the detect stage before exporting")
    records = project.load_records()
    if not records:
        raise NothingToExport("detect stage produced no records")
    questions = {
        r["id"]: r for r in project.load_jsonl("questions", "questions.jsonl")
    }
    answers = {r["id"]: r for r in project.load_jsonl("answer", "answers.jsonl")}
    passages = {
        p.id: p
        for role in ("anchor", "comparison")
        for p in _load_passages(project, role)
    }
    reviews = project.review_states()
    out = []
    for record_id in sorted(records):
        record = records[record_id]
        review = reviews.get(record_id, {"state": "pending", "note": "", "label": None})
        if review["state"] == "rejected" and not include_rejected:
            continue
        anchor = answers[record["anchor_answer_id"]]
        comp = answers[record["comparison_answer_id"]]
        question = questions[record["question_id"]]
        effective = review["label"] if review["state"] == "relabeled" else record["label"]
        out.append(
            {
                "record_id": record_id,
                "question_id": record["question_id"],
                "question": question["text"],
                "anchor_passage_id": anchor["passage_id"],
                "anchor_passage": passages[anchor["passage_id"]].text,
                "anchor_answer": anchor["text"],
                "comparison_passage_id": comp["passage_id"],
                "comparison_passage": passages[comp["passage_id"]].text,
                "comparison_answer": comp["text"],
                "predicted_label": record["label"],
                "label": effective,
                "reason": record["reason"],
                "review_state": review["state"],
                "review_note": review["note"],
            }
        )
    return out


def _stage_export(project: Project, workdir: Path) -> dict:
    rows = export_records(project, include_rejected=False)
    _write_jsonl(workdir / "export.jsonl", rows)
    return {"exported": len(rows)}


_STAGE_FN = {
    "ingest": _stage_ingest,
    "preprocess": _stage_preprocess,
    "train": _stage_train,
    "label": _stage_label,
    "index": _stage_index,
    "questions": _stage_questions,
    "queries": _stage_queries,
    "retrieve": _stage_retrieve,
    "answer": _stage_answer,
    "detect": _stage_detect,
    "export": _stage_export,
}


def run_stage(project: Project, stage: str, force: bool = False) -> dict:
    """Run one stage under the project lock; force reruns a done stage and
    resets everything after it."""
    with project.lock():
        project.check_runnable(stage, force=force)
        project.mark_running(stage)
        try:
            with project.stage_workspace(stage) as workdir:
                detail = _STAGE_FN[stage](project, workdir)
        except Exception as exc:
            project.mark_failed(stage, f"{type(exc).__name__}: {exc}")
            raise StageFailure(f"stage {stage!r} failed: {exc}") from exc
        project.mark_done(stage)
        reset = project.invalidate_downstream(stage)
        if reset:
            project._save_state()
    return {"stage": stage, "status": "done", "detail": detail, "reset": reset}


def run_all(project: Project, through: str = "export", force: bool = False) -> list[dict]:
    results = []
    for stage in STAGES[: STAGES.index(through) + 1]:
        if project.states[stage].status == "done" and not project.is_stale(stage) and not force:
            continue
        results.append(run_stage(project, stage, force=force))
    return results
