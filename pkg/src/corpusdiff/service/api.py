"""HTTP API over the project orchestration, serving CLI automation and the
review UI. All mutations run through the same code paths as the CLI."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..errors import (
    AlreadyReviewed,
    CorpusDiffError,
    NothingToExport,
    PredecessorIncomplete,
    ProjectLocked,
    StageConflict,
    StageFailure,
    UnknownRecord,
    UnknownTopic,
)
from .config import ProjectConfig
from .project import STAGES, Project
from .stages import add_alignment, add_corpus, export_records, run_stage

_STATUS_BY_ERROR = [
    (UnknownTopic, 404),
    (UnknownRecord, 404),
    (AlreadyReviewed, 409),
    (StageConflict, 409),
    (PredecessorIncomplete, 409),
    (NothingToExport, 409),
    (ProjectLocked, 423),
    (StageFailure, 500),
]


def _http_error(exc: Exception) -> HTTPException:
    for err_type, code in _STATUS_BY_ERROR:
        if isinstance(exc, err_type):
            return HTTPException(status_code=code, detail=str(exc))
    if isinstance(exc, (ValueError, CorpusDiffError)):
        return HTTPException(status_code=400, detail=str(exc))
    raise exc


class CreateProject(BaseModel):
    id: str
    config: dict = Field(default_factory=dict)


class CorpusUpload(BaseModel):
    role: str  # anchor | comparison | alignment
    documents: list[dict] | None = None
    pairs: list[list[str]] | None = None
    anchor_to_comparison: dict[str, str] | None = None
    comparison_to_anchor: dict[str, str] | None = None


class RunStageBody(BaseModel):
    force: bool = False


class TopicActionBody(BaseModel):
    note: str = ""
    force: bool = False
    actor: str = "user"


class ReviewBody(BaseModel):
    action: str
    label: str | None = None
    note: str = ""
    actor: str = "user"


def create_app(root, ui_dist: str | None = None) -> FastAPI:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="corpusdiff", version="0.1.0")

    def load_project(project_id: str) -> Project:
        directory = root / project_id
        if not (directory / "project.json").exists():
            raise HTTPException(status_code=404, detail=f"no project {project_id!r}")
        return Project.load(directory)

    @app.get("/projects")
    def list_projects():
        out = []
        for meta in sorted(root.glob("*/project.json")):
            out.append(json.loads(meta.read_text(encoding="utf-8"))["id"])
        return {"projects": out}

    @app.post("/projects", status_code=201)
    def create_project(body: CreateProject):
        try:
            config = ProjectConfig.from_dict(body.config).with_env_overrides()
            project = Project.create(root / body.id, config, body.id)
        except (FileExistsError, ValueError) as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"id": project.id, "config": project.config.to_dict()}

    @app.get("/projects/{project_id}")
    def project_info(project_id: str):
        project = load_project(project_id)
        return {"id": project.id, "config": project.config.to_dict(), **project.status()}

    @app.post("/projects/{project_id}/corpora")
    def upload_corpus(project_id: str, body: CorpusUpload):
        project = load_project(project_id)
        try:
            if body.role == "alignment":
                return add_alignment(
                    project,
                    pairs=body.pairs,
                    anchor_to_comparison=body.anchor_to_comparison,
                    comparison_to_anchor=body.comparison_to_anchor,
                )
            if body.documents is None:
                raise ValueError("documents required for corpus upload")
            return add_corpus(project, body.role, body.documents)
        except Exception as exc:  # noqa: BLE001 - mapped to HTTP codes
            raise _http_error(exc)

    @app.post("/projects/{project_id}/stages/{stage}/run")
    def run(project_id: str, stage: str, body: RunStageBody | None = None):
        project = load_project(project_id)
        try:
            return run_stage(project, stage, force=body.force if body else False)
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc)

    @app.get("/projects/{project_id}/status")
    def status(project_id: str):
        return load_project(project_id).status()

    @app.get("/projects/{project_id}/topics")
    def topics(project_id: str):
        project = load_project(project_id)
        return {"topics": topic_views(project)}

    @app.post("/projects/{project_id}/topics/{topic_id}/discard")
    def discard(project_id: str, topic_id: int, body: TopicActionBody | None = None):
        project = load_project(project_id)
        body = body or TopicActionBody()
        try:
            with project.lock():
                return project.discard_topic(
                    topic_id, actor=body.actor, note=body.note, force=body.force
                )
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc)

    @app.post("/projects/{project_id}/topics/{topic_id}/restore")
    def restore(project_id: str, topic_id: int, body: TopicActionBody | None = None):
        project = load_project(project_id)
        body = body or TopicActionBody()
        try:
            with project.lock():
                return project.restore_topic(
                    topic_id, actor=body.actor, note=body.note, force=body.force
                )
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc)

    @app.get("/projects/{project_id}/discrepancies")
    def discrepancies(project_id: str, state: str = Query(default="all")):
        project = load_project(project_id)
        return {"records": discrepancy_views(project, state)}

    @app.post("/projects/{project_id}/discrepancies/{record_id:path}/review")
    def review(project_id: str, record_id: str, body: ReviewBody):
        project = load_project(project_id)
        try:
            with project.lock():
                return project.review_discrepancy(
                    record_id,
                    action=body.action,
                    label=body.label,
                    note=body.note,
                    actor=body.actor,
                )
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc)

    @app.get("/projects/{project_id}/export")
    def export(project_id: str, include_rejected: bool = False):
        project = load_project(project_id)
        try:
            rows = export_records(project, include_rejected=include_rejected)
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc)
        body = "".join(
            json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n" for row in rows
        )
        return PlainTextResponse(body, media_type="application/x-ndjson")

    if ui_dist and Path(ui_dist).exists():
        app.mount("/", StaticFiles(directory=ui_dist, html=True), name="ui")

    return app


def topic_views(project: Project) -> list[dict]:
    """Topic cards: label, review status, per-language top words, sizes,
    and representative anchor passages."""
    states = project.topic_states()
    if not states:
        return []
    labels = {
        entry["topic_id"]: entry["label"]
        for entry in json.loads(
            (project.stage_dir("label") / "topic_labels.json").read_text(encoding="utf-8")
        )
    }
    words_path = project.stage_dir("label") / "top_words.json"
    top_words = json.loads(words_path.read_text(encoding="utf-8")) if words_path.exists() else {}

    from ..pltm.model import load_matrix  # local import to keep api lean

    sizes: dict[int, dict[str, int]] = {t: {} for t in states}
    samples: dict[int, list[str]] = {t: [] for t in states}
    for role in ("anchor", "comparison"):
        base = project.stage_dir("train") / f"theta_{role}"
        if not base.with_suffix(".json").exists():
            continue
        matrix, row_ids, _ = load_matrix(base)
        for topic in states:
            sizes[topic][role] = int(np.sum(matrix[:, topic] > 0))
        if role == "anchor":
            texts = {
                r["id"]: r["text"]
                for r in project.load_jsonl("preprocess", "passages_anchor.jsonl")
            }
            for topic in states:
                order = np.argsort(-matrix[:, topic], kind="stable")[:3]
                samples[topic] = [
                    texts[str(row_ids[i])] for i in order if str(row_ids[i]) in texts
                ]
    return [
        {
            "topic_id": topic,
            "label": labels.get(topic, ""),
            "status": states[topic],
            "top_words": top_words.get(str(topic), {}),
            "active_set_size": sizes[topic],
            "sample_passages": samples[topic],
        }
        for topic in sorted(states)
    ]


def discrepancy_views(project: Project, state: str = "all") -> list[dict]:
    """Records joined with question/answer texts and current review state."""
    records = project.load_records()
    if not records:
        return []
    questions = {r["id"]: r for r in project.load_jsonl("questions", "questions.jsonl")}
    answers = {r["id"]: r for r in project.load_jsonl("answer", "answers.jsonl")}
    passages = {
        r["id"]: r
        for name in ("passages_anchor.jsonl", "passages_comparison.jsonl")
        for r in project.load_jsonl("preprocess", name)
    }
    reviews = project.review_states()
    out = []
    for record_id in sorted(records):
        record = records[record_id]
        review = reviews.get(record_id, {"state": "pending", "note": "", "label": None})
        if state not in ("all", review["state"]):
            continue
        anchor = answers[record["anchor_answer_id"]]
        comp = answers[record["comparison_answer_id"]]
        out.append(
            {
                "record_id": record_id,
                "question": questions[record["question_id"]]["text"],
                "anchor_answer": anchor["text"],
                "comparison_answer": comp["text"],
                "anchor_passage": passages[anchor["passage_id"]]["text"],
                "comparison_passage": passages[comp["passage_id"]]["text"],
                "predicted_label": record["label"],
                "reason": record["reason"],
                "review_state": review["state"],
                "review_note": review["note"],
                "review_label": review["label"],
            }
        )
    return out
