"""Directory-per-project persistence: stage states, single-writer lock,
append-only review event log, and provider construction from config."""

from __future__ import annotations

import json
import os
import shutil
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from ..errors import (
    AlreadyReviewed,
    PredecessorIncomplete,
    ProjectLocked,
    StageConflict,
    UnknownRecord,
    UnknownTopic,
)
from ..index.embedding import EmbeddingProvider, HashingEmbedder, HTTPEmbeddingProvider
from ..llm.mock import MockChatProvider, MockNLIProvider
from ..llm.provider import (
    CachedChatProvider,
    ChatProvider,
    HTTPChatProvider,
    HTTPNLIProvider,
    NLIProvider,
)
from ..llm.tasks import LABELS
from .config import ProjectConfig, stage_config_hash

STAGES = (
    "ingest",
    "preprocess",
    "train",
    "label",
    "index",
    "questions",
    "queries",
    "retrieve",
    "answer",
    "detect",
    "export",
)

TERMINAL_REVIEW = ("confirmed", "relabeled", "rejected")


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except (ProcessLookupError, PermissionError):
        return False
    except OSError:
        return False
    return True


@dataclass
class StageState:
    status: str = "pending"  # pending | running | done | failed
    config_hash: str = ""
    error: str = ""
    finished_at: float = 0.0

    def to_dict(self):
        return {
            "status": self.status,
            "config_hash": self.config_hash,
            "error": self.error,
            "finished_at": self.finished_at,
        }


class Project:
    """All mutations go through the holder of the project lock file."""

    def __init__(self, directory: Path, config: ProjectConfig, project_id: str):
        self.directory = Path(directory)
        self.config = config
        self.id = project_id
        self.states: dict[str, StageState] = {s: StageState() for s in STAGES}

    # -- layout ------------------------------------------------------------

    @property
    def corpora_dir(self) -> Path:
        return self.directory / "corpora"

    @property
    def artifacts_dir(self) -> Path:
        return self.directory / "artifacts"

    def stage_dir(self, stage: str) -> Path:
        return self.artifacts_dir / stage

    @property
    def events_path(self) -> Path:
        return self.directory / "events.jsonl"

    @property
    def cache_dir(self) -> Path:
        return self.directory / "cache"

    # -- creation / loading --------------------------------------------------

    @classmethod
    def create(cls, directory, config: ProjectConfig, project_id: str | None = None) -> "Project":
        directory = Path(directory)
        if (directory / "project.json").exists():
            raise FileExistsError(f"project already exists at {directory}")
        directory.mkdir(parents=True, exist_ok=True)
        project = cls(directory, config, project_id or directory.name)
        (directory / "project.json").write_text(
            json.dumps(
                {"id": project.id, "config": config.to_dict()},
                ensure_ascii=False,
                indent=2,
            ),
            encoding="utf-8",
        )
        project.corpora_dir.mkdir(exist_ok=True)
        project.artifacts_dir.mkdir(exist_ok=True)
        project._save_state()
        return project

    @classmethod
    def load(cls, directory) -> "Project":
        directory = Path(directory)
        meta = json.loads((directory / "project.json").read_text(encoding="utf-8"))
        config = ProjectConfig.from_dict(meta["config"]).with_env_overrides()
        project = cls(directory, config, meta["id"])
        state_path = directory / "state.json"
        if state_path.exists():
            raw = json.loads(state_path.read_text(encoding="utf-8"))
            for stage, entry in raw.items():
                if stage in project.states:
                    project.states[stage] = StageState(**entry)
        # A stage left "running" with no live lock means the process died.
        if not project._lock_holder_alive():
            for state in project.states.values():
                if state.status == "running":
                    state.status = "failed"
                    state.error = "interrupted: process terminated mid-stage"
            project._save_state()
        return project

    def _save_state(self) -> None:
        payload = {stage: state.to_dict() for stage, state in self.states.items()}
        tmp = self.directory / "state.json.tmp"
        tmp.write_text(json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8")
        os.replace(tmp, self.directory / "state.json")

    # -- locking -------------------------------------------------------------

    @property
    def lock_path(self) -> Path:
        return self.directory / "lock"

    def _lock_holder_alive(self) -> bool:
        try:
            pid = int(self.lock_path.read_text().strip())
        except (FileNotFoundError, ValueError):
            return False
        return _pid_alive(pid)

    @contextmanager
    def lock(self):
        """Single writer per project; concurrent reads need no lock."""
        if self.lock_path.exists() and not self._lock_holder_alive():
            self.lock_path.unlink(missing_ok=True)  # stale lock from a dead process
        try:
            fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ProjectLocked(f"project {self.id!r} is locked by another writer")
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            yield
        finally:
            self.lock_path.unlink(missing_ok=True)

    # -- stage bookkeeping -----------------------------------------------------

    def is_stale(self, stage: str) -> bool:
        state = self.states[stage]
        return state.status == "done" and state.config_hash != stage_config_hash(
            self.config, stage
        )

    def status(self) -> dict:
        return {
            "id": self.id,
            "stages": {
                stage: {
                    **self.states[stage].to_dict(),
                    "stale": self.is_stale(stage),
                }
                for stage in STAGES
            },
        }

    def check_runnable(self, stage: str, force: bool = False) -> None:
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}")
        for predecessor in STAGES[: STAGES.index(stage)]:
            state = self.states[predecessor]
            if state.status != "done" or self.is_stale(predecessor):
                raise PredecessorIncomplete(
                    f"stage {stage!r} needs {predecessor!r} done first"
                )
        if self.states[stage].status == "done" and not self.is_stale(stage) and not force:
            raise StageConflict(f"stage {stage!r} already done; pass force to rerun")

    def invalidate_downstream(self, stage: str) -> list[str]:
        reset = []
        for successor in STAGES[STAGES.index(stage) + 1 :]:
            if self.states[successor].status != "pending":
                self.states[successor] = StageState()
                shutil.rmtree(self.stage_dir(successor), ignore_errors=True)
                reset.append(successor)
        return reset

    def mark_running(self, stage: str) -> None:
        self.states[stage] = StageState(status="running")
        self._save_state()

    def mark_done(self, stage: str) -> None:
        self.states[stage] = StageState(
            status="done",
            config_hash=stage_config_hash(self.config, stage),
            finished_at=time.time(),
        )
        self._save_state()

    def mark_failed(self, stage: str, error: str) -> None:
        self.states[stage] = StageState(status="failed", error=error[:500])
        self._save_state()

    # -- atomic artifact writes -------------------------------------------------

    @contextmanager
    def stage_workspace(self, stage: str):
        """Artifacts appear all at once: build in a temp dir, swap on success."""
        tmp = self.artifacts_dir / f".tmp-{stage}"
        shutil.rmtree(tmp, ignore_errors=True)
        tmp.mkdir(parents=True)
        try:
            yield tmp
        except BaseException:
            shutil.rmtree(tmp, ignore_errors=True)
            raise
        final = self.stage_dir(stage)
        shutil.rmtree(final, ignore_errors=True)
        os.replace(tmp, final)

    # -- review events ------------------------------------------------------------

    def append_event(
        self,
        actor: str,
        target_kind: str,
        target_id: str,
        action: str,
        note: str = "",
        label: str | None = None,
    ) -> dict:
        event = {
            "seq": self._next_event_seq(),
            "ts": time.time(),
            "actor": actor,
            "target_kind": target_kind,
            "target_id": target_id,
            "action": action,
            "note": note,
        }
        if label is not None:
            event["label"] = label
        with self.events_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")
        return event

    def _next_event_seq(self) -> int:
        return sum(1 for _ in self.iter_events()) + 1

    def iter_events(self):
        if not self.events_path.exists():
            return
        with self.events_path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    yield json.loads(line)

    def topic_states(self) -> dict[int, str]:
        """Replay discard/restore events over the labeled topic set."""
        labels_path = self.stage_dir("label") / "topic_labels.json"
        if not labels_path.exists():
            return {}
        labels = json.loads(labels_path.read_text(encoding="utf-8"))
        states = {entry["topic_id"]: "active" for entry in labels}
        for event in self.iter_events():
            if event["target_kind"] != "topic":
                continue
            topic_id = int(event["target_id"])
            if topic_id not in states:
                continue
            if event["action"] == "discard":
                states[topic_id] = "discarded"
            elif event["action"] == "restore":
                states[topic_id] = "active"
        return states

    def review_states(self) -> dict[str, dict]:
        """Replay review events over detect-stage records: pending -> terminal."""
        out: dict[str, dict] = {}
        for event in self.iter_events():
            if event["target_kind"] != "discrepancy":
                continue
            action = event["action"]
            if action == "confirm":
                state = {"state": "confirmed", "note": event["note"], "label": None}
            elif action == "reject":
                state = {"state": "rejected", "note": event["note"], "label": None}
            elif action == "relabel":
                state = {
                    "state": "relabeled",
                    "note": event["note"],
                    "label": event.get("label"),
                }
            else:
                continue
            out[event["target_id"]] = state
        return out

    # -- review operations ----------------------------------------------------------

    def discard_topic(self, topic_id: int, actor: str = "user", note: str = "", force: bool = False) -> dict:
        return self._topic_action("discard", topic_id, actor, note, force)

    def restore_topic(self, topic_id: int, actor: str = "user", note: str = "", force: bool = False) -> dict:
        return self._topic_action("restore", topic_id, actor, note, force)

    def _topic_action(self, action: str, topic_id: int, actor: str, note: str, force: bool) -> dict:
        states = self.topic_states()
        if topic_id not in states:
            raise UnknownTopic(f"topic {topic_id} is not part of the labeled model")
        if self.states["questions"].status == "done":
            if not force:
                raise StageConflict(
                    "questions already generated; force discards and invalidates downstream"
                )
            self.invalidate_downstream("label")
            self._save_state()
        self.append_event(actor, "topic", str(topic_id), action, note)
        return {"topic_id": topic_id, "status": self.topic_states()[topic_id]}

    def review_discrepancy(
        self,
        record_id: str,
        action: str,
        label: str | None = None,
        note: str = "",
        actor: str = "user",
    ) -> dict:
        records = self.load_records()
        if record_id not in records:
            raise UnknownRecord(f"no discrepancy record {record_id!r}")
        current = self.review_states().get(record_id)
        if current is not None and current["state"] in TERMINAL_REVIEW:
            raise AlreadyReviewed(f"record {record_id!r} already {current['state']}")
        if action not in ("confirm", "relabel", "reject"):
            raise ValueError(f"unknown review action {action!r}")
        if action == "relabel" and label not in LABELS:
            raise ValueError(f"relabel needs a label from {LABELS}")
        self.append_event(actor, "discrepancy", record_id, action, note, label=label)
        state = self.review_states()[record_id]
        return {"record_id": record_id, **state}

    # -- artifact access -----------------------------------------------------------

    def load_jsonl(self, stage: str, name: str) -> list[dict]:
        path = self.stage_dir(stage) / name
        if not path.exists():
            return []
        out = []
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    out.append(json.loads(line))
        return out

    def load_records(self) -> dict[str, dict]:
        return {r["id"]: r for r in self.load_jsonl("detect", "records.jsonl")}

    # -- providers -------------------------------------------------------------------

    def chat_provider(self) -> ChatProvider:
        cfg = self.config.chat
        if cfg.kind == "mock":
            inner: ChatProvider = MockChatProvider()
        elif cfg.kind == "http":
            inner = HTTPChatProvider(cfg.url, cfg.model or "default", api_key=cfg.api_key or None)
        else:
            raise ValueError(f"unknown chat provider kind {cfg.kind!r}")
        self.cache_dir.mkdir(exist_ok=True)
        return CachedChatProvider(
            inner,
            cache_path=self.cache_dir / "chat_cache.jsonl",
            audit_path=self.cache_dir / "chat_audit.jsonl",
        )

    def nli_provider(self) -> NLIProvider:
        cfg = self.config.nli
        if cfg.kind == "mock":
            return MockNLIProvider()
        if cfg.kind == "http":
            return HTTPNLIProvider(cfg.url)
        raise ValueError(f"unknown nli provider kind {cfg.kind!r}")

    def embedding_provider(self) -> EmbeddingProvider:
        cfg = self.config.embedding
        if cfg.kind in ("mock", "hash"):
            return HashingEmbedder(dimension=cfg.dimension, seed=self.config.seed)
        if cfg.kind == "http":
            return HTTPEmbeddingProvider(cfg.url, dimension=cfg.dimension or None)
        raise ValueError(f"unknown embedding provider kind {cfg.kind!r}")
