"""Command-line interface; every subcommand drives the same service code as
the HTTP API."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..errors import CorpusDiffError
from ..metrics.controlled import (
    CulturalTrait,
    FeverClaim,
    build_controlled_dataset,
    dump_controlled_jsonl,
)
from ..synthetic import make_corpus
from .config import ProjectConfig
from .project import STAGES, Project
from .stages import add_alignment, add_corpus, export_records, run_all, run_stage


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True))


def _load(root: str, project_id: str) -> Project:
    directory = Path(root) / project_id
    if not (directory / "project.json").exists():
        raise click.ClickException(f"no project {project_id!r} under {root}")
    return Project.load(directory)


@click.group()
@click.option(
    "--root",
    default="projects",
    envvar="CORPUSDIFF_HOME",
    show_default=True,
    help="Directory holding one subdirectory per project.",
)
@click.pass_context
def main(ctx, root):
    """Detect factual and cultural discrepancies across corpora in different languages."""
    ctx.obj = root


@main.group()
def project():
    """Create and inspect projects."""


@project.command("create")
@click.argument("project_id")
@click.option("--config", "config_file", type=click.Path(exists=True), default=None)
@click.pass_obj
def project_create(root, project_id, config_file):
    cfg = ProjectConfig.from_file(config_file) if config_file else ProjectConfig()
    cfg.with_env_overrides()
    try:
        proj = Project.create(Path(root) / project_id, cfg, project_id)
    except FileExistsError as exc:
        raise click.ClickException(str(exc))
    _echo_json({"id": proj.id, "directory": str(proj.directory)})


@project.command("list")
@click.pass_obj
def project_list(root):
    ids = sorted(p.parent.name for p in Path(root).glob("*/project.json"))
    _echo_json({"projects": ids})


@main.group()
def corpus():
    """Register corpora and alignments."""


@corpus.command("add")
@click.argument("project_id")
@click.option("--role", type=click.Choice(["anchor", "comparison"]), required=True)
@click.option("--file", "file_", type=click.Path(exists=True), required=True)
@click.pass_obj
def corpus_add(root, project_id, role, file_):
    proj = _load(root, project_id)
    documents = []
    with open(file_, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                documents.append(json.loads(line))
    _echo_json(add_corpus(proj, role, documents))


@main.group()
def alignment():
    """Register document alignment between the two corpora."""


@alignment.command("add")
@click.argument("project_id")
@click.option("--pairs-file", type=click.Path(exists=True), default=None)
@click.option("--translations-file", type=click.Path(exists=True), default=None)
@click.pass_obj
def alignment_add(root, project_id, pairs_file, translations_file):
    proj = _load(root, project_id)
    if pairs_file:
        pairs = json.loads(Path(pairs_file).read_text(encoding="utf-8"))
        _echo_json(add_alignment(proj, pairs=pairs))
    elif translations_file:
        raw = json.loads(Path(translations_file).read_text(encoding="utf-8"))
        _echo_json(
            add_alignment(
                proj,
                anchor_to_comparison=raw.get("anchor_to_comparison"),
                comparison_to_anchor=raw.get("comparison_to_anchor"),
            )
        )
    else:
        raise click.ClickException("pass --pairs-file or --translations-file")


@main.group()
def stage():
    """Run pipeline stages."""


@stage.command("run")
@click.argument("project_id")
@click.argument("stage_name", type=click.Choice(STAGES))
@click.option("--force", is_flag=True, help="Rerun a done stage; resets downstream stages.")
@click.pass_obj
def stage_run(root, project_id, stage_name, force):
    proj = _load(root, project_id)
    try:
        _echo_json(run_stage(proj, stage_name, force=force))
    except CorpusDiffError as exc:
        raise click.ClickException(str(exc))


@stage.command("run-all")
@click.argument("project_id")
@click.option("--through", type=click.Choice(STAGES), default="export", show_default=True)
@click.option("--force", is_flag=True)
@click.pass_obj
def stage_run_all(root, project_id, through, force):
    proj = _load(root, project_id)
    try:
        results = run_all(proj, through=through, force=force)
    except CorpusDiffError as exc:
        raise click.ClickException(str(exc))
    _echo_json({"ran": [r["stage"] for r in results]})


@main.command("status")
@click.argument("project_id")
@click.pass_obj
def status(root, project_id):
    _echo_json(_load(root, project_id).status())


@main.group()
def topics():
    """Inspect, discard, and restore topics."""


@topics.command("list")
@click.argument("project_id")
@click.pass_obj
def topics_list(root, project_id):
    from .api import topic_views

    _echo_json({"topics": topic_views(_load(root, project_id))})


def _topic_action(root, project_id, topic_id, action, note, force):
    proj = _load(root, project_id)
    try:
        with proj.lock():
            fn = proj.discard_topic if action == "discard" else proj.restore_topic
            _echo_json(fn(topic_id, note=note, force=force))
    except CorpusDiffError as exc:
        raise click.ClickException(str(exc))


@topics.command("discard")
@click.argument("project_id")
@click.argument("topic_id", type=int)
@click.option("--note", default="")
@click.option("--force", is_flag=True)
@click.pass_obj
def topics_discard(root, project_id, topic_id, note, force):
    _topic_action(root, project_id, topic_id, "discard", note, force)


@topics.command("restore")
@click.argument("project_id")
@click.argument("topic_id", type=int)
@click.option("--note", default="")
@click.option("--force", is_flag=True)
@click.pass_obj
def topics_restore(root, project_id, topic_id, note, force):
    _topic_action(root, project_id, topic_id, "restore", note, force)


@main.group()
def discrepancies():
    """List and review detected discrepancies."""


@discrepancies.command("list")
@click.argument("project_id")
@click.option("--state", default="pending", show_default=True)
@click.pass_obj
def discrepancies_list(root, project_id, state):
    from .api import discrepancy_views

    _echo_json({"records": discrepancy_views(_load(root, project_id), state)})


@discrepancies.command("review")
@click.argument("project_id")
@click.argument("record_id")
@click.argument("action", type=click.Choice(["confirm", "relabel", "reject"]))
@click.option("--label", default=None)
@click.option("--note", default="")
@click.pass_obj
def discrepancies_review(root, project_id, record_id, action, label, note):
    proj = _load(root, project_id)
    try:
        with proj.lock():
            _echo_json(proj.review_discrepancy(record_id, action, label=label, note=note))
    except CorpusDiffError as exc:
        raise click.ClickException(str(exc))


@main.command("export")
@click.argument("project_id")
@click.option("--include-rejected", is_flag=True)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.pass_obj
def export(root, project_id, include_rejected, output):
    proj = _load(root, project_id)
    try:
        rows = export_records(proj, include_rejected=include_rejected)
    except CorpusDiffError as exc:
        raise click.ClickException(str(exc))
    lines = "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in rows)
    if output:
        Path(output).write_text(lines, encoding="utf-8")
        click.echo(f"wrote {len(rows)} records to {output}")
    else:
        sys.stdout.write(lines)


@main.command("sweep-k")
@click.argument("project_id")
@click.option("--values", required=True, help="Comma-separated topic counts, e.g. 2,5,10")
@click.option("--iterations", type=int, default=300, show_default=True)
@click.option("--top-n", type=int, default=8, show_default=True)
@click.pass_obj
def sweep_k_cmd(root, project_id, values, iterations, top_n):
    """Train one model per K and print the coherence table for user selection."""
    from .eval import sweep_project_k

    proj = _load(root, project_id)
    k_values = [int(v) for v in values.split(",") if v.strip()]
    try:
        rows = sweep_project_k(proj, k_values, iterations=iterations, top_n=top_n)
    except CorpusDiffError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{'K':>4}  {'mean NPMI':>10}")
    for row in rows:
        click.echo(f"{row['k']:>4}  {row['mean_npmi']:>10.4f}")


@main.command("eval-retrieval")
@click.argument("project_id")
@click.option("--modes", default="tb-enn,tb-ann,enn,ann", show_default=True)
@click.option("--repetitions", type=int, default=1, show_default=True)
@click.option("--gold-file", type=click.Path(exists=True), default=None,
              help="JSON {question_id: [gold passage ids]}; judged by the chat provider when omitted.")
@click.option("-o", "--output", type=click.Path(), default="retrieval_eval.csv", show_default=True)
@click.pass_obj
def eval_retrieval(root, project_id, modes, repetitions, gold_file, output):
    """Benchmark retrieval modes against gold passages on this project."""
    from .eval import evaluate_retrieval

    proj = _load(root, project_id)
    gold = None
    if gold_file:
        raw = json.loads(Path(gold_file).read_text(encoding="utf-8"))
        gold = {k: set(v) for k, v in raw.items()}
    try:
        rows = evaluate_retrieval(
            proj,
            modes=[m.strip() for m in modes.split(",") if m.strip()],
            repetitions=repetitions,
            gold=gold,
            output_csv=output,
        )
    except CorpusDiffError as exc:
        raise click.ClickException(str(exc))
    for row in rows:
        click.echo(
            f"{row.mode:>7}  time={row.mean_seconds*1e3:8.3f}ms  evals={row.distance_evals:>9}"
            f"  recall={row.recall:.3f}  mmrr={row.mmrr:.3f}  ndcg={row.ndcg:.3f}"
        )
    click.echo(f"wrote {output}")


@main.command("build-controlled")
@click.option("--fever", "fever_file", type=click.Path(exists=True), default=None,
              help="JSONL {claim, label, evidence}")
@click.option("--dplace", "dplace_file", type=click.Path(exists=True), default=None,
              help="JSONL {definition, code1, code2}")
@click.option("-o", "--output", type=click.Path(), required=True)
@click.option("--provider-kind", type=click.Choice(["mock", "http"]), default="mock", show_default=True)
@click.option("--url", default="")
@click.option("--model", default="")
def build_controlled(fever_file, dplace_file, output, provider_kind, url, model):
    """Build the controlled discrepancy dataset from claim and trait files."""
    from ..llm.mock import MockChatProvider
    from ..llm.provider import HTTPChatProvider

    chat = (
        MockChatProvider()
        if provider_kind == "mock"
        else HTTPChatProvider(url, model or "default")
    )
    fever_claims = []
    if fever_file:
        with open(fever_file, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    row = json.loads(line)
                    fever_claims.append(
                        FeverClaim(claim=row["claim"], label=row["label"], evidence=row["evidence"])
                    )
    traits = []
    if dplace_file:
        with open(dplace_file, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    row = json.loads(line)
                    traits.append(
                        CulturalTrait(
                            definition=row["definition"],
                            code1=row["code1"],
                            code2=row["code2"],
                        )
                    )
    items = build_controlled_dataset(fever_claims, traits, chat)
    dump_controlled_jsonl(items, output)
    click.echo(f"wrote {len(items)} items to {output}")


@main.command("synth")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--topics", type=int, default=2, show_default=True)
@click.option("--docs", type=int, default=8, show_default=True)
@click.option("--seed", type=int, default=997, show_default=True)
def synth(out_dir, topics, docs, seed):
    """Write the bundled synthetic bilingual corpus to a directory."""
    corpus_data = make_corpus(n_topics=topics, docs_per_side=docs, seed=seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, doc_list in (
        ("anchor.jsonl", corpus_data.anchor_documents),
        ("comparison.jsonl", corpus_data.comparison_documents),
    ):
        with (out / name).open("w", encoding="utf-8") as fh:
            for doc in doc_list:
                fh.write(json.dumps(doc, ensure_ascii=False) + "\n")
    (out / "alignment.json").write_text(
        json.dumps([[a, c] for a, c in corpus_data.pairs]), encoding="utf-8"
    )
    click.echo(f"wrote synthetic corpus ({topics} topics, {docs} docs/side) to {out}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8400, show_default=True)
@click.option("--ui-dist", type=click.Path(), default="frontend/dist")
@click.pass_obj
def serve(root, host, port, ui_dist):
    """Start the HTTP API (and the review UI when built assets exist)."""
    import uvicorn

    from .api import create_app

    app = create_app(root, ui_dist=ui_dist if Path(ui_dist).exists() else None)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
