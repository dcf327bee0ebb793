"""Operator command line: ingest, tags, gen, export-measures, report, serve.

Exit codes: 0 success, 1 input error, 2 internal error. ``--json`` switches
the summary on stdout to machine-readable JSON. Timestamps are accepted as
unix seconds or ISO-8601 (naive values are taken as UTC).
"""

from __future__ import annotations

import json as jsonlib
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from .corpus import Corpus, load_corpus, save_corpus
from .errors import EntityScopeError, InputError
from .ingest import import_tags
from .report import export_measures_csv, render_report
from .synth import GeneratorConfig, generate, write_corpus


def parse_time(value: str) -> int:
    try:
        return int(value)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(value)
    except ValueError as exc:
        raise InputError(f"cannot parse timestamp {value!r}: {exc}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _emit(summary: dict, as_json: bool) -> None:
    if as_json:
        click.echo(jsonlib.dumps(summary))
    else:
        for key, value in summary.items():
            click.echo(f"{key}: {value}")


@click.group()
def cli():
    """Entity-centered analytics for Bitcoin-style transaction ledgers."""


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="Transaction JSONL file.")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(),
              help="Output corpus directory.")
@click.option("--tags", "tags_path", type=click.Path(exists=True), default=None,
              help="Optional tag CSV imported during the build.")
@click.option("--json", "as_json", is_flag=True, default=False)
def ingest(input_path, corpus_dir, tags_path, as_json):
    """Parse transactions, build entities and slices, write a corpus."""
    tags = import_tags(tags_path) if tags_path else None
    corpus = Corpus.from_jsonl(input_path, tags)
    manifest = save_corpus(corpus, corpus_dir)
    _emit({
        "corpus_id": manifest.corpus_id,
        "transactions": manifest.n_transactions,
        "addresses": manifest.n_addresses,
        "entities": manifest.n_entities,
        "corpus": str(corpus_dir),
    }, as_json)


@cli.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--tags", "tags_path", required=True, type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True, default=False)
def tags(corpus_dir, tags_path, as_json):
    """Import a known-address tag CSV into an existing corpus."""
    table = import_tags(tags_path)
    corpus = load_corpus(corpus_dir).with_tags(table)
    save_corpus(corpus, corpus_dir)
    _emit({
        "tags": len(table),
        "duplicate_warnings": table.duplicate_warnings,
        "tagged_entities": len(corpus.index.tags),
    }, as_json)


@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True),
              help="Generator config JSON.")
@click.option("--output", "output_path", required=True, type=click.Path(),
              help="Output transaction JSONL; sidecar and tag CSV are derived.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--json", "as_json", is_flag=True, default=False)
def gen(spec_path, output_path, seed, as_json):
    """Generate a deterministic synthetic corpus with a ground-truth sidecar."""
    try:
        obj = jsonlib.loads(Path(spec_path).read_text())
    except jsonlib.JSONDecodeError as exc:
        raise InputError(f"bad generator spec: {exc.msg}") from exc
    config = GeneratorConfig.from_json(obj)
    if seed is not None:
        config.seed = seed
    corpus = generate(config)
    output_path = Path(output_path)
    truth_path = output_path.with_suffix(output_path.suffix + ".truth.jsonl")
    tags_path = output_path.with_suffix(output_path.suffix + ".tags.csv") \
        if corpus.tags else None
    write_corpus(corpus, output_path, truth_path, tags_path)
    _emit({
        "transactions": corpus.n_transactions,
        "entities": len(corpus.entities),
        "output": str(output_path),
        "truth": str(truth_path),
        **({"tags": str(tags_path)} if tags_path else {}),
    }, as_json)


@cli.command("export-measures")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--from", "t0", required=True, help="Range start (unix or ISO-8601).")
@click.option("--to", "t1", required=True, help="Range end, exclusive.")
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True, default=False)
def export_measures(corpus_dir, t0, t1, output_path, as_json):
    """Export per-entity measures for a time range as CSV."""
    corpus = load_corpus(corpus_dir)
    rows = export_measures_csv(corpus, parse_time(t0), parse_time(t1), output_path)
    _emit({"rows": rows, "output": str(output_path)}, as_json)


@cli.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--from", "t0", required=True)
@click.option("--to", "t1", required=True)
@click.option("--outdir", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True, default=False)
def report(corpus_dir, t0, t1, outdir, as_json):
    """Export the measure CSV plus volume/histogram figures."""
    corpus = load_corpus(corpus_dir)
    summary = render_report(corpus, parse_time(t0), parse_time(t1), outdir)
    _emit(summary, as_json)


@cli.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True),
              envvar="ENTITYSCOPE_CORPUS")
@click.option("--listen", default="127.0.0.1:8601", envvar="ENTITYSCOPE_LISTEN",
              help="host:port to bind.")
@click.option("--session-timeout", default=7200.0, envvar="ENTITYSCOPE_SESSION_TIMEOUT",
              help="Idle session expiry in seconds.")
@click.option("--ui-dir", default=None, type=click.Path(exists=True),
              help="Serve a built frontend from this directory.")
def serve(corpus_dir, listen, session_timeout, ui_dir):
    """Serve the HTTP API (and optionally the UI) for one corpus."""
    import uvicorn

    from .service import create_app

    corpus = load_corpus(corpus_dir)
    app = create_app(corpus, idle_timeout=session_timeout, ui_dir=ui_dir)
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise InputError(f"--listen must be host:port, got {listen!r}")
    uvicorn.run(app, host=host, port=int(port), log_level="info")


def main() -> None:
    try:
        cli(standalone_mode=False)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except EntityScopeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except Exception as exc:  # noqa: BLE001 - operator-facing catch-all
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
