"""Command-line interface for batch coding, benchmarks and reports."""

from __future__ import annotations

import functools
import json
import sys
from collections import Counter
from pathlib import Path

import click

from . import benchmark as bench_mod
from . import robustness as robust_mod
from .codebook import code_event, code_event_detailed, load_codebook
from .config import (
    BENCHMARK_CORPUS,
    DEFAULT_CODEBOOK,
    DEMO_CORPUS,
    ToolkitConfig,
    build_backends,
    load_config,
    pipeline_config,
)
from .corpus import (
    SplitSpec,
    corpus_stats,
    monthly_time_series,
    read_corpus,
    stratified_split,
    write_coded_jsonl,
)
from .errors import PrentError
from .pipeline import EventDescription, Template
from .roles import extract_roles, role_json_line
from .synth import LOCATIONS, ORGS


def runtime_errors(f):
    """Map toolkit failures to exit code 1 with a clean message."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except PrentError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _load_codebook(ref: str):
    path = Path(ref)
    if path.exists():
        return load_codebook(path)
    bundled = DEFAULT_CODEBOOK
    if ref in ("political-events", bundled.stem):
        return load_codebook(bundled)
    raise click.UsageError(f"codebook {ref!r} is neither a file nor a bundled name")


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="TOML or JSON configuration file.")
@click.pass_context
def cli(ctx, config_path):
    """Prompt-and-entail event coding toolkit."""
    ctx.obj = load_config(config_path)


def _suite(config: ToolkitConfig):
    return build_backends(config)


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              default=str(DEMO_CORPUS), show_default="bundled demo corpus")
@click.option("--codebook", default="political-events", show_default=True,
              help="Path to a codebook file or a bundled codebook name.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--entailed-out", type=click.Path(dir_okay=False), default=None,
              help="Also write per-template entailed sets as JSON lines.")
@click.option("--top-k", type=int, default=None)
@click.option("--threshold", type=float, default=None)
@click.pass_obj
@runtime_errors
def code(config, input_path, codebook, out_path, entailed_out, top_k, threshold):
    """Code every event in a corpus; one JSON line per event."""
    records = read_corpus(input_path)
    book = _load_codebook(codebook)
    backends = _suite(config)
    pc = pipeline_config(config, top_k, threshold)
    coded, entailed_lines = [], []
    for r in records:
        event = EventDescription(r.description, id=r.id)
        types, entailed_sets = code_event_detailed(event, book, pc, backends)
        coded.append((r, types))
        if entailed_out:
            entailed_lines += [es.to_json_line() for es in entailed_sets.values()]
    write_coded_jsonl(coded, out_path)
    if entailed_out:
        Path(entailed_out).write_text(
            "\n".join(entailed_lines) + ("\n" if entailed_lines else ""), encoding="utf-8"
        )
    n_typed = sum(1 for _, types in coded if types)
    click.echo(f"coded {len(coded)} events ({n_typed} matched at least one type) -> {out_path}")


_INVOLVES = Template("involves", "This event involves [Z].")
_PEOPLE_WERE = Template("people_were", "People were [Z].")


def _benchmark_inputs(config, input_path, n_train, n_test, seed):
    records = read_corpus(input_path)
    train, test = stratified_split(records, SplitSpec(n_train, n_test, seed))
    backends = _suite(config)
    pc = pipeline_config(config)
    return records, train, test, backends, pc


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              default=str(BENCHMARK_CORPUS), show_default="bundled benchmark corpus")
@click.option("--train", "n_train", type=int, default=600, show_default=True)
@click.option("--test", "n_test", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--modes", default="bow,random,pr,prent", show_default=True)
@click.option("--json-out", type=click.Path(dir_okay=False), default=None,
              help="Also write the full report as JSON.")
@click.option("--curve-sizes", default=None,
              help="Comma-separated training sizes for a learning curve.")
@click.option("--curve-out", type=click.Path(dir_okay=False), default=None,
              help="CSV destination for the learning curve.")
@click.pass_obj
@runtime_errors
def bench(config, input_path, n_train, n_test, seed, modes, json_out,
          curve_sizes, curve_out):
    """Multiclass classification report per feature mode, plus the
    rule-based lethal/non-lethal evaluation."""
    _, train, test, backends, pc = _benchmark_inputs(config, input_path, n_train, n_test, seed)
    scored_train = bench_mod.score_records(train, _INVOLVES, pc, backends)
    scored_test = bench_mod.score_records(test, _INVOLVES, pc, backends)
    mode_list = [m.strip() for m in modes.split(",") if m.strip()]
    clf = bench_mod.ClassifierConfig(seed=seed)

    report_docs = {}
    click.echo(f"multiclass ({len(train)} train / {len(test)} test)")
    click.echo(f"{'mode':<8}  {'accuracy':>8}  {'f1':>8}")
    for mode in mode_list:
        fm_train = bench_mod.featurize(train, mode, scored_train, pc, seed)
        fm_test = bench_mod.featurize(test, mode, scored_test, pc, seed)
        report = bench_mod.train_eval(
            fm_train, [r.label for r in train], fm_test, [r.label for r in test], clf
        )
        report_docs[mode] = report.to_dict()
        click.echo(f"{mode:<8}  {report.accuracy:>8.3f}  {report.f1:>8.3f}")

    lethal_scored = bench_mod.score_records(test, _PEOPLE_WERE, pc, backends)
    lethal = bench_mod.lethal_rule_eval(test, lethal_scored, pc)
    click.echo("\nlethal rule (test split)")
    click.echo(f"{'mode':<8}  {'f1':>8}  {'precision':>9}  {'recall':>8}")
    for mode in ("prent", "pr"):
        r = lethal[mode]
        click.echo(f"{mode:<8}  {r.f1:>8.3f}  {r.precision:>9.3f}  {r.recall:>8.3f}")

    if curve_sizes:
        try:
            sizes = sorted(int(s) for s in curve_sizes.split(","))
        except ValueError:
            raise click.UsageError(f"--curve-sizes must be integers, got {curve_sizes!r}")
        if not curve_out:
            raise click.UsageError("--curve-sizes needs --curve-out")
        curves = bench_mod.learning_curve(
            train, test, sizes, mode_list, scored_train, scored_test, pc, clf, seed
        )
        Path(curve_out).write_text(bench_mod.learning_curve_csv(curves), encoding="utf-8")
        click.echo(f"\nlearning curve written to {curve_out}")

    if json_out:
        document = {
            "multiclass": report_docs,
            "lethal": {mode: lethal[mode].to_dict() for mode in lethal},
        }
        Path(json_out).write_text(json.dumps(document, indent=2), encoding="utf-8")
        click.echo(f"\nreport written to {json_out}")


@cli.command()
@click.option("--param", type=click.Choice(["top_k", "threshold"]), required=True)
@click.option("--grid", required=True, help="Comma-separated ascending values.")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              default=str(BENCHMARK_CORPUS), show_default="bundled benchmark corpus")
@click.option("--train", "n_train", type=int, default=600, show_default=True)
@click.option("--test", "n_test", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False), default=None,
              help="Optionally render the sweep as PNG/SVG.")
@click.pass_obj
@runtime_errors
def sweep(config, param, grid, input_path, n_train, n_test, seed, out_path, plot_path):
    """F1 across a K or entailment-threshold grid, written as CSV."""
    try:
        values = [float(v) for v in grid.split(",")]
    except ValueError:
        raise click.UsageError(f"--grid must be comma-separated numbers, got {grid!r}")
    parameter = "top_k" if param == "top_k" else "entail_threshold"
    _, train, test, backends, pc = _benchmark_inputs(config, input_path, n_train, n_test, seed)
    max_k = max([pc.top_k] + [int(v) for v in values]) if parameter == "top_k" else pc.top_k
    scored_train = bench_mod.score_records(train, _INVOLVES, pc, backends, max_k=max_k)
    scored_test = bench_mod.score_records(test, _INVOLVES, pc, backends, max_k=max_k)
    try:
        result = bench_mod.sweep(
            train, test, parameter, values, scored_train, scored_test, pc,
            bench_mod.ClassifierConfig(seed=seed),
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    Path(out_path).write_text(result.to_csv(), encoding="utf-8")
    click.echo(f"sweep written to {out_path}")
    if plot_path:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.plot(result.grid, result.f1, marker="o")
        ax.set_xlabel(parameter)
        ax.set_ylabel("weighted F1")
        fig.tight_layout()
        fig.savefig(plot_path)
        click.echo(f"plot written to {plot_path}")


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              default=str(DEMO_CORPUS), show_default="bundled demo corpus")
@click.option("--events", "n_events", type=int, default=100, show_default=True)
@click.option("--vocab-size", type=int, default=100, show_default=True)
@click.option("--template", "template_text", default="This event involves [Z].",
              show_default=True)
@click.option("--spec-file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON perturbation plan; defaults to the standard four kinds.")
@click.option("--json-out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
@runtime_errors
def perturb(config, input_path, n_events, vocab_size, template_text, spec_file, json_out):
    """Perturbation audit: mean distribution shift per perturbation and mode."""
    records = read_corpus(input_path)[:n_events]
    events = [EventDescription(r.description, id=r.id) for r in records]
    template = Template("audit", template_text)
    backends = _suite(config)
    pc = pipeline_config(config)
    ner = robust_mod.DictionaryNER({"ORG": list(ORGS), "LOC": list(LOCATIONS)})
    if spec_file:
        specs = robust_mod.load_perturbation_specs(spec_file, ner=ner)
    else:
        specs = [
            robust_mod.PerturbationSpec("paraphrase", 1),
            robust_mod.PerturbationSpec("paraphrase", 2),
            robust_mod.PerturbationSpec("stopword_removal", 1),
            robust_mod.PerturbationSpec("entity_removal", 1, ner=ner),
            robust_mod.PerturbationSpec("duplication", 1),
            robust_mod.PerturbationSpec("duplication", 2),
        ]
    report = robust_mod.robustness_report(events, template, specs, pc, backends,
                                          vocab_size=vocab_size)
    click.echo(report.to_text())
    if json_out:
        Path(json_out).write_text(report.to_json(), encoding="utf-8")
        click.echo(f"report written to {json_out}")


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              default=str(DEMO_CORPUS), show_default="bundled demo corpus")
@click.option("--codebook", default="political-events", show_default=True)
@click.option("--type", "event_type", required=True)
@click.option("--region", default=None)
@click.option("--source", type=click.Choice(["prent", "ground_truth"]), default="prent",
              show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.pass_obj
@runtime_errors
def timeseries(config, input_path, codebook, event_type, region, source, out_path):
    """Monthly counts of one coded event type, as CSV."""
    records = read_corpus(input_path)
    if source == "ground_truth":
        coded = [(r, {r.label} if r.label else set()) for r in records]
    else:
        book = _load_codebook(codebook)
        backends = _suite(config)
        pc = pipeline_config(config)
        coded = [
            (r, code_event(EventDescription(r.description, id=r.id), book, pc, backends))
            for r in records
        ]
    series = monthly_time_series(coded, event_type, region, source)
    Path(out_path).write_text(series.to_csv(), encoding="utf-8")
    click.echo(f"{series.total()} events across {len(series.points)} months -> {out_path}")


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              default=str(DEMO_CORPUS), show_default="bundled demo corpus")
@click.option("--top", type=int, default=15, show_default=True)
@click.pass_obj
@runtime_errors
def stats(config, input_path, top):
    """Description length distribution and most frequent unigrams."""
    records = read_corpus(input_path)
    tables = corpus_stats(records)
    lengths: Counter = tables["length_distribution"]
    click.echo(f"{len(records)} records")
    click.echo("tokens  descriptions")
    for length in sorted(lengths):
        click.echo(f"{length:>6}  {lengths[length]}")
    click.echo("\ntop unigrams")
    for token, count in tables["unigram_frequency"].most_common(top):
        click.echo(f"{count:>6}  {token}")


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              default=str(DEMO_CORPUS), show_default="bundled demo corpus")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--limit", type=int, default=None, help="Only process the first N events.")
@click.option("--confidence-floor", type=float, default=0.1, show_default=True)
@click.pass_obj
@runtime_errors
def roles(config, input_path, out_path, limit, confidence_floor):
    """Actor/target extraction from the top entailed action of each event."""
    import warnings

    records = read_corpus(input_path)[:limit]
    backends = _suite(config)
    pc = pipeline_config(config)
    lines = []
    for record in records:
        event = EventDescription(record.description, id=record.id)
        entailed = bench_mod.score_records([record], _PEOPLE_WERE, pc, backends)[record.id]
        actions = entailed.entailed(pc.top_k, pc.entail_threshold)
        if not actions:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = extract_roles(event.text, actions[0], backends, confidence_floor)
        lines.append(role_json_line(record.id, result))
    Path(out_path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    click.echo(f"extracted roles for {len(lines)} events -> {out_path}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.pass_obj
@runtime_errors
def serve(config, host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(config), host=host, port=port)


def main():
    try:
        cli(standalone_mode=True)
    except PrentError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
