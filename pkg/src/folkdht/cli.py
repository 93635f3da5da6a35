"""Command-line pipeline around the simulator library.

Exit codes: 0 on success, 1 on internal failure, 2 on bad input or
usage, 3 when a cross-checked invariant is violated. Report commands
emit CSV files plus a PNG rendering of the same data (disable with
``--no-figures``); every run records a manifest describing its inputs,
configuration and outputs.
"""

from __future__ import annotations

import functools
import hashlib
import json
import random
import sys
import time
from pathlib import Path

import click

from . import __version__
from .dataset import (
    SynthConfig,
    aggregate,
    degree_stats,
    generate_synthetic,
    load_triples,
    write_triples,
)
from .errors import FolkdhtError, InvariantViolation
from .evolution import EvolutionConfig, run_evolution
from .graphio import (
    load_fg_dump,
    load_overlay_dump,
    load_trg_dump,
    write_fg_dump,
    write_overlay_dump,
    write_trg_dump,
)
from .metrics import compare_fg, path_stats, write_cdf_csv, write_comparison_csv
from .protocol import APPROXIMATED, EXACT, ProtocolClient, ProtocolConfig
from .search import GraphSource, ProtocolSource, StopCriteria, Strategy, repl_navigate, run_scripted_search

_STRATEGY_ORDER = [Strategy.LAST_TAG, Strategy.RANDOM_TAG, Strategy.FIRST_TAG]


def _friendly_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except InvariantViolation as exc:
            click.echo(f"invariant violation: {exc}", err=True)
            for item in exc.evidence:
                click.echo(f"  {item}", err=True)
            sys.exit(3)
        except FolkdhtError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(
    path: Path,
    command: str,
    config: dict,
    inputs: list[Path],
    outputs: list[Path],
    seed: int | None,
    started: float,
) -> None:
    manifest = {
        "command": command,
        "tool_version": __version__,
        "config": config,
        "seed": seed,
        "input_hashes": {p.name: _sha256_file(p) for p in inputs},
        "outputs": sorted(p.name for p in outputs),
        "wall_time_s": round(time.perf_counter() - started, 3),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _parse_k_values(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise click.UsageError(f"--k expects comma-separated integers, got {text!r}")
    if not values:
        raise click.UsageError("--k needs at least one value")
    return values


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
def main() -> None:
    """Folksonomy-over-DHT simulator: generate, evolve, compare, navigate."""


# -- generate -----------------------------------------------------------------


@main.command()
@click.option("--tags", "n_tags", type=int, required=True, help="tag universe size")
@click.option("--resources", "n_resources", type=int, required=True, help="resource universe size")
@click.option("--events", "n_events", type=int, required=True, help="number of annotations")
@click.option("--exponent", type=float, default=1.0, show_default=True, help="tag popularity exponent")
@click.option("--resource-exponent", type=float, default=0.25, show_default=True, help="resource popularity exponent")
@click.option("--vocab-cap", type=int, default=None, help="max distinct tags per resource (bounded-shortlist model)")
@click.option("--vocab-exponent", type=float, default=0.2, show_default=True, help="shortlist membership exponent")
@click.option("--seed", type=int, default=0, envvar="FOLKDHT_SEED", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@_friendly_errors
def generate(n_tags, n_resources, n_events, exponent, resource_exponent, vocab_cap, vocab_exponent, seed, out_path):
    """Write a seeded synthetic annotation TSV."""
    started = time.perf_counter()
    config = SynthConfig(
        n_tags=n_tags,
        n_resources=n_resources,
        n_events=n_events,
        tag_popularity_exponent=exponent,
        resource_popularity_exponent=resource_exponent,
        rng_seed=seed,
        vocab_cap=vocab_cap,
        vocab_exponent=vocab_exponent,
    )
    dataset = generate_synthetic(config)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_triples(dataset, out_path)
    _write_manifest(
        out_path.with_name(out_path.name + ".manifest.json"),
        "generate",
        {
            "tags": n_tags,
            "resources": n_resources,
            "events": n_events,
            "exponent": exponent,
            "resource_exponent": resource_exponent,
            "vocab_cap": vocab_cap,
            "vocab_exponent": vocab_exponent,
            "dataset_hash": dataset.content_hash(),
        },
        inputs=[],
        outputs=[out_path],
        seed=seed,
        started=started,
    )
    click.echo(f"wrote {len(dataset.events)} annotations to {out_path}")


# -- evolve -------------------------------------------------------------------


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--k", "k_text", default="1", show_default=True, help="comma-separated fan-out bounds")
@click.option("--mode", type=click.Choice(["exact", "approx"]), default="approx", show_default=True)
@click.option("--seed", type=int, default=0, envvar="FOLKDHT_SEED", show_default=True)
@click.option("--cap", type=int, default=None, help="optional search read cap")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@_friendly_errors
def evolve(in_path, k_text, mode, seed, cap, out_dir):
    """Replay a dataset through the protocol and dump the decoded state."""
    started = time.perf_counter()
    dataset = load_triples(in_path)
    out_dir.mkdir(parents=True, exist_ok=True)

    oracle_trg, oracle_fg = aggregate(dataset)
    outputs = []
    oracle_fg_path = out_dir / "oracle_fg.jsonl"
    oracle_trg_path = out_dir / "oracle_trg.jsonl"
    write_fg_dump(oracle_fg, oracle_fg_path)
    write_trg_dump(oracle_trg, oracle_trg_path)
    outputs += [oracle_fg_path, oracle_trg_path]

    config = EvolutionConfig(
        mode=EXACT if mode == "exact" else APPROXIMATED,
        k_values=_parse_k_values(k_text),
        rng_seed=seed,
        get_cap=cap,
    )
    result = run_evolution(dataset, config, keep_stores=True)
    dataset_hash = dataset.content_hash()
    for label, run in result.runs.items():
        fg_path = out_dir / f"fg_{label}.jsonl"
        overlay_path = out_dir / f"overlay_{label}.jsonl"
        result_path = out_dir / f"result_{label}.json"
        write_fg_dump(run.fg, fg_path)
        write_overlay_dump(run.store, overlay_path)
        with open(result_path, "w", encoding="utf-8") as handle:
            json.dump(
                {
                    "dataset_hash": dataset_hash,
                    "seed": seed,
                    "k": run.k,
                    "events": run.events,
                    "lookups": run.lookups,
                    "fg_arcs": run.fg.arc_count(),
                    "fg_total_weight": run.fg.total_weight(),
                },
                handle,
                indent=2,
                sort_keys=True,
            )
            handle.write("\n")
        outputs += [fg_path, overlay_path, result_path]
        run.store = None  # release tokens before the next dump

    _write_manifest(
        out_dir / "manifest.json",
        "evolve",
        {
            "mode": mode,
            "k": list(config.k_values),
            "cap": cap,
            "events": result.events,
            "dataset_hash": dataset_hash,
        },
        inputs=[in_path],
        outputs=outputs,
        seed=seed,
        started=started,
    )
    click.echo(f"replayed {result.events} events; outputs in {out_dir}")


# -- compare ------------------------------------------------------------------


def _label_for(path: Path, override: int | None) -> int | str:
    if override is not None:
        return override
    stem = path.stem  # e.g. fg_k5
    if stem.startswith("fg_"):
        sidecar = path.with_name(f"result_{stem[3:]}.json")
        if sidecar.exists():
            with open(sidecar, "r", encoding="utf-8") as handle:
                k = json.load(handle).get("k")
            if k is not None:
                return int(k)
    import re

    match = re.search(r"k(\d+)", stem)
    if match:
        return int(match.group(1))
    raise click.UsageError(
        f"cannot infer the fan-out bound for {path}; pass --k explicitly"
    )


@main.command()
@click.option("--oracle", "oracle_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--approx", "approx_paths", type=click.Path(exists=True, dir_okay=False, path_type=Path), multiple=True, required=True)
@click.option("--k", "k_override", type=int, default=None, help="fan-out label when it cannot be inferred")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@_friendly_errors
def compare(oracle_path, approx_paths, k_override, out_path, figures):
    """Score approximated graph dumps against the exact one."""
    started = time.perf_counter()
    oracle = load_fg_dump(oracle_path)
    rows = []
    for path in approx_paths:
        label = _label_for(path, k_override)
        rows.append((label, compare_fg(oracle, load_fg_dump(path))))
    rows.sort(key=lambda pair: (isinstance(pair[0], str), pair[0]))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_comparison_csv(rows, out_path)
    outputs = [out_path]
    if figures:
        from .figures import save_comparison_figure

        figure_path = out_path.with_suffix(".png")
        save_comparison_figure(rows, figure_path)
        outputs.append(figure_path)
    _write_manifest(
        out_path.with_name(out_path.name + ".manifest.json"),
        "compare",
        {"rows": [str(k) for k, _ in rows]},
        inputs=[oracle_path, *approx_paths],
        outputs=outputs,
        seed=None,
        started=started,
    )
    for k, row in rows:
        click.echo(
            f"k={k}: recall {row.recall:.4f}, rank agreement {row.ktau_mu:.4f},"
            f" cosine {row.theta_mu:.4f}, weight-1 missing {row.sim1_mu:.4f}"
        )


# -- search-sim ------------------------------------------------------------------


@main.command("search-sim")
@click.option("--graph", "fg_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True, help="tag graph dump")
@click.option("--trg", "trg_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True, help="bipartite graph dump")
@click.option("--top-tags", type=int, default=100, show_default=True)
@click.option("--strategies", default="first,last,random", show_default=True)
@click.option("--random-repeats", type=int, default=100, show_default=True)
@click.option("--tag-floor", type=int, default=1, show_default=True)
@click.option("--res-floor", type=int, default=10, show_default=True)
@click.option("--display-cap", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, envvar="FOLKDHT_SEED", show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@_friendly_errors
def search_sim(
    fg_path, trg_path, top_tags, strategies, random_repeats, tag_floor,
    res_floor, display_cap, seed, out_dir, figures,
):
    """Run scripted faceted searches from the most popular tags."""
    started = time.perf_counter()
    fg = load_fg_dump(fg_path)
    trg = load_trg_dump(trg_path)
    source = GraphSource(trg, fg)
    stop = StopCriteria(tag_floor=tag_floor, resource_floor=res_floor)

    wanted = []
    for name in strategies.split(","):
        name = name.strip().lower()
        if not name:
            continue
        try:
            wanted.append(Strategy(name))
        except ValueError:
            raise click.UsageError(f"unknown strategy {name!r}")
    if not wanted:
        raise click.UsageError("no strategies requested")

    all_tags = sorted(trg.tags(), key=lambda t: (-len(trg.res_of(t)), t))
    if len(all_tags) < top_tags:
        click.echo(
            f"warning: graph has only {len(all_tags)} tags; using all of them",
            err=True,
        )
    start_tags = all_tags[:top_tags]

    rng = random.Random(seed)
    lengths: dict[Strategy, list[int]] = {s: [] for s in wanted}
    for strategy in wanted:
        repeats = random_repeats if strategy is Strategy.RANDOM_TAG else 1
        for tag in start_tags:
            for _ in range(repeats):
                steps, _ = run_scripted_search(
                    source, tag, strategy, stop, display_cap, rng
                )
                lengths[strategy].append(steps)

    stats = {s: path_stats(lengths[s]) for s in wanted}
    ordered = [s for s in _STRATEGY_ORDER if s in stats]

    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    table_path = out_dir / "path_stats.csv"
    with open(table_path, "w", encoding="utf-8", newline="") as handle:
        import csv as _csv

        writer = _csv.writer(handle)
        writer.writerow(["metric", *(s.value for s in ordered)])
        writer.writerow(["mu", *(f"{stats[s].mean:.4f}" for s in ordered)])
        writer.writerow(["sigma", *(f"{stats[s].sigma:.4f}" for s in ordered)])
        writer.writerow(["median", *(stats[s].median for s in ordered)])
    outputs.append(table_path)

    for strategy in ordered:
        cdf_path = out_dir / f"cdf_{strategy.value}.csv"
        write_cdf_csv(stats[strategy].cdf, cdf_path, value_header="path_length")
        outputs.append(cdf_path)

    if figures:
        from .figures import save_cdf_figure

        figure_path = out_dir / "path_length_cdf.png"
        save_cdf_figure(
            {s.value: [(v, f) for v, f in stats[s].cdf] for s in ordered},
            figure_path,
            xlabel="path length",
            title="search path length distribution",
        )
        outputs.append(figure_path)

    _write_manifest(
        out_dir / "manifest.json",
        "search-sim",
        {
            "top_tags": top_tags,
            "strategies": [s.value for s in ordered],
            "random_repeats": random_repeats,
            "tag_floor": tag_floor,
            "res_floor": res_floor,
            "display_cap": display_cap,
            "searches": {s.value: stats[s].count for s in ordered},
        },
        inputs=[fg_path, trg_path],
        outputs=outputs,
        seed=seed,
        started=started,
    )
    for strategy in ordered:
        st = stats[strategy]
        click.echo(
            f"{strategy.value}: mu {st.mean:.3f}, sigma {st.sigma:.3f},"
            f" median {st.median} over {st.count} searches"
        )


# -- stats ------------------------------------------------------------------------


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@_friendly_errors
def stats(in_path, out_dir, figures):
    """Degree statistics and distributions of an annotation dataset."""
    started = time.perf_counter()
    dataset = load_triples(in_path)
    trg, fg = aggregate(dataset)
    st = degree_stats(trg, fg)

    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    table_path = out_dir / "degree_stats.csv"
    with open(table_path, "w", encoding="utf-8", newline="") as handle:
        import csv as _csv

        writer = _csv.writer(handle)
        writer.writerow(["metric", "tags_r", "res_t", "nfg_t"])
        for row in st.rounded_rows():
            writer.writerow(row)
    outputs.append(table_path)

    series = {
        "tags_r": st.tags_per_resource_cdf,
        "res_t": st.resources_per_tag_cdf,
        "nfg_t": st.fg_neighbors_cdf,
    }
    for name, cdf in series.items():
        cdf_path = out_dir / f"cdf_{name}.csv"
        write_cdf_csv(cdf, cdf_path, value_header="degree")
        outputs.append(cdf_path)

    if figures:
        from .figures import save_cdf_figure

        figure_path = out_dir / "degree_cdf.png"
        save_cdf_figure(
            {name: [(v, f) for v, f in cdf] for name, cdf in series.items()},
            figure_path,
            xlabel="degree",
            title="degree distributions",
            log_x=True,
        )
        outputs.append(figure_path)

    _write_manifest(
        out_dir / "manifest.json",
        "stats",
        {"events": len(dataset.events), "dataset_hash": dataset.content_hash()},
        inputs=[in_path],
        outputs=outputs,
        seed=None,
        started=started,
    )
    click.echo(f"degree statistics written to {out_dir}")


# -- navigate ----------------------------------------------------------------------


def _resolve_overlay_file(path: Path) -> Path:
    if path.is_file():
        return path
    candidates = sorted(path.glob("overlay*.jsonl"))
    if len(candidates) != 1:
        names = ", ".join(c.name for c in candidates) or "none"
        raise click.UsageError(
            f"{path} must contain exactly one overlay*.jsonl dump (found: {names})"
        )
    return candidates[0]


@main.command()
@click.option("--graph", "fg_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="tag graph dump")
@click.option("--trg", "trg_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="bipartite graph dump")
@click.option("--live-overlay", "overlay_path", type=click.Path(exists=True, path_type=Path), default=None, help="overlay dump file or directory")
@click.option("--start", "start_tag", default=None, help="tag to start from")
@click.option("--tag-floor", type=int, default=1, show_default=True)
@click.option("--res-floor", type=int, default=10, show_default=True)
@click.option("--display-cap", type=int, default=100, show_default=True)
@click.option("--transcript", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="file of commands to replay")
@_friendly_errors
def navigate(fg_path, trg_path, overlay_path, start_tag, tag_floor, res_floor, display_cap, transcript):
    """Interactive faceted navigation (numbered choices, back, quit)."""
    graph_mode = fg_path is not None or trg_path is not None
    if graph_mode and overlay_path is not None:
        raise click.UsageError("--graph/--trg and --live-overlay are exclusive")
    if graph_mode:
        if fg_path is None or trg_path is None:
            raise click.UsageError("graph navigation needs both --graph and --trg")
        source = GraphSource(load_trg_dump(trg_path), load_fg_dump(fg_path))
    elif overlay_path is not None:
        store = load_overlay_dump(_resolve_overlay_file(overlay_path))
        source = ProtocolSource(ProtocolClient(store, ProtocolConfig(mode=APPROXIMATED)))
    else:
        raise click.UsageError("provide --graph/--trg or --live-overlay")

    interactive = sys.stdin.isatty()
    if transcript is None and not interactive:
        raise click.UsageError(
            "stdin is not interactive; provide --transcript with the commands"
        )
    if start_tag is None:
        if transcript is None and interactive:
            start_tag = click.prompt("start tag")
        else:
            raise click.UsageError("--start is required with a transcript")

    stop = StopCriteria(tag_floor=tag_floor, resource_floor=res_floor)
    if transcript is not None:
        with open(transcript, "r", encoding="utf-8") as stream:
            repl_navigate(source, start_tag, stop, display_cap, stream, sys.stdout)
    else:
        repl_navigate(source, start_tag, stop, display_cap, sys.stdin, sys.stdout)


if __name__ == "__main__":  # pragma: no cover
    main()
