"""Command-line front door: synthesize datasets, generate and score palette
pairs, apply selections, export traces and SVG renderings, run the service.

Exit codes: 0 success, 1 IO or parse errors, 2 optimizer repair failure.
All file outputs are bit-reproducible for a fixed --seed.
"""

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import click

from .annealer import AnnealConfig, AnnealError, generate_pair
from .colornames import default_name_model
from .colorspace import ColorSRGB, MarkSize
from .datasets import SYNTH_PROFILES, Dataset, load_dataset, save_dataset, synth_scatterplot
from .highlight import Rect, Selection, resolve_colors, selection_from_brush
from .neighborhood import build_graph, compute_separability
from .render import RenderSpec, render_svg
from .scoring import PalettePair, Weights, check_constraints, pair_energy


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _dataset_options(fn):
    fn = click.option(
        "--input", "input_path", default=None, help="dataset file (CSV or JSON)"
    )(fn)
    fn = click.option(
        "--synth",
        "profile",
        type=click.Choice(sorted(SYNTH_PROFILES)),
        default=None,
        help="synthesize a dataset instead of reading one",
    )(fn)
    fn = click.option("--classes", type=int, default=6, show_default=True)(fn)
    return fn


def _palette_options(fn):
    fn = click.option("--seed", type=int, default=0, show_default=True)(fn)
    fn = click.option("--background", default="#ffffff", show_default=True)(fn)
    fn = click.option("--sigma", type=float, default=0.05, show_default=True)(fn)
    fn = click.option("--mark-size", type=float, default=10.0, show_default=True)(fn)
    fn = click.option(
        "--weights", default="1,1,1,1", show_default=True, help="w0,w1,w2,w3"
    )(fn)
    return fn


def _load_dataset(input_path, profile, classes, seed) -> Dataset:
    if input_path and profile:
        _fail("pass either --input or --synth, not both", 1)
    if not input_path and not profile:
        _fail("a dataset is required: pass --input or --synth", 1)
    try:
        if input_path:
            return load_dataset(input_path)
        return synth_scatterplot(classes, profile, seed)
    except (OSError, ValueError) as exc:
        _fail(str(exc), 1)


def _parse_weights(text: str) -> Weights:
    parts = text.split(",")
    if len(parts) != 4:
        _fail(f"--weights needs four comma-separated values, got {text!r}", 1)
    try:
        return Weights(*(float(p) for p in parts))
    except ValueError as exc:
        _fail(str(exc), 1)


def _build_config(seed, background, sigma, mark_size, weights) -> AnnealConfig:
    try:
        return AnnealConfig(
            sigma=sigma,
            mark_size=MarkSize(mark_size),
            weights=_parse_weights(weights),
            background=ColorSRGB.from_hex(background),
            seed=seed,
        )
    except ValueError as exc:
        _fail(str(exc), 1)


def _read_pair(path: str) -> PalettePair:
    try:
        with open(path) as fh:
            return PalettePair.from_json_dict(json.load(fh))
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        _fail(f"cannot read palette pair {path}: {exc}", 1)


def _write_text(path, text: str):
    try:
        if path:
            with open(path, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
    except OSError as exc:
        _fail(str(exc), 1)


def _generate_best(dataset, graph, field, model, cfg, restarts):
    """Run `restarts` seeded optimizations, keep the best-energy pair.

    Ties break toward the lowest seed so results stay deterministic.
    """
    if restarts <= 1:
        return generate_pair(dataset, graph, field, model, cfg)

    def run(seed: int):
        try:
            pair, trace = generate_pair(dataset, graph, field, model, replace(cfg, seed=seed))
        except AnnealError as exc:
            return (seed, None, None, exc)
        total = pair_energy(dataset, graph, field, model, pair, weights=cfg.weights).total
        return (seed, pair, trace, total)

    workers = min(restarts, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, range(cfg.seed, cfg.seed + restarts)))
    winners = [(r[3], r[0], r[1], r[2]) for r in results if r[1] is not None]
    if not winners:
        raise results[0][3]
    winners.sort(key=lambda w: (-w[0], w[1]))
    return winners[0][2], winners[0][3]


def _svg_paths(base: str):
    root, ext = os.path.splitext(base)
    if ext.lower() != ".svg":
        root = base
    return root + ".svg", root + "_highlight.svg"


def _render_pair_svgs(dataset: Dataset, pair: PalettePair, base: str, mark_size: float):
    spec = RenderSpec(mark_diameter=mark_size, background=pair.background.to_hex())
    legend = list(zip(dataset.class_names, pair.salient.hex_list()))
    static_path, highlight_path = _svg_paths(base)
    static = resolve_colors(dataset, pair, Selection.none())
    _write_text(static_path, render_svg(dataset, static.hex_list(), spec, static.emphasized, legend))
    picked = resolve_colors(dataset, pair, Selection.of_classes({0}))
    _write_text(highlight_path, render_svg(dataset, picked.hex_list(), spec, picked.emphasized, legend))
    return static_path, highlight_path


@click.group()
def main():
    """Linked salient/faint palette generation for multiclass scatterplots."""


@main.command()
@click.option(
    "--synth",
    "profile",
    type=click.Choice(sorted(SYNTH_PROFILES)),
    default="small_dense",
    show_default=True,
)
@click.option("--classes", type=int, default=6, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, help="output dataset path (JSON)")
def synth(profile, classes, seed, out):
    """Write a synthetic labeled scatterplot dataset."""
    try:
        dataset = synth_scatterplot(classes, profile, seed)
        save_dataset(dataset, out)
    except (OSError, ValueError) as exc:
        _fail(str(exc), 1)
    click.echo(f"wrote {dataset.n} points in {dataset.m} classes to {out}")


@main.command()
@_dataset_options
@_palette_options
@click.option("--restarts", type=int, default=1, show_default=True)
@click.option("--out", default=None, help="palette-pair JSON path (default: stdout)")
@click.option("--trace", "trace_path", default=None, help="convergence CSV path")
@click.option("--svg", "svg_path", default=None, help="base path for the SVG pair")
def generate(input_path, profile, classes, seed, background, sigma, mark_size, weights, restarts, out, trace_path, svg_path):
    """Optimize a salient/faint palette pair for a dataset."""
    if restarts < 1:
        _fail("--restarts must be at least 1", 1)
    dataset = _load_dataset(input_path, profile, classes, seed)
    cfg = _build_config(seed, background, sigma, mark_size, weights)
    model = default_name_model()
    graph = build_graph(dataset)
    field = compute_separability(dataset, graph)
    try:
        pair, trace = _generate_best(dataset, graph, field, model, cfg, restarts)
    except AnnealError as exc:
        _fail(str(exc), 2)
    _write_text(out, json.dumps(pair.to_json_dict(), indent=2) + "\n")
    if trace_path:
        _write_text(trace_path, trace.to_csv())
    if svg_path:
        _render_pair_svgs(dataset, pair, svg_path, mark_size)


@main.command()
@click.argument("pair_json")
@_dataset_options
@click.option("--seed", type=int, default=0, show_default=True, help="seed for --synth")
@click.option("--weights", default="1,1,1,1", show_default=True, help="w0,w1,w2,w3")
@click.option("--background", default=None, help="override the pair's stored background")
@click.option("--out", default=None, help="output path (default: stdout)")
def score(pair_json, input_path, profile, classes, seed, weights, background, out):
    """Score a stored palette pair against a dataset.

    Exits 0 even when constraints fail; failures appear in the report.
    """
    dataset = _load_dataset(input_path, profile, classes, seed)
    pair = _read_pair(pair_json)
    parsed = _parse_weights(weights)
    try:
        bg = ColorSRGB.from_hex(background) if background else None
    except ValueError as exc:
        _fail(str(exc), 1)
    model = default_name_model()
    graph = build_graph(dataset)
    field = compute_separability(dataset, graph)
    breakdown = pair_energy(dataset, graph, field, model, pair, background=bg, weights=parsed)
    report = check_constraints(pair, background=bg)
    payload = {"score": breakdown.to_json_dict(), "constraints": report.to_json_dict()}
    _write_text(out, json.dumps(payload, indent=2) + "\n")


@main.command()
@click.argument("pair_json")
@_dataset_options
@click.option("--seed", type=int, default=0, show_default=True, help="seed for --synth")
@click.option("--selection", "selection_path", default=None, help="selection JSON file")
@click.option("--brush", default=None, help="rectangle x_min,y_min,x_max,y_max in data units")
@click.option("--mark-size", type=float, default=10.0, show_default=True)
@click.option("--out", default=None, help="resolved-colors JSON path (default: stdout)")
@click.option("--svg", "svg_path", default=None, help="render the highlighted plot")
def highlight(pair_json, input_path, profile, classes, seed, selection_path, brush, mark_size, out, svg_path):
    """Apply a selection to a dataset + pair and emit resolved colors."""
    if selection_path and brush:
        _fail("pass either --selection or --brush, not both", 1)
    dataset = _load_dataset(input_path, profile, classes, seed)
    pair = _read_pair(pair_json)
    try:
        if brush:
            coords = [float(p) for p in brush.split(",")]
            if len(coords) != 4:
                raise ValueError("--brush needs x_min,y_min,x_max,y_max")
            sel = selection_from_brush(dataset, Rect(*coords))
        elif selection_path:
            with open(selection_path) as fh:
                sel = Selection.from_json_dict(json.load(fh))
        else:
            sel = Selection.none()
        sel.validate_for(dataset)
        resolved = resolve_colors(dataset, pair, sel)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        _fail(str(exc), 1)
    payload = {"selection": sel.to_json_dict(), **resolved.to_json_dict()}
    _write_text(out, json.dumps(payload, indent=2) + "\n")
    if svg_path:
        spec = RenderSpec(mark_diameter=mark_size, background=pair.background.to_hex())
        legend = list(zip(dataset.class_names, pair.salient.hex_list()))
        _write_text(svg_path, render_svg(dataset, resolved.hex_list(), spec, resolved.emphasized, legend))


@main.command()
@_dataset_options
@_palette_options
@click.option("--restarts", type=int, default=1, show_default=True)
@click.option("--out", required=True, help="convergence CSV path")
def trace(input_path, profile, classes, seed, background, sigma, mark_size, weights, restarts, out):
    """Re-run the optimizer and emit its convergence trace as CSV."""
    if restarts < 1:
        _fail("--restarts must be at least 1", 1)
    dataset = _load_dataset(input_path, profile, classes, seed)
    cfg = _build_config(seed, background, sigma, mark_size, weights)
    model = default_name_model()
    graph = build_graph(dataset)
    field = compute_separability(dataset, graph)
    try:
        _, run_trace = _generate_best(dataset, graph, field, model, cfg, restarts)
    except AnnealError as exc:
        _fail(str(exc), 2)
    _write_text(out, run_trace.to_csv())


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--persist", default=None, help="JSON file for session persistence")
def serve(host, port, persist):
    """Run the HTTP palette service."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(persist_path=persist), host=host, port=port)


if __name__ == "__main__":
    main()
