"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data or constraint error. Error
messages go to stderr; results go to stdout as JSON or tab-separated text.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import analysis, catalog, evidence, stimgen
from .config import DEFAULT_MIN_TRIALS, load_config
from .errors import PalettekitError
from .evidence import CategoryBin, Marker
from .optimizer import (Constraints, Encoding, ModelEvidence, Palette,
                        ScoringContext, generate_redundant,
                        generate_single_channel, swap_element)

DATA_ERROR_EXIT = 3


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(DATA_ERROR_EXIT)


def _load_model(evidence_dir: str | None, trials_file: str | None,
                min_trials: int) -> ModelEvidence:
    if evidence_dir:
        return ModelEvidence.load_dir(evidence_dir, min_trials)
    if trials_file:
        records = evidence.ingest_trials(trials_file)
        return ModelEvidence.from_trials(records, min_trials)
    raise click.UsageError("provide --evidence or --trials")


def _build_constraints(require_color, require_shape, exclude_color,
                       exclude_shape) -> Constraints:
    return Constraints(
        required_colors=frozenset(require_color),
        required_shapes=frozenset(require_shape),
        excluded_colors=frozenset(exclude_color),
        excluded_shapes=frozenset(exclude_shape))


def _bin_option(value: str | None) -> CategoryBin | None:
    if value is None or value == "all":
        return None
    try:
        return CategoryBin(value)
    except ValueError:
        raise click.UsageError(f"unknown bin {value!r}; use small/medium/large/all")


@click.group()
def main() -> None:
    """Categorical palette design from pairwise perceptual evidence."""


@main.command()
@click.option("--type", "enc_type", default="auto",
              type=click.Choice(["color_only", "shape_only", "redundant", "auto"]))
@click.option("--n", required=True, type=click.IntRange(2, 10))
@click.option("--k", "k_out", default=10, type=click.IntRange(1, 100))
@click.option("--seed", default=0, type=int)
@click.option("--evidence", "evidence_dir", type=click.Path(exists=True))
@click.option("--trials", "trials_file", type=click.Path(exists=True))
@click.option("--config", "config_file", type=click.Path(exists=True))
@click.option("--require-color", multiple=True, type=int)
@click.option("--require-shape", multiple=True, type=int)
@click.option("--exclude-color", multiple=True, type=int)
@click.option("--exclude-shape", multiple=True, type=int)
def generate(enc_type, n, k_out, seed, evidence_dir, trials_file, config_file,
             require_color, require_shape, exclude_color, exclude_shape):
    """Generate ranked palettes for N categories."""
    cfg = load_config(config_file)
    try:
        model = _load_model(evidence_dir, trials_file, cfg.min_trials)
        pool, shapes = catalog.load_default_pools()
        constraints = _build_constraints(require_color, require_shape,
                                         exclude_color, exclude_shape)
        note = None
        if enc_type == "auto":
            enc_type, note = cfg.auto_encoding[n]
            if note:
                click.echo(f"note: auto-selected {enc_type} ({note})", err=True)
        if enc_type == "redundant":
            ctx = ScoringContext(model, pool, shapes, cfg.weights)
            results = generate_redundant(n, ctx, constraints, k_out, seed)
        else:
            axis = "color" if enc_type == "color_only" else "shape"
            results = generate_single_channel(n, axis, model, constraints,
                                              k_out, seed)
        payload = {"palettes": [r.to_dict(pool, shapes) for r in results]}
        if note:
            payload["note"] = note
        click.echo(json.dumps(payload, indent=1))
    except PalettekitError as exc:
        _fail(str(exc))


@main.command()
@click.option("--palette-file", required=True, type=click.Path(exists=True),
              help="JSON file holding one serialized scored palette")
@click.option("--position", required=True, type=int)
@click.option("--evidence", "evidence_dir", type=click.Path(exists=True))
@click.option("--trials", "trials_file", type=click.Path(exists=True))
@click.option("--config", "config_file", type=click.Path(exists=True))
@click.option("--exclude-color", multiple=True, type=int)
@click.option("--exclude-shape", multiple=True, type=int)
def swap(palette_file, position, evidence_dir, trials_file, config_file,
         exclude_color, exclude_shape):
    """Swap out one palette entry for the next-best alternative."""
    cfg = load_config(config_file)
    try:
        data = json.loads(Path(palette_file).read_text())
        enc = Encoding(data["encoding"])
        markers = tuple(Marker(e.get("color_id"), e.get("shape_id"))
                        for e in data["entries"])
        palette = Palette(enc, markers)
        model = _load_model(evidence_dir, trials_file, cfg.min_trials)
        pool, shapes = catalog.load_default_pools()
        ctx = ScoringContext(model, pool, shapes, cfg.weights)
        constraints = _build_constraints((), (), exclude_color, exclude_shape)
        from .optimizer import _score_any
        scored = _score_any(palette, ctx)
        updated, new_constraints = swap_element(scored, position, constraints, ctx)
        click.echo(json.dumps({
            "palette": updated.to_dict(pool, shapes),
            "excluded_colors": sorted(new_constraints.excluded_colors),
            "excluded_shapes": sorted(new_constraints.excluded_shapes),
        }, indent=1))
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        _fail(f"bad palette file: {exc}")
    except PalettekitError as exc:
        _fail(str(exc))


@main.command()
@click.argument("trials_file", type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def ingest(trials_file, out_dir):
    """Build all accuracy matrices from a trial log into a directory."""
    try:
        pool, shapes = catalog.load_default_pools()
        records = evidence.ingest_trials(trials_file, len(pool.entries),
                                         len(shapes.entries))
        model = ModelEvidence.from_trials(records)
        model.save_dir(out_dir)
        click.echo(f"ingested {len(records)} trials into {out_dir}")
    except PalettekitError as exc:
        _fail(str(exc))


@main.command()
@click.option("--axis", required=True,
              type=click.Choice(["color", "shape", "marker"]))
@click.option("--bin", "bin_name", default="all",
              type=click.Choice(["small", "medium", "large", "all"]))
@click.option("--evidence", "evidence_dir", type=click.Path(exists=True))
@click.option("--trials", "trials_file", type=click.Path(exists=True))
@click.option("--format", "fmt", default="table",
              type=click.Choice(["table", "json"]))
def matrix(axis, bin_name, evidence_dir, trials_file, fmt):
    """Print a pairwise accuracy matrix."""
    try:
        model = _load_model(evidence_dir, trials_file, 1)
        b = _bin_option(bin_name)
        m = model.matrices.get((axis, b))
        if m is None:
            _fail(f"no {axis}/{bin_name} matrix in the evidence")
        click.echo(m.to_table() if fmt == "table" else json.dumps(m.to_dict()))
    except PalettekitError as exc:
        _fail(str(exc))


@main.command()
@click.option("--n", required=True, type=click.IntRange(2, 10))
@click.option("--seed", default=0, type=int)
@click.option("--palette-file", type=click.Path(exists=True))
@click.option("--engagement", is_flag=True,
              help="generate an easy engagement-check stimulus instead")
@click.option("--out", "out_file", type=click.Path())
def stim(n, seed, palette_file, engagement, out_file):
    """Render one stimulus scatterplot as SVG."""
    try:
        pool, shapes = catalog.load_default_pools()
        palette = None
        if palette_file:
            data = json.loads(Path(palette_file).read_text())
            palette = Palette(Encoding(data["encoding"]),
                              tuple(Marker(e.get("color_id"), e.get("shape_id"))
                                    for e in data["entries"]))
        spec = stimgen.StimulusSpec(n=n, seed=seed)
        gen = stimgen.gen_engagement_check if engagement else stimgen.gen_stimulus
        svg = stimgen.render_svg(gen(spec, palette), shapes, pool)
        if out_file:
            Path(out_file).write_text(svg)
            click.echo(f"wrote {out_file}")
        else:
            click.echo(svg)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        _fail(f"bad palette file: {exc}")
    except PalettekitError as exc:
        _fail(str(exc))


@main.command()
@click.option("--experiment", required=True,
              type=click.Choice(["E1", "E2", "E3", "E4"]))
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_file", type=click.Path())
def plan(experiment, seed, out_file):
    """Emit the stimulus-design manifest for one experiment layout."""
    try:
        p = stimgen.build_plan(experiment, seed)
        text = json.dumps(p.to_dict(), indent=1)
        if out_file:
            Path(out_file).write_text(text + "\n")
            click.echo(f"wrote {p.size} designs to {out_file}")
        else:
            click.echo(text)
    except PalettekitError as exc:
        _fail(str(exc))


@main.command()
@click.option("--evidence", "evidence_dir", type=click.Path(exists=True))
def validate(evidence_dir):
    """Validate the bundled pools (and optionally an evidence directory)."""
    try:
        pool, shapes = catalog.load_default_pools()
        click.echo(f"color pool: {len(pool.entries)} entries ok")
        click.echo(f"shape catalog: {len(shapes.entries)} entries ok")
        if evidence_dir:
            model = ModelEvidence.load_dir(evidence_dir)
            for (axis, b), m in sorted(model.matrices.items(),
                                       key=lambda kv: (kv[0][0], str(kv[0][1]))):
                name = b.value if b else "all"
                cells = int((m.trials > 0).sum() // 2)
                click.echo(f"matrix {axis}/{name}: {m.n} labels, {cells} cells")
    except PalettekitError as exc:
        _fail(str(exc))


@main.command()
@click.option("--trials", "trials_file", required=True, type=click.Path(exists=True))
@click.option("--samples-per-n", default=50, type=int)
@click.option("--repeats", default=3, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--min-trials", default=DEFAULT_MIN_TRIALS, type=int)
def report(trials_file, samples_per_n, repeats, seed, min_trials):
    """Rank-vs-accuracy validation report from a trial log."""
    try:
        records = evidence.ingest_trials(trials_file)
        model = ModelEvidence.from_trials(records, min_trials)

        def score(key):
            n = len(key)
            vals = []
            for i in range(n - 1):
                for j in range(i + 1, n):
                    a, b = key[i], key[j]
                    if a[0] is not None and a[1] is not None:
                        vals.append(model.pair_value("marker", n, a, b))
                    elif a[0] is not None:
                        vals.append(model.pair_value("color", n, a[0], b[0]))
                    else:
                        vals.append(model.pair_value("shape", n, a[1], b[1]))
            return sum(vals) / len(vals)

        rep = analysis.rank_validation(score, records, samples_per_n, repeats, seed)
        click.echo(json.dumps({
            "correlation": rep.correlation,
            "samples_per_n": rep.samples_per_n,
            "repeats": rep.repeats,
            "per_rank_mean": list(rep.per_rank_mean),
            "per_rank_ci": [list(ci) for ci in rep.per_rank_ci],
        }, indent=1))
    except PalettekitError as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
