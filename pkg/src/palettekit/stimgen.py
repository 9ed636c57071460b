"""Correlation-constrained scatterplot stimuli, SVG rendering, experiment plans.

Every stimulus is pure given (spec, seed). Batch generation derives the
per-stimulus seed as `base_seed * 100003 + index`, so plans can be generated
in parallel without sharing RNG state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import ShapeCatalog
from .errors import GenerationFailureError, InvalidArgumentError
from .optimizer import Encoding, Palette

R_TOLERANCE = 0.02
ENGAGEMENT_GAP = 0.4
DISTRACTOR_FLOOR = -0.2
SEED_STRIDE = 100003  # prime stride for per-stimulus seed splitting


@dataclass(frozen=True)
class StimulusSpec:
    n: int
    points_per_category: int = 20
    target_r_range: tuple = (0.8, 0.95)
    runner_up_gap: float = 0.2
    plot_px: tuple = (400, 400)
    mark_px: int = 6
    ticks_per_axis: int = 13
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.n <= 10:
            raise InvalidArgumentError(f"n={self.n} outside [2, 10]")
        lo, hi = self.target_r_range
        if not (-1.0 < lo <= hi < 1.0):
            raise InvalidArgumentError("target_r_range must sit inside (-1, 1)")
        if self.runner_up_gap <= 0:
            raise InvalidArgumentError("runner_up_gap must be positive")
        if self.points_per_category < 3:
            raise InvalidArgumentError("need at least 3 points per category")


@dataclass(frozen=True)
class StimulusData:
    spec: StimulusSpec
    palette: Palette | None
    points: tuple          # per-category (count, 2) data-unit arrays
    sample_r: tuple        # per-category sample Pearson r
    target_index: int
    pixels: tuple          # per-category (count, 2) pixel positions, post-jitter

    @property
    def n(self) -> int:
        return self.spec.n


def sample_pearson(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return float(np.corrcoef(x, y)[0, 1])


def gen_correlated_points(r_target: float, count: int,
                          seed: int | np.random.Generator,
                          tolerance: float = R_TOLERANCE,
                          max_attempts: int = 1000) -> np.ndarray:
    """Bivariate-normal sample whose Pearson r lands within tolerance of
    r_target. Rejection-sampled; raises after max_attempts misses."""
    if not -1.0 < r_target < 1.0:
        raise InvalidArgumentError(f"r_target={r_target} outside (-1, 1)")
    if count < 3:
        raise InvalidArgumentError("count must be >= 3")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cov = np.array([[1.0, r_target], [r_target, 1.0]])
    for _ in range(max_attempts):
        pts = rng.multivariate_normal([0.0, 0.0], cov, size=count)
        if abs(sample_pearson(pts) - r_target) <= tolerance:
            return pts
    raise GenerationFailureError(
        f"could not hit r={r_target}±{tolerance} in {max_attempts} attempts")


def _gen_category_set(spec: StimulusSpec, rng: np.random.Generator,
                      gap: float) -> tuple[tuple, tuple, int]:
    lo, hi = spec.target_r_range
    target_r = float(rng.uniform(lo, hi))
    target_index = int(rng.integers(spec.n))
    target_pts = gen_correlated_points(target_r, spec.points_per_category, rng)
    target_sample = sample_pearson(target_pts)

    points: list = [None] * spec.n
    rs: list = [0.0] * spec.n
    points[target_index] = target_pts
    rs[target_index] = target_sample
    ceiling = target_sample - gap + R_TOLERANCE
    for i in range(spec.n):
        if i == target_index:
            continue
        for _ in range(100):
            r_d = float(rng.uniform(DISTRACTOR_FLOOR, target_r - gap))
            pts = gen_correlated_points(r_d, spec.points_per_category, rng)
            r_s = sample_pearson(pts)
            # distractor must stay clearly below the target's *sample* r
            if r_s <= ceiling:
                points[i] = pts
                rs[i] = r_s
                break
        else:
            raise GenerationFailureError(
                f"distractor {i} could not satisfy the correlation gap")
    return tuple(points), tuple(rs), target_index


# ---------------------------------------------------------------------------
# Pixel mapping and overlap jitter
# ---------------------------------------------------------------------------

MARGIN_PX = 20
PCT_LO, PCT_HI = 5.0, 95.0

def _to_pixels(points: tuple, plot_px: tuple) -> np.ndarray:
    """Map data coordinates to the drawing area: the 5th-95th percentile of
    each axis spans the plot minus 20 px margins."""
    all_pts = np.vstack(points)
    w, h = plot_px
    out = np.empty_like(all_pts)
    for axis, extent in ((0, w), (1, h)):
        lo = np.percentile(all_pts[:, axis], PCT_LO)
        hi = np.percentile(all_pts[:, axis], PCT_HI)
        span = hi - lo if hi > lo else 1.0
        out[:, axis] = MARGIN_PX + (all_pts[:, axis] - lo) / span * (extent - 2 * MARGIN_PX)
    out[:, 1] = h - out[:, 1]  # SVG y grows downward
    half = 3.0
    out[:, 0] = np.clip(out[:, 0], half, w - half)
    out[:, 1] = np.clip(out[:, 1], half, h - half)
    return out


def _overlapping_pairs(px: np.ndarray, mark_px: int) -> list:
    d = np.abs(px[:, None, :] - px[None, :, :])
    hit = (d[..., 0] < mark_px) & (d[..., 1] < mark_px)
    ii, jj = np.where(np.triu(hit, k=1))
    return list(zip(ii.tolist(), jj.tolist()))


def _resolve_overlaps(px: np.ndarray, mark_px: int, plot_px: tuple,
                      max_passes: int = 400) -> np.ndarray:
    """Deterministic relaxation jitter: every overlapping pair is pushed
    apart along the axis needing the least separation, 1 px per side, with
    per-point displacement capped at 2 px per pass. Iterates (pairs visited
    in index order) until no two mark bounding boxes intersect."""
    px = px.copy()
    w, h = plot_px
    half = mark_px / 2.0
    for _ in range(max_passes):
        pairs = _overlapping_pairs(px, mark_px)
        if not pairs:
            return px
        shift = np.zeros_like(px)
        for i, j in pairs:
            d = px[j] - px[i]
            need = mark_px - np.abs(d)
            axis = 0 if need[0] <= need[1] else 1
            sign = 1.0 if d[axis] > 0 else -1.0 if d[axis] < 0 else 1.0
            shift[j, axis] += sign
            shift[i, axis] -= sign
        np.clip(shift, -2.0, 2.0, out=shift)
        px += shift
        px[:, 0] = np.clip(px[:, 0], half, w - half)
        px[:, 1] = np.clip(px[:, 1], half, h - half)
    raise GenerationFailureError("could not resolve mark overlaps by jitter")


def _build_stimulus(spec: StimulusSpec, palette: Palette | None,
                    gap: float) -> StimulusData:
    if palette is not None and palette.n != spec.n:
        raise InvalidArgumentError(
            f"palette has {palette.n} entries but spec.n={spec.n}")
    rng = np.random.default_rng(spec.seed)
    points, rs, target_index = _gen_category_set(spec, rng, gap)
    flat = _to_pixels(points, spec.plot_px)
    flat = _resolve_overlaps(flat, spec.mark_px, spec.plot_px)
    k = spec.points_per_category
    pixels = tuple(flat[i * k:(i + 1) * k] for i in range(spec.n))
    return StimulusData(spec, palette, points, rs, target_index, pixels)


def gen_stimulus(spec: StimulusSpec, palette: Palette | None = None) -> StimulusData:
    """Stimulus whose target category's r beats every other by runner_up_gap."""
    return _build_stimulus(spec, palette, spec.runner_up_gap)


def gen_engagement_check(spec: StimulusSpec, palette: Palette | None = None
                         ) -> StimulusData:
    """Easy trial: correlation gap of at least 0.4 between top two categories."""
    if spec.n not in (2, 3):
        raise InvalidArgumentError("engagement checks use 2 or 3 categories")
    return _build_stimulus(spec, palette, ENGAGEMENT_GAP)


def verify_stimulus(stim: StimulusData, gap: float | None = None) -> bool:
    """Independent check: recompute every sample correlation with the plain
    Pearson formula and re-test all constraints."""
    spec = stim.spec
    gap = spec.runner_up_gap if gap is None else gap
    lo, hi = spec.target_r_range
    for i, pts in enumerate(stim.points):
        if len(pts) != spec.points_per_category:
            return False
        x = np.asarray(pts)[:, 0]
        y = np.asarray(pts)[:, 1]
        xm, ym = x - x.mean(), y - y.mean()
        r = float((xm * ym).sum() / np.sqrt((xm ** 2).sum() * (ym ** 2).sum()))
        if abs(r - stim.sample_r[i]) > 1e-9:
            return False
        if i == stim.target_index:
            if not (lo - R_TOLERANCE <= r <= hi + R_TOLERANCE):
                return False
        elif r > stim.sample_r[stim.target_index] - gap + R_TOLERANCE:
            return False
    # no two mark boxes intersect
    flat = np.vstack(stim.pixels)
    for i in range(len(flat) - 1):
        d = np.abs(flat[i + 1:] - flat[i])
        if ((d[:, 0] < spec.mark_px) & (d[:, 1] < spec.mark_px)).any():
            return False
    return True


# ---------------------------------------------------------------------------
# SVG rendering
# ---------------------------------------------------------------------------

_AXIS_INSET = 0.5  # keep 1px axis strokes crisp


def _tick_positions(extent: float, count: int) -> list:
    return [MARGIN_PX + i * (extent - 2 * MARGIN_PX) / (count - 1)
            for i in range(count)]


def _mark_svg(x: float, y: float, glyph_path: str, fill_class: str,
              hex_color: str, mark_px: int) -> str:
    # glyph paths live in a unit box; scale to mark size, center on the point
    half = mark_px / 2.0
    transform = f"translate({x - half:.1f},{y - half:.1f}) scale({mark_px})"
    if fill_class == "filled":
        style = f'fill="{hex_color}" stroke="none"'
    elif fill_class == "unfilled":
        style = f'fill="#ffffff" stroke="{hex_color}" stroke-width="0.22"'
    else:  # open strokes
        style = (f'fill="none" stroke="{hex_color}" stroke-width="0.22" '
                 'stroke-linecap="round"')
    return (f'<path class="mark" d="{glyph_path}" transform="{transform}" '
            f'{style}/>')


def render_svg(stim: StimulusData, catalog: ShapeCatalog | None = None,
               pool=None) -> str:
    """Deterministic SVG 1.1 scatterplot: white ground, two black axes with
    unlabeled ticks, one 6x6 glyph per point."""
    spec = stim.spec
    w, h = spec.plot_px
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" version="1.1">',
        f'<rect width="{w}" height="{h}" fill="#ffffff"/>',
    ]
    x0 = MARGIN_PX - 10 + _AXIS_INSET
    y0 = h - MARGIN_PX + 10 + _AXIS_INSET
    parts.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{w - MARGIN_PX}" '
                 f'y2="{y0}" stroke="#000000"/>')
    parts.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" '
                 f'y2="{MARGIN_PX}" stroke="#000000"/>')
    for tx in _tick_positions(w, spec.ticks_per_axis):
        parts.append(f'<line class="tick" x1="{tx:.1f}" y1="{y0}" x2="{tx:.1f}" '
                     f'y2="{y0 + 5}" stroke="#000000"/>')
    for ty in _tick_positions(h, spec.ticks_per_axis):
        parts.append(f'<line class="tick" x1="{x0}" y1="{h - ty:.1f}" '
                     f'x2="{x0 - 5}" y2="{h - ty:.1f}" stroke="#000000"/>')

    circle = "M 0.5 0.05 A 0.45 0.45 0 1 1 0.4999 0.05 Z"
    for ci in range(spec.n):
        hex_color = "#000000"
        glyph, fill_class = circle, "filled"
        if stim.palette is not None:
            marker = stim.palette.entries[ci]
            if marker.color_id is not None and pool is not None:
                hex_color = pool.by_id[marker.color_id].hex
            if marker.shape_id is not None and catalog is not None:
                shape = catalog.by_id[marker.shape_id]
                glyph, fill_class = shape.glyph, shape.fill_class
        for x, y in stim.pixels[ci]:
            parts.append(_mark_svg(float(x), float(y), glyph, fill_class,
                                   hex_color, spec.mark_px))
    parts.append("</svg>")
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# Experiment plans
# ---------------------------------------------------------------------------

CATEGORY_COUNTS = tuple(range(2, 11))  # 9 counts
ENCODING_TYPES = ("color_only", "shape_only", "redundant")


@dataclass(frozen=True)
class ExperimentPlan:
    experiment_id: str
    designs: tuple          # design descriptor dicts, each carrying group_id
    n_groups: int
    engagement_checks: tuple = ()

    @property
    def size(self) -> int:
        return len(self.designs)

    def group(self, gid: int) -> list:
        return [d for d in self.designs if d["group_id"] == gid]

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "experiment_id": self.experiment_id,
            "n_groups": self.n_groups,
            "designs": list(self.designs),
            "engagement_checks": list(self.engagement_checks),
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")


def _with_seeds(designs: list, base_seed: int) -> tuple:
    for i, d in enumerate(designs):
        d["seed"] = base_seed * SEED_STRIDE + i
    return tuple(designs)


def _engagement_checks(n_groups: int, base_seed: int) -> tuple:
    checks = []
    for g in range(n_groups):
        for n in (2, 3):
            checks.append({"group_id": g, "n": n,
                           "seed": (base_seed + 1) * SEED_STRIDE + g * 2 + (n - 2)})
    return tuple(checks)


def build_plan(experiment: str, seed: int = 0) -> ExperimentPlan:
    """Stimulus-design manifests for the four experiment layouts.

    E1: 3 encodings x 20 sets x 9 counts = 540, 10 groups of 54 (each group
        sees 2 sets of every encoding-count combination).
    E2: 24 palettes x 10 stimuli = 240, 5 groups of 48 (all 24 palettes,
        two stimuli each).
    E3: 90 color combinations x 9 counts = 810, 15 groups of 54.
    E4: per-count assignment permutations (all 2 for n=2, all 6 for n=3,
        13 for n>=4; 99 total) x 9 stimuli = 891, 15 groups of 59-60.
    """
    designs: list = []
    if experiment == "E1":
        for set_id in range(20):
            for enc in ENCODING_TYPES:
                for n in CATEGORY_COUNTS:
                    designs.append({"experiment": "E1", "encoding": enc,
                                    "set_id": set_id, "n": n,
                                    "group_id": set_id % 10})
        n_groups = 10
    elif experiment == "E2":
        for palette_id in range(24):
            for rep in range(10):
                designs.append({"experiment": "E2", "palette_id": palette_id,
                                "stimulus_rep": rep, "n": 6,
                                "group_id": rep % 5})
        n_groups = 5
    elif experiment == "E3":
        for combo_id in range(90):
            for n in CATEGORY_COUNTS:
                designs.append({"experiment": "E3", "combo_id": combo_id,
                                "n": n, "group_id": combo_id % 15})
        n_groups = 15
    elif experiment == "E4":
        idx = 0
        for n in CATEGORY_COUNTS:
            n_perms = 2 if n == 2 else 6 if n == 3 else 13
            for perm_id in range(n_perms):
                for rep in range(9):
                    designs.append({"experiment": "E4", "n": n,
                                    "permutation_id": perm_id,
                                    "stimulus_rep": rep,
                                    "group_id": idx % 15})
                    idx += 1
        n_groups = 15
    else:
        raise InvalidArgumentError(f"unknown experiment {experiment!r}")
    return ExperimentPlan(experiment, _with_seeds(designs, seed), n_groups,
                          _engagement_checks(n_groups, seed))
