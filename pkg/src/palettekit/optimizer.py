"""Palette generation: scoring, ranking, constraints, diversification, swaps.

Scores always land in [0, 1]. Generation is deterministic given (inputs,
seed, weights); ranked output is sorted by (score desc, canonical key) so
ties break identically everywhere.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from math import comb, factorial

import numpy as np

from ._kernels import ciede2000_pairs, subset_pair_mean
from .catalog import ColorPool, ShapeCatalog
from .colorlab import LabColor, ciede2000, lab_in_gamut_array
from .config import ScoringWeights
from .errors import (ConstraintError, ExhaustedAlternativesError, InvalidArgumentError,
                     MissingEvidenceError)
from .evidence import CategoryBin, Marker, MarkerAccuracyTable, PairMatrix, bin_of

log = logging.getLogger(__name__)


class Encoding(str, Enum):
    COLOR_ONLY = "color_only"
    SHAPE_ONLY = "shape_only"
    REDUNDANT = "redundant"


@dataclass(frozen=True)
class Palette:
    encoding: Encoding
    entries: tuple[Marker, ...]

    def __post_init__(self):
        if len(set(self.entries)) != len(self.entries):
            raise InvalidArgumentError("palette entries must be distinct")
        if self.encoding is Encoding.REDUNDANT:
            colors = [m.color_id for m in self.entries]
            shapes = [m.shape_id for m in self.entries]
            if any(c is None for c in colors) or any(s is None for s in shapes):
                raise InvalidArgumentError("redundant palette entries need both ids")
            if len(set(colors)) != len(colors) or len(set(shapes)) != len(shapes):
                raise InvalidArgumentError("redundant palette repeats a color or shape")
        elif self.encoding is Encoding.COLOR_ONLY:
            if any(m.color_id is None or m.shape_id is not None for m in self.entries):
                raise InvalidArgumentError("color-only palette entries carry only color ids")
        else:
            if any(m.shape_id is None or m.color_id is not None for m in self.entries):
                raise InvalidArgumentError("shape-only palette entries carry only shape ids")

    @property
    def n(self) -> int:
        return len(self.entries)

    def key(self) -> tuple:
        """Canonical order-independent identity (orderable even with None ids)."""
        return tuple(sorted(((-1 if m.color_id is None else m.color_id,
                              -1 if m.shape_id is None else m.shape_id)
                             for m in self.entries)))


@dataclass(frozen=True)
class ScoredPalette:
    palette: Palette
    score: float
    components: dict
    rank: int = 0

    def to_dict(self, pool: ColorPool | None = None,
                catalog: ShapeCatalog | None = None) -> dict:
        entries = []
        for m in self.palette.entries:
            e: dict = {}
            if m.color_id is not None:
                e["color_id"] = m.color_id
                if pool is not None:
                    e["hex"] = pool.by_id[m.color_id].hex
            if m.shape_id is not None:
                e["shape_id"] = m.shape_id
                if catalog is not None:
                    e["shape"] = catalog.by_id[m.shape_id].name
            entries.append(e)
        return {
            "encoding": self.palette.encoding.value,
            "n": self.palette.n,
            "entries": entries,
            "score": self.score,
            "components": dict(self.components),
            "rank": self.rank,
        }


@dataclass(frozen=True)
class Constraints:
    required_colors: frozenset = frozenset()
    required_shapes: frozenset = frozenset()
    required_markers: frozenset = frozenset()  # (color_id, shape_id) pairs
    excluded_colors: frozenset = frozenset()
    excluded_shapes: frozenset = frozenset()
    candidate_colors: frozenset | None = None
    candidate_shapes: frozenset | None = None

    def __post_init__(self):
        for f_name in ("required_colors", "required_shapes", "required_markers",
                       "excluded_colors", "excluded_shapes"):
            object.__setattr__(self, f_name, frozenset(getattr(self, f_name)))
        for f_name in ("candidate_colors", "candidate_shapes"):
            v = getattr(self, f_name)
            if v is not None:
                object.__setattr__(self, f_name, frozenset(v))
        if self.required_colors & self.excluded_colors:
            raise ConstraintError("a color is both required and excluded")
        if self.required_shapes & self.excluded_shapes:
            raise ConstraintError("a shape is both required and excluded")
        for c, s in self.required_markers:
            if c in self.excluded_colors or s in self.excluded_shapes:
                raise ConstraintError(f"required marker ({c},{s}) uses an excluded element")

    def all_required_colors(self) -> frozenset:
        return self.required_colors | frozenset(c for c, _ in self.required_markers)

    def all_required_shapes(self) -> frozenset:
        return self.required_shapes | frozenset(s for _, s in self.required_markers)

    def with_excluded(self, color_id: int | None = None,
                      shape_id: int | None = None) -> "Constraints":
        return Constraints(
            self.required_colors, self.required_shapes, self.required_markers,
            self.excluded_colors | ({color_id} if color_id is not None else set()),
            self.excluded_shapes | ({shape_id} if shape_id is not None else set()),
            self.candidate_colors, self.candidate_shapes)

    def satisfied_by(self, palette: Palette) -> bool:
        colors = {m.color_id for m in palette.entries} - {None}
        shapes = {m.shape_id for m in palette.entries} - {None}
        markers = {(m.color_id, m.shape_id) for m in palette.entries
                   if m.color_id is not None and m.shape_id is not None}
        if palette.encoding is not Encoding.SHAPE_ONLY:
            if not self.required_colors <= colors or colors & self.excluded_colors:
                return False
            if self.candidate_colors is not None and not colors <= self.candidate_colors:
                return False
        if palette.encoding is not Encoding.COLOR_ONLY:
            if not self.required_shapes <= shapes or shapes & self.excluded_shapes:
                return False
            if self.candidate_shapes is not None and not shapes <= self.candidate_shapes:
                return False
        if palette.encoding is Encoding.REDUNDANT and not self.required_markers <= markers:
            return False
        return True


class ModelEvidence:
    """Bin-stratified matrices plus marker tables, with all-bin fallback."""

    def __init__(self, matrices: dict, marker_tables: dict | None = None,
                 min_trials: int = 1):
        # matrices: {(axis, bin-or-None): PairMatrix}
        self.matrices = dict(matrices)
        self.marker_tables = dict(marker_tables or {})
        self.min_trials = min_trials

    @classmethod
    def from_trials(cls, trials, min_trials: int = 1,
                    color_labels=None, shape_labels=None) -> "ModelEvidence":
        from .evidence import marker_accuracy, pairwise_accuracy
        matrices = {}
        tables = {}
        for b in [None, *CategoryBin]:
            matrices[("color", b)] = pairwise_accuracy(trials, "color", b, color_labels)
            matrices[("shape", b)] = pairwise_accuracy(trials, "shape", b, shape_labels)
            matrices[("marker", b)] = pairwise_accuracy(trials, "marker", b)
            tables[b] = marker_accuracy(trials, b)
        return cls(matrices, tables, min_trials)

    @classmethod
    def from_matrices(cls, color: PairMatrix | None = None,
                      shape: PairMatrix | None = None,
                      marker: PairMatrix | None = None,
                      marker_table: MarkerAccuracyTable | None = None,
                      min_trials: int = 1) -> "ModelEvidence":
        matrices = {}
        if color is not None:
            matrices[("color", None)] = color
        if shape is not None:
            matrices[("shape", None)] = shape
        if marker is not None:
            matrices[("marker", None)] = marker
        tables = {None: marker_table} if marker_table is not None else {}
        return cls(matrices, tables, min_trials)

    def save_dir(self, path) -> None:
        """Write every matrix/table to a directory as versioned JSON files."""
        from pathlib import Path
        d = Path(path)
        d.mkdir(parents=True, exist_ok=True)
        for (axis, b), matrix in self.matrices.items():
            name = b.value if b else "all"
            matrix.save(d / f"{axis}_{name}.json")
        for b, table in self.marker_tables.items():
            name = b.value if b else "all"
            table.save(d / f"markers_{name}.json")

    @classmethod
    def load_dir(cls, path, min_trials: int = 1) -> "ModelEvidence":
        from pathlib import Path
        d = Path(path)
        matrices = {}
        tables = {}
        for axis in ("color", "shape", "marker"):
            for b in [None, *CategoryBin]:
                name = b.value if b else "all"
                f = d / f"{axis}_{name}.json"
                if f.exists():
                    matrices[(axis, b)] = PairMatrix.load(f)
        for b in [None, *CategoryBin]:
            name = b.value if b else "all"
            f = d / f"markers_{name}.json"
            if f.exists():
                tables[b] = MarkerAccuracyTable.load(f)
        if not matrices:
            from .errors import DataLoadError
            raise DataLoadError(f"no evidence matrices found under {d}")
        return cls(matrices, tables, min_trials)

    def pair_value(self, axis: str, n: int, key_i, key_j) -> float:
        b = bin_of(n)
        for source in (self.matrices.get((axis, b)), self.matrices.get((axis, None))):
            if source is not None:
                v = source.cell(key_i, key_j, self.min_trials)
                if v is not None:
                    return v
        raise MissingEvidenceError(
            f"no {axis} evidence for pair ({key_i}, {key_j}) at n={n}",
            pair=(key_i, key_j))

    def marker_value(self, n: int, key) -> float:
        b = bin_of(n)
        for source in (self.marker_tables.get(b), self.marker_tables.get(None)):
            if source is not None:
                v = source.get(key, self.min_trials)
                if v is not None:
                    return v
        raise MissingEvidenceError(f"no individual-marker evidence for {key} at n={n}",
                                   pair=key)

    def dense(self, axis: str, n: int, ids: list) -> np.ndarray:
        """(p, p) accuracy array over `ids` with NaN in unusable cells."""
        p = len(ids)
        out = np.full((p, p), np.nan)
        for a in range(p - 1):
            for b_ in range(a + 1, p):
                try:
                    v = self.pair_value(axis, n, ids[a], ids[b_])
                except MissingEvidenceError:
                    continue
                out[a, b_] = out[b_, a] = v
        return out


# ---------------------------------------------------------------------------
# Single-channel scoring and generation
# ---------------------------------------------------------------------------

def score_subset(ids: list, matrix: PairMatrix, min_trials: int = 1) -> float:
    """Mean pairwise accuracy over all C(|ids|, 2) pairs."""
    if len(ids) < 2:
        raise InvalidArgumentError("need at least 2 ids to score a subset")
    total = 0.0
    count = 0
    for a, b in itertools.combinations(ids, 2):
        v = matrix.cell(a, b, min_trials)
        if v is None:
            raise MissingEvidenceError(f"no evidence for pair ({a}, {b})", pair=(a, b))
        total += v
        count += 1
    return total / count


_COMBO_CACHE: dict = {}


def _combo_array(m: int, r: int) -> np.ndarray:
    """All r-combinations of range(m) as an (C(m,r), r) array, memoized:
    every half-pool repetition of the same size reuses one array."""
    key = (m, r)
    out = _COMBO_CACHE.get(key)
    if out is None:
        if r:
            out = np.array(list(itertools.combinations(range(m), r)), dtype=np.int64)
        else:
            out = np.empty((1, 0), np.int64)
        _COMBO_CACHE[key] = out
    return out


def _half_pool_combos(free_ids: list, n_free: int, rng: np.random.Generator,
                      reps: int, enum_cap: int, sample_cap: int):
    """Candidate id-combinations per the half-pool repetition scheme."""
    # at least n_free so small candidate universes stay feasible
    half = min(len(free_ids), max(-(-len(free_ids) // 2), n_free))
    for _ in range(reps):
        pick = sorted(rng.choice(len(free_ids), size=half, replace=False).tolist())
        sub = [free_ids[i] for i in pick]
        if n_free > len(sub):
            continue
        if comb(len(sub), n_free) <= enum_cap:
            combos = _combo_array(len(sub), n_free)
            yield sub, combos
        else:
            seen = set()
            rows = []
            for _ in range(sample_cap):
                c = tuple(sorted(rng.choice(len(sub), size=n_free, replace=False).tolist()))
                if c not in seen:
                    seen.add(c)
                    rows.append(c)
            yield sub, np.array(rows, dtype=np.int64)


def generate_single_channel(n: int, axis: str, model: ModelEvidence,
                            constraints: Constraints | None = None,
                            k_out: int = 10, seed: int = 0, reps: int = 10,
                            enum_cap: int = 500_000,
                            sample_cap: int = 100_000) -> list[ScoredPalette]:
    """Ranked color-only or shape-only palettes for n categories.

    Repeatedly samples half the candidate pool, enumerates (or beam-samples)
    n-subsets containing every required id, and keeps the best by mean
    pairwise accuracy.
    """
    if not 2 <= n <= 10:
        raise InvalidArgumentError(f"n={n} outside [2, 10]")
    if axis not in ("color", "shape"):
        raise InvalidArgumentError(f"axis must be color or shape, not {axis!r}")
    constraints = constraints or Constraints()

    matrix = (model.matrices.get((axis, bin_of(n)))
              or model.matrices.get((axis, None)))
    if matrix is None:
        raise MissingEvidenceError(f"no {axis} matrix available")
    universe = [l for l in matrix.labels]
    if axis == "color":
        required = sorted(constraints.all_required_colors())
        excluded = constraints.excluded_colors
        candidates = constraints.candidate_colors
    else:
        required = sorted(constraints.all_required_shapes())
        excluded = constraints.excluded_shapes
        candidates = constraints.candidate_shapes
    pool_ids = [i for i in universe if i not in excluded
                and (candidates is None or i in candidates)]
    missing_req = [r for r in required if r not in pool_ids]
    if missing_req:
        raise ConstraintError(f"required {axis} ids {missing_req} not in the candidate pool")
    if len(required) > n:
        raise ConstraintError(f"{len(required)} required {axis} ids exceed n={n}")
    if len(pool_ids) < n:
        raise ConstraintError(f"candidate pool of {len(pool_ids)} cannot fill n={n}")

    free_ids = [i for i in pool_ids if i not in required]
    n_free = n - len(required)
    dense = model.dense(axis, n, pool_ids)
    pos = {cid: i for i, cid in enumerate(pool_ids)}
    req_pos = np.array([pos[r] for r in required], dtype=np.int64)

    rng = np.random.default_rng(seed)
    best: dict[tuple, float] = {}
    for sub, combos in _half_pool_combos(free_ids, n_free, rng, reps, enum_cap, sample_cap):
        if n_free and combos.size == 0:
            continue
        sub_pos = np.array([pos[i] for i in sub], dtype=np.int64)
        full = np.empty((len(combos), n), dtype=np.int64)
        if n_free:
            full[:, :n_free] = sub_pos[combos]
        if len(required):
            full[:, n_free:] = req_pos[None, :]
        scores = subset_pair_mean(full, dense)
        valid = ~np.isnan(scores)
        rows, vals = full[valid], scores[valid]
        if len(vals) > k_out:
            # only the batch's top k_out rows can reach the global top k_out
            # (keys within a batch are distinct); keep score ties intact
            kth = np.partition(vals, len(vals) - k_out)[len(vals) - k_out]
            keep = vals >= kth
            rows, vals = rows[keep], vals[keep]
        for row, s in zip(rows, vals):
            key = tuple(sorted(pool_ids[p] for p in row))
            if best.get(key, -1.0) < s:
                best[key] = float(s)
    if not best:
        raise MissingEvidenceError(f"no {axis} subset of size {n} has full pair evidence")

    ranked = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))[:k_out]
    out = []
    for rank, (key, s) in enumerate(ranked, start=1):
        markers = tuple(Marker(color_id=i) if axis == "color" else Marker(shape_id=i)
                        for i in key)
        enc = Encoding.COLOR_ONLY if axis == "color" else Encoding.SHAPE_ONLY
        comp = {f"{axis}_pair_mean": s}
        out.append(ScoredPalette(Palette(enc, markers), s, comp, rank))
    return out


# ---------------------------------------------------------------------------
# Permutation diversification
# ---------------------------------------------------------------------------

def permutation_similarity(p: tuple, q: tuple) -> float:
    """Cosine similarity of the flattened 0/1 assignment matrices:
    (# agreeing positions) / n; 1 iff identical."""
    n = len(p)
    return sum(1 for a, b in zip(p, q) if a == b) / n


def diverse_permutations(n: int, m: int, seed: int = 0,
                         enum_limit: int = 5040) -> list[tuple]:
    """m index permutations of range(n), greedily spread out by min-max
    cosine similarity. All permutations are returned for n <= 3."""
    if n < 2:
        raise InvalidArgumentError("need n >= 2")
    if m < 1:
        raise InvalidArgumentError("need m >= 1")
    total = factorial(n)
    if n <= 3 or m >= total:
        if m > total:
            log.warning("requested %d permutations but only %d exist for n=%d; "
                        "returning all", m, total, n)
        return sorted(itertools.permutations(range(n)))

    if total <= enum_limit:
        candidates = list(itertools.permutations(range(n)))
    else:
        rng = np.random.default_rng(seed)
        seen = {tuple(range(n))}
        while len(seen) < min(enum_limit, total):
            seen.add(tuple(rng.permutation(n).tolist()))
        candidates = sorted(seen)

    identity = tuple(range(n))
    selected = [identity]
    remaining = [c for c in candidates if c != identity]
    arr = np.array(remaining, dtype=np.int64)
    sel = np.array([identity], dtype=np.int64)
    max_sim = (arr == sel[0]).mean(axis=1)
    while len(selected) < m and len(remaining):
        # pick min max-similarity; ties by lexicographic permutation order
        min_val = max_sim.min()
        tied = np.flatnonzero(max_sim <= min_val + 1e-12)
        tied_perms = sorted(tuple(int(x) for x in arr[i]) for i in tied)
        choice = tied_perms[0]
        idx = next(i for i in tied if tuple(int(x) for x in arr[i]) == choice)
        selected.append(choice)
        keep = np.ones(len(arr), dtype=bool)
        keep[idx] = False
        new_sim = (arr == np.array(choice, dtype=np.int64)[None, :]).mean(axis=1)
        max_sim = np.maximum(max_sim, new_sim)[keep]
        arr = arr[keep]
        remaining = [tuple(r) for r in arr]
    return selected


# ---------------------------------------------------------------------------
# Redundant scoring and generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScoringContext:
    model: ModelEvidence
    pool: ColorPool
    catalog: ShapeCatalog
    weights: ScoringWeights = field(default_factory=ScoringWeights)


def _lightness_variance(color_ids, pool: ColorPool) -> float:
    L = np.array([pool.by_id[c].lab.L for c in color_ids])
    pool_L = pool.labs()[:, 0]
    # max subset variance is bounded by the half-range squared
    denom = ((pool_L.max() - pool_L.min()) / 2.0) ** 2
    if denom <= 0:
        return 0.0
    return float(min(L.var() / denom, 1.0))


def _shape_type_mix(shape_ids, catalog: ShapeCatalog) -> float:
    classes = {catalog.by_id[s].fill_class for s in shape_ids}
    return len(classes) / 3.0


def score_redundant(palette: Palette, ctx: ScoringContext) -> ScoredPalette:
    """Weighted composite score for a redundant palette."""
    if palette.encoding is not Encoding.REDUNDANT:
        raise InvalidArgumentError("score_redundant needs a redundant palette")
    n = palette.n
    markers = [(m.color_id, m.shape_id) for m in palette.entries]
    colors = [m.color_id for m in palette.entries]
    shapes = [m.shape_id for m in palette.entries]
    model = ctx.model

    pair_vals = [model.pair_value("marker", n, a, b)
                 for a, b in itertools.combinations(markers, 2)]
    indiv_vals = [model.marker_value(n, mk) for mk in markers]
    color_vals = [model.pair_value("color", n, a, b)
                  for a, b in itertools.combinations(colors, 2)]
    shape_vals = [model.pair_value("shape", n, a, b)
                  for a, b in itertools.combinations(shapes, 2)]

    components = {
        "marker_pair_mean": float(np.mean(pair_vals)),
        "marker_individual_mean": float(np.mean(indiv_vals)),
        "color_pair_mean": float(np.mean(color_vals)),
        "shape_pair_mean": float(np.mean(shape_vals)),
        "lightness_variance": _lightness_variance(colors, ctx.pool),
        "shape_type_mix": _shape_type_mix(shapes, ctx.catalog),
    }
    w = ctx.weights.as_dict()
    score = sum(w[k] * components[k] for k in w)
    return ScoredPalette(palette, float(score), components)


def generate_redundant(n: int, ctx: ScoringContext,
                       constraints: Constraints | None = None,
                       k_out: int = 10, seed: int = 0, top_subsets: int = 3,
                       n_permutations: int = 13) -> list[ScoredPalette]:
    """Ranked redundant palettes: top color subsets x top shape subsets x
    diversified color->shape assignments, scored by the composite model."""
    if not 2 <= n <= 10:
        raise InvalidArgumentError(f"n={n} outside [2, 10]")
    constraints = constraints or Constraints()
    if len(constraints.all_required_colors()) > n or len(constraints.all_required_shapes()) > n:
        raise ConstraintError("more required elements than palette slots")

    top_colors = generate_single_channel(n, "color", ctx.model, constraints,
                                         k_out=top_subsets, seed=seed)
    top_shapes = generate_single_channel(n, "shape", ctx.model, constraints,
                                         k_out=top_subsets, seed=seed + 1)
    m = factorial(n) if n <= 3 else n_permutations
    perms = diverse_permutations(n, m, seed=seed)

    best: dict[tuple, ScoredPalette] = {}
    for cs in top_colors:
        color_ids = [mk.color_id for mk in cs.palette.entries]
        for ss in top_shapes:
            shape_ids = [mk.shape_id for mk in ss.palette.entries]
            for perm in perms:
                markers = tuple(Marker(color_ids[i], shape_ids[perm[i]])
                                for i in range(n))
                palette = Palette(Encoding.REDUNDANT, markers)
                if not constraints.satisfied_by(palette):
                    continue
                try:
                    scored = score_redundant(palette, ctx)
                except MissingEvidenceError:
                    continue
                key = palette.key()
                if key not in best or best[key].score < scored.score:
                    best[key] = scored
    if not best:
        raise MissingEvidenceError(
            f"no redundant palette of size {n} satisfies the constraints "
            "with full evidence coverage")
    ranked = sorted(best.values(), key=lambda sp: (-sp.score, sp.palette.key()))[:k_out]
    return [ScoredPalette(sp.palette, sp.score, sp.components, rank)
            for rank, sp in enumerate(ranked, start=1)]


def _score_any(palette: Palette, ctx: ScoringContext) -> ScoredPalette:
    if palette.encoding is Encoding.REDUNDANT:
        return score_redundant(palette, ctx)
    axis = "color" if palette.encoding is Encoding.COLOR_ONLY else "shape"
    ids = [m.color_id if axis == "color" else m.shape_id for m in palette.entries]
    vals = [ctx.model.pair_value(axis, palette.n, a, b)
            for a, b in itertools.combinations(ids, 2)]
    s = float(np.mean(vals))
    return ScoredPalette(palette, s, {f"{axis}_pair_mean": s})


def swap_element(scored: ScoredPalette, position: int,
                 constraints: Constraints, ctx: ScoringContext
                 ) -> tuple[ScoredPalette, Constraints]:
    """Replace the entry at `position` with the best-scoring alternative and
    grow the exclusion set so the rejected element cannot come back."""
    palette = scored.palette
    if not 0 <= position < palette.n:
        raise InvalidArgumentError(f"position {position} out of range")
    old = palette.entries[position]
    if (old.color_id in constraints.required_colors
            or old.shape_id in constraints.required_shapes
            or (old.color_id, old.shape_id) in constraints.required_markers):
        raise ConstraintError("cannot swap a required element")

    new_constraints = constraints.with_excluded(old.color_id, old.shape_id)
    other = [m for i, m in enumerate(palette.entries) if i != position]
    used_colors = {m.color_id for m in other} - {None}
    used_shapes = {m.shape_id for m in other} - {None}

    if palette.encoding is Encoding.COLOR_ONLY:
        candidates = [Marker(color_id=c) for c in ctx.pool.ids()
                      if c not in used_colors and c not in new_constraints.excluded_colors
                      and (new_constraints.candidate_colors is None
                           or c in new_constraints.candidate_colors)]
    elif palette.encoding is Encoding.SHAPE_ONLY:
        candidates = [Marker(shape_id=s) for s in ctx.catalog.ids()
                      if s not in used_shapes and s not in new_constraints.excluded_shapes
                      and (new_constraints.candidate_shapes is None
                           or s in new_constraints.candidate_shapes)]
    else:
        colors = [c for c in ctx.pool.ids()
                  if c not in used_colors and c not in new_constraints.excluded_colors
                  and (new_constraints.candidate_colors is None
                       or c in new_constraints.candidate_colors)]
        shapes = [s for s in ctx.catalog.ids()
                  if s not in used_shapes and s not in new_constraints.excluded_shapes
                  and (new_constraints.candidate_shapes is None
                       or s in new_constraints.candidate_shapes)]
        candidates = [Marker(c, s) for c in colors for s in shapes]

    best: ScoredPalette | None = None
    for cand in candidates:
        entries = list(palette.entries)
        entries[position] = cand
        try:
            trial = Palette(palette.encoding, tuple(entries))
        except InvalidArgumentError:
            continue
        if not new_constraints.satisfied_by(trial):
            continue
        try:
            s = _score_any(trial, ctx)
        except MissingEvidenceError:
            continue
        if best is None or s.score > best.score or (
                s.score == best.score and s.palette.key() < best.palette.key()):
            best = s
    if best is None:
        raise ExhaustedAlternativesError(
            f"no feasible replacement for position {position}")
    return ScoredPalette(best.palette, best.score, best.components, scored.rank), new_constraints


# ---------------------------------------------------------------------------
# Color jitter and nearest-representative mapping
# ---------------------------------------------------------------------------

JITTER_L = 5.0
JITTER_AB = 10.0
JITTER_MAX_DE = 15.0


def jitter_color(lab: LabColor, seed: int = 0, max_attempts: int = 100) -> LabColor:
    """Random nearby color: |dL|<=5, |da|,|db|<=10, deltaE00<=15, in gamut.

    Rejection-samples; returns the input unchanged if no attempt satisfies
    every bound within the budget.
    """
    rng = np.random.default_rng(seed)
    base = lab.as_array()
    for _ in range(max_attempts):
        delta = rng.uniform([-JITTER_L, -JITTER_AB, -JITTER_AB],
                            [JITTER_L, JITTER_AB, JITTER_AB])
        cand = base + delta
        if not (0.0 <= cand[0] <= 100.0 and
                -128.0 <= cand[1] <= 127.0 and -128.0 <= cand[2] <= 127.0):
            continue
        if not lab_in_gamut_array(cand[None, :])[0]:
            continue
        if ciede2000(base, cand) > JITTER_MAX_DE:
            continue
        return LabColor(float(cand[0]), float(cand[1]), float(cand[2]))
    return lab


def nearest_representative(lab: LabColor, pool: ColorPool) -> int:
    """Pool id with minimal CIEDE2000 distance; ties go to the lowest id."""
    labs = pool.labs()
    d = ciede2000_pairs(np.repeat(lab.as_array()[None, :], len(labs), axis=0), labs)
    best = float(np.min(d))
    for entry, dist in zip(pool.entries, d):
        if dist <= best + 1e-12:
            return entry.color_id
    raise AssertionError("unreachable")
