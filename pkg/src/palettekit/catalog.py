"""Representative color pool and shape catalog: derivation and loading.

The bundled 39-color pool was produced by the pipeline in this module
(lattice sample -> k-means -> maximal JND-discriminable subset) plus two
manually chosen orange hues; ``scripts/build_color_pool.py`` regenerates it.
"""

from __future__ import annotations

import importlib.resources
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import colorlab
from ._kernels import kmeans_assign
from .colorlab import JndParams, LabColor, RgbColor, jnd_adjacency
from .errors import DataLoadError, InvalidArgumentError

POOL_MARK_SIZE_PX = 6.0
COLOR_FILE_HEADER = "# palettekit-colors v1"
SHAPE_FILE_HEADER = "# palettekit-shapes v1"
FILL_CLASSES = ("filled", "unfilled", "open")


@dataclass(frozen=True)
class GridSpec:
    L_range: tuple[float, float] = (25.0, 100.0)
    L_step: float = 5.0
    a_range: tuple[float, float] = (-128.0, 127.0)
    a_step: float = 2.0
    b_range: tuple[float, float] = (-128.0, 127.0)
    b_step: float = 2.0

    def __post_init__(self):
        for lo_hi, step in ((self.L_range, self.L_step), (self.a_range, self.a_step),
                            (self.b_range, self.b_step)):
            if step <= 0:
                raise InvalidArgumentError(f"grid step {step} must be > 0")
            if lo_hi[1] < lo_hi[0]:
                raise InvalidArgumentError(f"grid range {lo_hi} is empty")

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        def axis(rng, step):
            lo, hi = rng
            return np.arange(lo, hi + step / 2, step)

        return (axis(self.L_range, self.L_step),
                axis(self.a_range, self.a_step),
                axis(self.b_range, self.b_step))


@dataclass(frozen=True)
class PoolColor:
    color_id: int
    lab: LabColor
    hex: str
    display_name: str
    manual: bool = False


@dataclass(frozen=True)
class CatalogShape:
    shape_id: int
    name: str
    fill_class: str
    glyph: str
    source_tool: str


@dataclass(frozen=True)
class ColorPool:
    entries: tuple[PoolColor, ...]
    by_id: dict = field(init=False, repr=False, hash=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "by_id", {c.color_id: c for c in self.entries})

    def __len__(self):
        return len(self.entries)

    def labs(self) -> np.ndarray:
        return np.array([[c.lab.L, c.lab.a, c.lab.b] for c in self.entries])

    def ids(self) -> list[int]:
        return [c.color_id for c in self.entries]


@dataclass(frozen=True)
class ShapeCatalog:
    entries: tuple[CatalogShape, ...]
    by_id: dict = field(init=False, repr=False, hash=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "by_id", {s.shape_id: s for s in self.entries})

    def __len__(self):
        return len(self.entries)

    def ids(self) -> list[int]:
        return [s.shape_id for s in self.entries]


# ---------------------------------------------------------------------------
# Derivation pipeline
# ---------------------------------------------------------------------------

def grid_sample_lab(spec: GridSpec | None = None) -> np.ndarray:
    """All in-sRGB-gamut lattice points of the spec, as an (n, 3) Lab array."""
    spec = spec or GridSpec()
    Ls, As, Bs = spec.axes()
    grid = np.array(np.meshgrid(Ls, As, Bs, indexing="ij")).reshape(3, -1).T
    return grid[colorlab.lab_in_gamut_array(grid)]


def kmeans_lab(samples: np.ndarray, k: int, seed: int = 0,
               max_iter: int = 200, tol: float = 1e-6) -> np.ndarray:
    """Lloyd k-means in Lab with k-means++ seeding; centroids snapped to the
    nearest member of their cluster so results stay on the in-gamut lattice."""
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if n == 0:
        raise InvalidArgumentError("samples must be non-empty")
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k={k} outside [1, {n}]")

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(samples, k, rng)

    prev_inertia = np.inf
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        labels, inertia = kmeans_assign(samples, centroids)
        new_centroids = centroids.copy()
        for c in range(k):
            members = samples[labels == c]
            if len(members):
                new_centroids[c] = members.mean(axis=0)
            else:
                # revive empty clusters on the point farthest from its centroid
                d = np.linalg.norm(samples - centroids[labels], axis=1)
                new_centroids[c] = samples[int(np.argmax(d))]
        centroids = new_centroids
        if prev_inertia < np.inf and inertia > 0:
            if abs(prev_inertia - inertia) / max(inertia, 1e-300) < tol:
                break
        prev_inertia = inertia

    labels, _ = kmeans_assign(samples, centroids)
    snapped = np.empty_like(centroids)
    for c in range(k):
        idx = np.flatnonzero(labels == c)
        if not len(idx):
            idx = np.arange(n)
        d = np.linalg.norm(samples[idx] - centroids[c], axis=1)
        snapped[c] = samples[idx[int(np.argmin(d))]]
    return snapped


def _kmeans_pp_init(samples: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(samples)
    chosen = np.zeros(n, dtype=bool)
    first = int(rng.integers(n))
    idxs = [first]
    chosen[first] = True
    d2 = np.sum((samples - samples[first]) ** 2, axis=1)
    while len(idxs) < k:
        total = d2.sum()
        if total <= 0.0:
            nxt = int(np.flatnonzero(~chosen)[0])
        else:
            nxt = int(rng.choice(n, p=d2 / total))
            if chosen[nxt]:
                nxt = int(np.flatnonzero(~chosen)[0])
        idxs.append(nxt)
        chosen[nxt] = True
        d2 = np.minimum(d2, np.sum((samples - samples[nxt]) ** 2, axis=1))
    return samples[idxs].astype(np.float64).copy()


def max_jnd_subset(colors: np.ndarray, mark_size_px: float = POOL_MARK_SIZE_PX,
                   params: JndParams | None = None) -> np.ndarray:
    """Maximal subset in which every pair is JND-discriminable.

    Greedy: repeatedly drop the color with the fewest discriminable partners
    (ties -> lowest index) until the remainder is a clique, then re-add any
    excluded color compatible with all survivors so the result is maximal.
    """
    colors = np.asarray(colors, dtype=np.float64)
    if len(colors) == 0:
        raise InvalidArgumentError("colors must be non-empty")
    params = params or JndParams()
    adj = jnd_adjacency(colors, mark_size_px, params)
    n = len(colors)
    alive = np.ones(n, dtype=bool)

    while True:
        sub = adj[np.ix_(alive, alive)]
        if sub.all(where=~np.eye(sub.shape[0], dtype=bool)):
            break
        degrees = sub.sum(axis=1)
        victim_local = int(np.argmin(degrees))
        victim = np.flatnonzero(alive)[victim_local]
        alive[victim] = False

    for i in range(n):
        if not alive[i] and adj[i, alive].all():
            alive[i] = True

    return colors[alive]


def derive_color_pool(spec: GridSpec | None = None, k: int = 200, seed: int = 0,
                      mark_size_px: float = POOL_MARK_SIZE_PX,
                      params: JndParams | None = None) -> np.ndarray:
    """Full pipeline: lattice sample -> k-means -> maximal JND subset.

    Centroids not discriminable from the white background are dropped before
    subset selection; every kept color must read against white at 6 px.
    """
    samples = grid_sample_lab(spec)
    centroids = kmeans_lab(samples, k, seed=seed)
    white = np.array([[100.0, 0.0, 0.0]])
    vs_white = jnd_adjacency(np.vstack([centroids, white]), mark_size_px, params)[:-1, -1]
    return max_jnd_subset(centroids[vs_white], mark_size_px, params)


# ---------------------------------------------------------------------------
# Pool files
# ---------------------------------------------------------------------------

def _data_path(name: str) -> Path:
    # PALETTEKIT_DATA points at an alternate data directory
    override = os.environ.get("PALETTEKIT_DATA")
    if override:
        return Path(override) / name
    return Path(importlib.resources.files("palettekit") / "data" / name)


def load_color_pool(path: str | Path | None = None, validate: bool = True) -> ColorPool:
    path = Path(path) if path else _data_path("colors.txt")
    if not path.exists():
        raise DataLoadError(f"color pool file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != COLOR_FILE_HEADER:
        raise DataLoadError(f"{path}: missing header {COLOR_FILE_HEADER!r}")
    entries = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 7:
            raise DataLoadError(f"{path}:{lineno}: expected 7 fields, got {len(parts)}")
        try:
            cid = int(parts[0])
            hexs = parts[1].lower()
            lab = LabColor(float(parts[2]), float(parts[3]), float(parts[4]))
            name = parts[5]
            manual = parts[6].strip().lower() == "true"
        except (ValueError, InvalidArgumentError) as exc:
            raise DataLoadError(f"{path}:{lineno}: {exc}") from exc
        if cid in seen:
            raise DataLoadError(f"{path}:{lineno}: duplicate color id {cid}")
        seen.add(cid)
        RgbColor.from_hex(hexs)
        entries.append(PoolColor(cid, lab, hexs, name, manual))
    pool = ColorPool(tuple(entries))
    if validate:
        validate_color_pool(pool)
    return pool


def validate_color_pool(pool: ColorPool, expect_count: int = 39) -> None:
    if len(pool) != expect_count:
        raise DataLoadError(f"color pool has {len(pool)} entries, expected {expect_count}")
    ids = pool.ids()
    if ids != list(range(expect_count)):
        raise DataLoadError(f"color ids not dense 0..{expect_count - 1}: {ids}")
    labs = pool.labs()
    if (labs[:, 0] < 25.0).any():
        bad = pool.entries[int(np.argmin(labs[:, 0]))]
        raise DataLoadError(f"color id {bad.color_id} has L < 25")
    if not colorlab.lab_in_gamut_array(labs).all():
        bad = pool.entries[int(np.flatnonzero(~colorlab.lab_in_gamut_array(labs))[0])]
        raise DataLoadError(f"color id {bad.color_id} lies outside the sRGB gamut")
    adj = jnd_adjacency(labs, POOL_MARK_SIZE_PX)
    off = ~adj
    np.fill_diagonal(off, False)
    if off.any():
        i, j = map(int, np.argwhere(off)[0])
        raise DataLoadError(f"color ids {pool.entries[i].color_id} and "
                            f"{pool.entries[j].color_id} are not JND-discriminable at 6 px")
    white = np.array([[100.0, 0.0, 0.0]])
    vs_white = jnd_adjacency(np.vstack([labs, white]), POOL_MARK_SIZE_PX)[:-1, -1]
    if not vs_white.all():
        bad = pool.entries[int(np.flatnonzero(~vs_white)[0])]
        raise DataLoadError(f"color id {bad.color_id} is not discriminable from white")


def load_shape_catalog(path: str | Path | None = None, validate: bool = True) -> ShapeCatalog:
    path = Path(path) if path else _data_path("shapes.txt")
    if not path.exists():
        raise DataLoadError(f"shape catalog file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != SHAPE_FILE_HEADER:
        raise DataLoadError(f"{path}: missing header {SHAPE_FILE_HEADER!r}")
    entries = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise DataLoadError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        try:
            sid = int(parts[0])
        except ValueError as exc:
            raise DataLoadError(f"{path}:{lineno}: bad shape id {parts[0]!r}") from exc
        name, fill_class, glyph, source_tool = parts[1], parts[2], parts[3], parts[4]
        if sid in seen:
            raise DataLoadError(f"{path}:{lineno}: duplicate shape id {sid}")
        seen.add(sid)
        if fill_class not in FILL_CLASSES:
            raise DataLoadError(f"{path}:{lineno}: shape id {sid} has unknown "
                                f"fill_class {fill_class!r}")
        if not glyph.strip():
            raise DataLoadError(f"{path}:{lineno}: shape id {sid} has an empty glyph path")
        entries.append(CatalogShape(sid, name, fill_class, glyph, source_tool))
    catalog = ShapeCatalog(tuple(entries))
    if validate:
        validate_shape_catalog(catalog)
    return catalog


def validate_shape_catalog(catalog: ShapeCatalog, expect_count: int = 39) -> None:
    if len(catalog) != expect_count:
        raise DataLoadError(f"shape catalog has {len(catalog)} entries, expected {expect_count}")
    if catalog.ids() != list(range(expect_count)):
        raise DataLoadError("shape ids not dense 0..38")


def load_default_pools(color_path: str | Path | None = None,
                       shape_path: str | Path | None = None) -> tuple[ColorPool, ShapeCatalog]:
    return load_color_pool(color_path), load_shape_catalog(shape_path)


def write_color_pool(labs: np.ndarray, names: list[str], manual_flags: list[bool],
                     path: str | Path) -> None:
    lines = [COLOR_FILE_HEADER, "# id\thex\tL\ta\tb\tname\tmanual"]
    for i, (lab, name, manual) in enumerate(zip(labs, names, manual_flags)):
        rgb, _ = colorlab.lab_to_srgb(LabColor(*[float(v) for v in lab]))
        lines.append(f"{i}\t{rgb.to_hex()}\t{lab[0]:.4f}\t{lab[1]:.4f}\t{lab[2]:.4f}"
                     f"\t{name}\t{str(manual).lower()}")
    Path(path).write_text("\n".join(lines) + "\n")
