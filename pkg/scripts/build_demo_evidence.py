"""Regenerate the bundled demo evidence directory.

Synthesizes a fully-covered evidence set over a 12-color x 12-shape
subuniverse of the bundled pools, with accuracies loosely tied to perceptual
distance so demo rankings look sensible. Purely synthetic: this stands in
for real crowdsourced trial data, which the package does not ship.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from palettekit.catalog import load_default_pools
from palettekit.colorlab import ciede2000_matrix
from palettekit.evidence import CategoryBin, MarkerAccuracyTable, PairMatrix
from palettekit.optimizer import ModelEvidence

SUB_SIZE = 12
TRIALS_PER_CELL = 30


def build(seed: int) -> ModelEvidence:
    rng = np.random.default_rng(seed)
    pool, shapes = load_default_pools()
    color_ids = sorted(rng.choice(pool.ids(), size=SUB_SIZE, replace=False).tolist())
    shape_ids = sorted(rng.choice(shapes.ids(), size=SUB_SIZE, replace=False).tolist())

    labs = np.array([pool.by_id[c].lab.as_array() for c in color_ids])
    de = ciede2000_matrix(labs)
    color_acc = np.clip(0.50 + 0.006 * de + rng.normal(0, 0.02, de.shape), 0.30, 0.98)
    color_acc = (color_acc + color_acc.T) / 2
    np.fill_diagonal(color_acc, 0.0)

    fills = [shapes.by_id[s].fill_class for s in shape_ids]
    shape_acc = rng.uniform(0.55, 0.80, (SUB_SIZE, SUB_SIZE))
    for i in range(SUB_SIZE):
        for j in range(SUB_SIZE):
            if fills[i] != fills[j]:
                shape_acc[i, j] += 0.12  # cross-class pairs are easier to tell apart
    shape_acc = np.clip((shape_acc + shape_acc.T) / 2, 0.0, 0.97)
    np.fill_diagonal(shape_acc, 0.0)

    trials = np.full((SUB_SIZE, SUB_SIZE), TRIALS_PER_CELL, dtype=np.int64)
    np.fill_diagonal(trials, 0)

    markers = [(c, s) for c in color_ids for s in shape_ids]
    m = len(markers)
    cpos = {c: i for i, c in enumerate(color_ids)}
    spos = {s: i for i, s in enumerate(shape_ids)}
    marker_acc = np.zeros((m, m))
    for a in range(m):
        for b in range(a + 1, m):
            ca, sa = markers[a]
            cb, sb = markers[b]
            pc = color_acc[cpos[ca], cpos[cb]] if ca != cb else 0.0
            ps = shape_acc[spos[sa], spos[sb]] if sa != sb else 0.0
            # redundant pairs benefit from whichever channel separates better
            acc = min(0.99, max(pc, ps) + 0.08) + rng.normal(0, 0.01)
            marker_acc[a, b] = marker_acc[b, a] = float(np.clip(acc, 0.0, 1.0))
    marker_trials = np.full((m, m), TRIALS_PER_CELL, dtype=np.int64)
    np.fill_diagonal(marker_trials, 0)

    indiv = {mk: float(np.clip(rng.uniform(0.65, 0.95), 0, 1)) for mk in markers}

    matrices = {}
    tables = {}
    for b in [None, *CategoryBin]:
        # bins shade the all-bin values: small counts are a bit easier
        offset = {None: 0.0, CategoryBin.SMALL: 0.03,
                  CategoryBin.MEDIUM: 0.0, CategoryBin.LARGE: -0.03}[b]
        matrices[("color", b)] = PairMatrix(
            "color", b, color_ids, np.clip(color_acc + offset, 0, 1), trials)
        matrices[("shape", b)] = PairMatrix(
            "shape", b, shape_ids, np.clip(shape_acc + offset, 0, 1), trials)
        matrices[("marker", b)] = PairMatrix(
            "marker", b, markers, np.clip(marker_acc + offset, 0, 1), marker_trials)
        tables[b] = MarkerAccuracyTable(
            b, {k: float(np.clip(v + offset, 0, 1)) for k, v in indiv.items()},
            {k: TRIALS_PER_CELL for k in markers})
    return ModelEvidence(matrices, tables)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path,
                        default=Path(__file__).resolve().parents[1]
                        / "src" / "palettekit" / "data" / "demo_evidence")
    args = parser.parse_args()
    model = build(args.seed)
    model.save_dir(args.out)
    print(f"wrote demo evidence to {args.out}")


if __name__ == "__main__":
    main()
