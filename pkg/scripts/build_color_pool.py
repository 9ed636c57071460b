"""Regenerate the bundled 39-color pool data file.

Pipeline: in-gamut CIELAB lattice -> k-means (k=200, seed=0) -> maximal
JND-discriminable subset at the 6 px mark size, white-contrast filtered.
Two orange hues are then added by hand (flagged manual) to balance the hue
distribution, chosen as the highest-chroma orange lattice points that keep
the pool a full discriminability clique.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from palettekit import catalog
from palettekit.colorlab import LabColor, jnd_adjacency, lab_to_lch

_HUE_NAMES = [
    (0, 30, "red"), (30, 70, "orange"), (70, 100, "yellow"),
    (100, 160, "green"), (160, 200, "teal"), (200, 260, "blue"),
    (260, 320, "purple"), (320, 360, "pink"),
]


def color_name(lab: np.ndarray) -> str:
    lch = lab_to_lch(LabColor(*[float(v) for v in lab]))
    if lch.C < 12.0:
        if lch.L >= 80:
            return "pale gray"
        return "dark gray" if lch.L < 45 else "gray"
    hue = next(name for lo, hi, name in _HUE_NAMES if lo <= lch.h < hi)
    if lch.L < 40:
        return f"dark {hue}"
    if lch.L > 72:
        return f"light {hue}"
    return hue


def pick_manual_oranges(pool: np.ndarray, samples: np.ndarray) -> np.ndarray:
    """Two mutually-discriminable orange lattice colors compatible with the pool."""
    white = np.array([[100.0, 0.0, 0.0]])
    C = np.hypot(samples[:, 1], samples[:, 2])
    h = np.degrees(np.arctan2(samples[:, 2], samples[:, 1])) % 360
    mask = (h > 30) & (h < 75) & (C > 20) & (samples[:, 0] > 45) & (samples[:, 0] < 80)
    cands = samples[mask]
    order = np.argsort(-np.hypot(cands[:, 1], cands[:, 2]))
    cands = cands[order]

    base = np.vstack([pool, white])
    feasible = [c for c in cands
                if jnd_adjacency(np.vstack([base, c[None, :]]), 6.0)[-1, :-1].all()]
    for i, ci in enumerate(feasible):
        for cj in feasible[i + 1:]:
            if jnd_adjacency(np.vstack([ci[None, :], cj[None, :]]), 6.0)[0, 1]:
                return np.vstack([ci, cj])
    raise RuntimeError("no compatible orange pair found; adjust the candidate band")


def main() -> None:
    parser = argparse.ArgumentParser(description="Regenerate the bundled color pool file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path,
                        default=Path(__file__).resolve().parents[1]
                        / "src" / "palettekit" / "data" / "colors.txt")
    args = parser.parse_args()

    samples = catalog.grid_sample_lab()
    pool = catalog.derive_color_pool(seed=args.seed)
    print(f"pipeline subset size: {len(pool)}")
    oranges = pick_manual_oranges(pool, samples)
    labs = np.vstack([pool, oranges])
    manual = [False] * len(pool) + [True, True]

    # order by lightness then hue for a stable, readable file
    order = np.lexsort((np.degrees(np.arctan2(labs[:, 2], labs[:, 1])) % 360, labs[:, 0]))
    labs = labs[order]
    manual = [manual[i] for i in order]

    names = []
    counts: dict[str, int] = {}
    for lab in labs:
        base = color_name(lab)
        counts[base] = counts.get(base, 0) + 1
        names.append(f"{base} {counts[base]}" if counts[base] > 1 else base)
    # second pass: suffix the first occurrence of duplicated names too
    for i, n in enumerate(names):
        if counts.get(n, 0) > 1:
            names[i] = f"{n} 1"

    catalog.write_color_pool(labs, names, manual, args.out)
    print(f"wrote {len(labs)} colors to {args.out}")


if __name__ == "__main__":
    main()
