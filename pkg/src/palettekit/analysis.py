"""Validation and reporting: Ward clustering, rank-vs-accuracy validation,
and baseline score comparisons.

Confidence intervals throughout are nonparametric bootstrap (1,000 percentile
resamples, seeded).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .errors import CoverageError, InvalidArgumentError, UndefinedCorrelationError
from .evidence import TrialRecord

BOOTSTRAP_RESAMPLES = 1000
CI_LEVEL = 95.0


@dataclass(frozen=True)
class ClusterResult:
    labels: tuple
    k: int
    heights: tuple  # merge heights, non-decreasing


@dataclass(frozen=True)
class RankValidationReport:
    per_rank_mean: tuple        # mean accuracy at each rank position (rank 1 first)
    per_rank_ci: tuple          # (low, high) per rank
    correlation: float          # pearson(rank, mean accuracy)
    samples_per_n: int
    repeats: int


def ward_cluster(items, k: int) -> ClusterResult:
    """Agglomerative Ward clustering cut at k clusters.

    Labels are renumbered 0..k-1 in order of first appearance, so the result
    is invariant to scipy's internal cluster numbering.
    """
    X = np.asarray(items, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    m = len(X)
    if k < 1 or k > m:
        raise InvalidArgumentError(f"k={k} outside [1, {m}]")
    if k == m:
        return ClusterResult(tuple(range(m)), k, ())
    Z = linkage(X, method="ward")
    raw = fcluster(Z, t=k, criterion="maxclust")
    remap: dict = {}
    labels = []
    for r in raw:
        if r not in remap:
            remap[r] = len(remap)
        labels.append(remap[r])
    return ClusterResult(tuple(labels), k, tuple(float(h) for h in Z[:, 2]))


def pearson(x, y) -> float:
    """Plain Pearson correlation coefficient."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidArgumentError("pearson needs two equal-length 1-d sequences")
    if len(x) < 2:
        raise InvalidArgumentError("pearson needs at least 2 points")
    xm = x - x.mean()
    ym = y - y.mean()
    denom = np.sqrt((xm ** 2).sum() * (ym ** 2).sum())
    if denom == 0.0:
        raise UndefinedCorrelationError("zero variance input")
    return float((xm * ym).sum() / denom)


def bootstrap_ci(values, seed: int = 0,
                 resamples: int = BOOTSTRAP_RESAMPLES) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean."""
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        raise InvalidArgumentError("cannot bootstrap an empty sample")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(v), size=(resamples, len(v)))
    means = v[idx].mean(axis=1)
    alpha = (100.0 - CI_LEVEL) / 2.0
    return float(np.percentile(means, alpha)), float(np.percentile(means, 100.0 - alpha))


def _sortable(key: tuple) -> tuple:
    # palette keys may hold None for an absent channel; make them orderable
    return tuple((-1 if c is None else c, -1 if s is None else s) for c, s in key)


def _palette_key(trial: TrialRecord) -> tuple:
    return tuple(sorted(((m.color_id, m.shape_id) for m in trial.categories),
                        key=lambda p: (-1 if p[0] is None else p[0],
                                       -1 if p[1] is None else p[1])))


def empirical_accuracy(trials: list[TrialRecord]) -> dict:
    """Mean correctness per distinct palette (keyed by sorted marker tuple)."""
    correct: dict = {}
    total: dict = {}
    for t in trials:
        key = _palette_key(t)
        total[key] = total.get(key, 0) + 1
        if t.correct:
            correct[key] = correct.get(key, 0) + 1
    return {k: correct.get(k, 0) / v for k, v in total.items()}


def rank_validation(model, trials: list[TrialRecord], samples_per_n: int = 50,
                    repeats: int = 3, seed: int = 0) -> RankValidationReport:
    """Rank palettes by model score and compare against trial accuracy.

    For each repeat and each category count present in the trials, sample
    `samples_per_n` distinct palettes, rank them by `model(palette_key)`
    descending, and record the empirical accuracy observed at each rank.
    Accuracies are aggregated per rank position across repeats and counts.
    """
    acc_by_palette = empirical_accuracy(trials)
    by_count: dict = {}
    for key in acc_by_palette:
        by_count.setdefault(len(key), []).append(key)
    if not by_count:
        raise CoverageError("no trials to validate against", missing=[])
    short = {n: sorted(ks, key=_sortable)
             for n, ks in by_count.items() if len(ks) < samples_per_n}
    if short:
        raise CoverageError(
            "insufficient distinct palettes for sampling: "
            + ", ".join(f"n={n} has {len(ks)}" for n, ks in sorted(short.items())),
            missing=sorted(short))

    rng = np.random.default_rng(seed)
    per_rank: dict = {}
    for _ in range(repeats):
        for n in sorted(by_count):
            keys = sorted(by_count[n], key=_sortable)
            pick = rng.choice(len(keys), size=samples_per_n, replace=False)
            sampled = [keys[i] for i in sorted(pick.tolist())]
            scored = sorted(sampled, key=lambda k: (-model(k), _sortable(k)))
            for rank, key in enumerate(scored, start=1):
                per_rank.setdefault(rank, []).append(acc_by_palette[key])

    ranks = sorted(per_rank)
    means = [float(np.mean(per_rank[r])) for r in ranks]
    cis = [bootstrap_ci(per_rank[r], seed=seed + r) for r in ranks]
    r = pearson(ranks, means)
    return RankValidationReport(tuple(means), tuple(cis), r, samples_per_n, repeats)


def baseline_report(palette_groups: dict, model, seed: int = 0) -> dict:
    """Per-group mean model score with a bootstrap 95% interval.

    palette_groups maps a group name to a list of palette keys scoreable by
    `model`.
    """
    if not palette_groups:
        raise InvalidArgumentError("no palette groups given")
    report = {}
    for gi, (name, palettes) in enumerate(sorted(palette_groups.items())):
        if not palettes:
            raise InvalidArgumentError(f"group {name!r} is empty")
        scores = np.array([model(p) for p in palettes], dtype=float)
        lo, hi = bootstrap_ci(scores, seed=seed + gi)
        report[name] = {
            "mean": float(scores.mean()),
            "ci_low": lo,
            "ci_high": hi,
            "count": len(scores),
        }
    return report
