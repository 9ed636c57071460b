import numpy as np
import pytest

from palettekit import analysis as an
from palettekit.analysis import (baseline_report, bootstrap_ci,
                                 empirical_accuracy, pearson, rank_validation,
                                 ward_cluster)
from palettekit.errors import (CoverageError, InvalidArgumentError,
                               UndefinedCorrelationError)
from palettekit.evidence import Marker, TrialRecord


# ---------------------------------------------------------------------------
# Ward clustering
# ---------------------------------------------------------------------------

def _planted(rng, centers, per, sigma):
    X, truth = [], []
    for i, c in enumerate(centers):
        X.append(rng.normal(c, sigma, size=(per, len(np.atleast_1d(c)))))
        truth += [i] * per
    return np.vstack(X), truth


def test_ward_recovers_planted_groups():
    rng = np.random.default_rng(0)
    X, truth = _planted(rng, [[0.0], [1.0], [2.0], [3.0]], per=6, sigma=0.02)
    res = ward_cluster(X, 4)
    assert res.k == 4
    # same partition as the plant (labels relabeled by first appearance
    # exactly match because the data is laid out group by group)
    assert list(res.labels) == truth
    assert list(res.heights) == sorted(res.heights)


def test_ward_order_invariant_partition():
    rng = np.random.default_rng(1)
    X, truth = _planted(rng, [[0, 0], [5, 0], [0, 5]], per=5, sigma=0.1)
    perm = rng.permutation(len(X))
    res = ward_cluster(X[perm], 3)
    # co-membership must match the planted partition under the shuffle
    t = np.array(truth)[perm]
    lab = np.array(res.labels)
    assert ((t[:, None] == t[None, :]) == (lab[:, None] == lab[None, :])).all()


def test_ward_edge_cases():
    X = [[0.0], [1.0], [2.0]]
    singles = ward_cluster(X, 3)
    assert singles.labels == (0, 1, 2) and singles.heights == ()
    one = ward_cluster(X, 1)
    assert set(one.labels) == {0}
    with pytest.raises(InvalidArgumentError):
        ward_cluster(X, 0)
    with pytest.raises(InvalidArgumentError):
        ward_cluster(X, 4)


def test_ward_accepts_1d_input():
    res = ward_cluster([0.0, 0.1, 5.0, 5.1], 2)
    assert res.labels == (0, 0, 1, 1)


# ---------------------------------------------------------------------------
# Pearson and bootstrap
# ---------------------------------------------------------------------------

def test_pearson_hand_value():
    # classic textbook triple: r = 1 for a perfect line
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson([1, 2, 3], [6, 4, 2]) == pytest.approx(-1.0)
    # hand-computed: x=[1,2,3,4], y=[1,3,2,4] -> r = 0.8
    assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)


def test_pearson_affine_invariance():
    rng = np.random.default_rng(3)
    x = rng.normal(size=40)
    y = rng.normal(size=40)
    r = pearson(x, y)
    assert pearson(3.0 * x + 7.0, -2.0 * y + 1.0) == pytest.approx(-r)
    assert pearson(x, y) == pytest.approx(float(np.corrcoef(x, y)[0, 1]))


def test_pearson_errors():
    with pytest.raises(UndefinedCorrelationError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(InvalidArgumentError):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(InvalidArgumentError):
        pearson([1], [2])


def test_bootstrap_ci_contains_mean_and_shrinks():
    rng = np.random.default_rng(4)
    v = rng.normal(10.0, 1.0, size=200)
    lo, hi = bootstrap_ci(v, seed=0)
    assert lo <= v.mean() <= hi
    assert bootstrap_ci(v, seed=0) == (lo, hi)  # deterministic
    lo2, hi2 = bootstrap_ci(v[:20], seed=0)
    assert (hi2 - lo2) > (hi - lo)  # smaller sample, wider interval
    assert bootstrap_ci([5.0], seed=0) == (5.0, 5.0)
    with pytest.raises(InvalidArgumentError):
        bootstrap_ci([])


# ---------------------------------------------------------------------------
# Empirical accuracy and rank validation
# ---------------------------------------------------------------------------

def _trials_for_palettes(palette_accs, reps, rng):
    """Synthesize trials whose per-palette accuracy matches palette_accs
    exactly (deterministic correct counts, not sampled)."""
    trials = []
    t = 0
    for key, acc in palette_accs.items():
        markers = tuple(Marker(c, s) for c, s in key)
        n_correct = round(acc * reps)
        for i in range(reps):
            correct = i < n_correct
            trials.append(TrialRecord(f"t{t}", len(key), markers, 0,
                                      0 if correct else 1, correct))
            t += 1
    return trials


def _random_palette_universe(rng, n, count):
    keys = set()
    while len(keys) < count:
        cs = rng.choice(30, size=n, replace=False)
        ss = rng.choice(30, size=n, replace=False)
        keys.add(tuple(sorted(zip(cs.tolist(), ss.tolist()))))
    return sorted(keys)


def test_empirical_accuracy_oracle():
    rng = np.random.default_rng(5)
    keys = _random_palette_universe(rng, 3, 10)
    accs = {k: i / 10 for i, k in enumerate(keys)}
    got = empirical_accuracy(_trials_for_palettes(accs, 10, rng))
    assert got == {k: pytest.approx(v) for k, v in accs.items()}


def test_rank_validation_perfect_model():
    """A model that scores exactly the empirical accuracy must produce
    monotone rank means and strongly negative rank-accuracy correlation."""
    rng = np.random.default_rng(6)
    keys = _random_palette_universe(rng, 4, 60)
    accs = {k: float(rng.uniform(0.3, 1.0)) for k in keys}
    trials = _trials_for_palettes({k: v for k, v in accs.items()}, 20, rng)
    emp = empirical_accuracy(trials)
    report = rank_validation(emp.__getitem__, trials, samples_per_n=50,
                             repeats=3, seed=0)
    assert len(report.per_rank_mean) == 50
    assert report.correlation < -0.9
    assert list(report.per_rank_mean) == sorted(report.per_rank_mean, reverse=True)
    for mean, (lo, hi) in zip(report.per_rank_mean, report.per_rank_ci):
        assert lo <= mean <= hi


def test_rank_validation_null_model_uncorrelated():
    rng = np.random.default_rng(7)
    keys = _random_palette_universe(rng, 4, 60)
    accs = {k: float(rng.uniform(0.3, 1.0)) for k in keys}
    trials = _trials_for_palettes(accs, 20, rng)
    null_scores = {k: float(rng.uniform()) for k in keys}
    report = rank_validation(null_scores.__getitem__, trials,
                             samples_per_n=50, repeats=3, seed=0)
    assert abs(report.correlation) < 0.5


def test_rank_validation_coverage_error():
    rng = np.random.default_rng(8)
    keys = _random_palette_universe(rng, 3, 10)
    trials = _trials_for_palettes({k: 0.8 for k in keys}, 5, rng)
    with pytest.raises(CoverageError, match="n=3 has 10"):
        rank_validation(lambda k: 0.5, trials, samples_per_n=50)
    with pytest.raises(CoverageError):
        rank_validation(lambda k: 0.5, [], samples_per_n=5)


def test_rank_validation_deterministic():
    rng = np.random.default_rng(9)
    keys = _random_palette_universe(rng, 3, 55)
    accs = {k: float(rng.uniform(0.4, 1.0)) for k in keys}
    trials = _trials_for_palettes(accs, 10, rng)
    a = rank_validation(accs.__getitem__, trials, samples_per_n=40, seed=3)
    b = rank_validation(accs.__getitem__, trials, samples_per_n=40, seed=3)
    assert a == b


# ---------------------------------------------------------------------------
# Baseline report
# ---------------------------------------------------------------------------

def test_baseline_report_structure():
    groups = {"ours": [(0,), (1,)], "random": [(2,), (3,), (4,)]}
    scores = {(0,): 0.9, (1,): 0.8, (2,): 0.5, (3,): 0.6, (4,): 0.4}
    rep = baseline_report(groups, scores.__getitem__, seed=0)
    assert set(rep) == {"ours", "random"}
    assert rep["ours"]["mean"] == pytest.approx(0.85)
    assert rep["ours"]["count"] == 2
    assert rep["random"]["ci_low"] <= rep["random"]["mean"] <= rep["random"]["ci_high"]


def test_baseline_report_errors():
    with pytest.raises(InvalidArgumentError):
        baseline_report({}, lambda p: 0.5)
    with pytest.raises(InvalidArgumentError):
        baseline_report({"empty": []}, lambda p: 0.5)
