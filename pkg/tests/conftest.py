import importlib.resources

import numpy as np
import pytest

from palettekit.catalog import load_default_pools
from palettekit.evidence import MarkerAccuracyTable, PairMatrix
from palettekit.optimizer import ModelEvidence


@pytest.fixture(scope="session")
def pools():
    return load_default_pools()


@pytest.fixture(scope="session")
def pool(pools):
    return pools[0]


@pytest.fixture(scope="session")
def shape_catalog(pools):
    return pools[1]


@pytest.fixture(scope="session")
def demo_evidence_dir():
    return importlib.resources.files("palettekit") / "data" / "demo_evidence"


@pytest.fixture(scope="session")
def demo_model(demo_evidence_dir):
    return ModelEvidence.load_dir(demo_evidence_dir, min_trials=5)


def make_synthetic_model(color_ids, shape_ids, seed=0, trials=20):
    """Fully-covered random evidence over the given id universes."""
    rng = np.random.default_rng(seed)

    def sym(labels, axis):
        n = len(labels)
        a = rng.uniform(0.5, 1.0, (n, n))
        a = (a + a.T) / 2
        np.fill_diagonal(a, 0.0)
        t = np.full((n, n), trials, dtype=np.int64)
        np.fill_diagonal(t, 0)
        return PairMatrix(axis, None, list(labels), a, t)

    markers = [(c, s) for c in color_ids for s in shape_ids]
    table = MarkerAccuracyTable(
        None, {k: float(rng.uniform(0.6, 1.0)) for k in markers},
        {k: trials for k in markers})
    return ModelEvidence.from_matrices(
        color=sym(color_ids, "color"), shape=sym(shape_ids, "shape"),
        marker=sym(markers, "marker"), marker_table=table, min_trials=5)


@pytest.fixture
def synth_model(pool, shape_catalog):
    return make_synthetic_model(pool.ids()[:12], shape_catalog.ids()[:12], seed=42)
