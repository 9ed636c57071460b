"""Trial logs and the pairwise / individual accuracy tables built from them.

A trial log is a line-delimited text file with a version header; each record
is one participant response. Matrices are immutable once built and are pure
folds over the records, so merging logs commutes with matrix construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from math import comb
from pathlib import Path

import numpy as np

from .errors import DataLoadError, InvalidArgumentError, PalettekitError

TRIAL_FILE_HEADER = "# palettekit-trials v1"
TIMEOUT = "timeout"


class CategoryBin(Enum):
    SMALL = "small"    # 2-4 categories
    MEDIUM = "medium"  # 5-7
    LARGE = "large"    # 8-10

    @property
    def counts(self) -> range:
        return {"small": range(2, 5), "medium": range(5, 8), "large": range(8, 11)}[self.value]


def bin_of(n: int) -> CategoryBin:
    if not 2 <= n <= 10:
        raise InvalidArgumentError(f"category count {n} outside [2, 10]")
    if n <= 4:
        return CategoryBin.SMALL
    if n <= 7:
        return CategoryBin.MEDIUM
    return CategoryBin.LARGE


@dataclass(frozen=True, order=True)
class Marker:
    color_id: int | None = None
    shape_id: int | None = None

    def __post_init__(self):
        if self.color_id is None and self.shape_id is None:
            raise InvalidArgumentError("marker needs a color_id or a shape_id")

    def token(self) -> str:
        parts = []
        if self.color_id is not None:
            parts.append(f"c{self.color_id}")
        if self.shape_id is not None:
            parts.append(f"s{self.shape_id}")
        return "+".join(parts)

    @classmethod
    def from_token(cls, token: str) -> "Marker":
        color_id = shape_id = None
        for part in token.strip().split("+"):
            if part.startswith("c"):
                color_id = int(part[1:])
            elif part.startswith("s"):
                shape_id = int(part[1:])
            else:
                raise ValueError(f"bad marker token {token!r}")
        return cls(color_id, shape_id)


@dataclass(frozen=True)
class TrialRecord:
    trial_id: str
    category_count: int
    categories: tuple[Marker, ...]
    target_index: int
    response_index: int | None  # None = timeout
    correct: bool
    group_id: str = ""

    def __post_init__(self):
        if not 2 <= self.category_count <= 10:
            raise InvalidArgumentError(
                f"trial {self.trial_id}: category_count {self.category_count} outside [2, 10]")
        if len(self.categories) != self.category_count:
            raise InvalidArgumentError(
                f"trial {self.trial_id}: {len(self.categories)} markers for "
                f"category_count {self.category_count}")
        if not 0 <= self.target_index < self.category_count:
            raise InvalidArgumentError(f"trial {self.trial_id}: target_index out of range")
        if len(set(self.categories)) != len(self.categories):
            raise InvalidArgumentError(f"trial {self.trial_id}: repeated markers")
        has_color = {m.color_id is not None for m in self.categories}
        has_shape = {m.shape_id is not None for m in self.categories}
        if len(has_color) > 1 or len(has_shape) > 1:
            raise InvalidArgumentError(
                f"trial {self.trial_id}: markers mix color/shape presence")
        if self.response_index is None and self.correct:
            raise InvalidArgumentError(f"trial {self.trial_id}: timeout cannot be correct")


class PairMatrix:
    """Symmetric accuracy/trial-count matrix over colors, shapes, or markers."""

    def __init__(self, axis: str, bin: CategoryBin | None, labels: list,
                 acc: np.ndarray, trials: np.ndarray):
        if axis not in ("color", "shape", "marker"):
            raise InvalidArgumentError(f"unknown axis {axis!r}")
        self.axis = axis
        self.bin = bin
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.acc = np.asarray(acc, dtype=np.float64)
        self.trials = np.asarray(trials, dtype=np.int64)
        n = len(self.labels)
        if self.acc.shape != (n, n) or self.trials.shape != (n, n):
            raise InvalidArgumentError("matrix shape does not match labels")

    @property
    def n(self) -> int:
        return len(self.labels)

    def cell(self, key_i, key_j, min_trials: int = 1) -> float | None:
        i, j = self.index.get(key_i), self.index.get(key_j)
        if i is None or j is None or i == j:
            return None
        if self.trials[i, j] < min_trials:
            return None
        return float(self.acc[i, j])

    def present_values(self) -> np.ndarray:
        iu, ju = np.triu_indices(self.n, k=1)
        mask = self.trials[iu, ju] > 0
        return self.acc[iu[mask], ju[mask]]

    def to_dict(self) -> dict:
        iu, ju = np.triu_indices(self.n, k=1)
        cells = [[int(i), int(j), float(self.acc[i, j]), int(self.trials[i, j])]
                 for i, j in zip(iu, ju) if self.trials[i, j] > 0]
        return {
            "version": 1,
            "axis": self.axis,
            "bin": self.bin.value if self.bin else "all",
            "labels": [list(l) if isinstance(l, tuple) else l for l in self.labels],
            "cells": cells,
        }

    def to_table(self) -> str:
        """Rectangular text table (rows/cols in label order, '-' for missing)."""
        head = "\t".join(["#"] + [_label_str(l) for l in self.labels])
        rows = [head]
        for i, lab in enumerate(self.labels):
            cells = []
            for j in range(self.n):
                if i == j or self.trials[i, j] == 0:
                    cells.append("-")
                else:
                    cells.append(f"{self.acc[i, j]:.4f}")
            rows.append("\t".join([_label_str(lab)] + cells))
        return "\n".join(rows) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "PairMatrix":
        if data.get("version") != 1:
            raise DataLoadError(f"unsupported matrix version {data.get('version')!r}")
        labels = [tuple(l) if isinstance(l, list) else l for l in data["labels"]]
        n = len(labels)
        acc = np.zeros((n, n))
        trials = np.zeros((n, n), dtype=np.int64)
        for i, j, a, t in data["cells"]:
            acc[i, j] = acc[j, i] = a
            trials[i, j] = trials[j, i] = t
        bin_name = data.get("bin", "all")
        b = None if bin_name == "all" else CategoryBin(bin_name)
        return cls(data["axis"], b, labels, acc, trials)

    @classmethod
    def load(cls, path: str | Path) -> "PairMatrix":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataLoadError(f"cannot read matrix file {path}: {exc}") from exc
        return cls.from_dict(data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))


def _label_str(label) -> str:
    if isinstance(label, tuple):
        return Marker(*label).token()
    return str(label)


@dataclass(frozen=True)
class MarkerAccuracyTable:
    bin: CategoryBin | None
    acc: dict
    trials: dict

    def get(self, key, min_trials: int = 1) -> float | None:
        if self.trials.get(key, 0) < min_trials:
            return None
        return self.acc[key]

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "bin": self.bin.value if self.bin else "all",
            "rows": [[list(k), self.acc[k], self.trials[k]]
                     for k in sorted(self.acc)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MarkerAccuracyTable":
        if data.get("version") != 1:
            raise DataLoadError(f"unsupported marker table version {data.get('version')!r}")
        bin_name = data.get("bin", "all")
        b = None if bin_name == "all" else CategoryBin(bin_name)
        acc = {}
        trials = {}
        for key, a, t in data["rows"]:
            k = tuple(key)
            acc[k] = float(a)
            trials[k] = int(t)
        return cls(b, acc, trials)

    @classmethod
    def load(cls, path: str | Path) -> "MarkerAccuracyTable":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataLoadError(f"cannot read marker table {path}: {exc}") from exc
        return cls.from_dict(data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

def parse_trial_line(line: str, lineno: int, n_colors: int | None = None,
                     n_shapes: int | None = None) -> TrialRecord:
    parts = line.split("\t")
    if len(parts) != 7:
        raise DataLoadError(f"line {lineno}: expected 7 fields, got {len(parts)}")
    trial_id, count_s, cats_s, target_s, response_s, correct_s, group_id = parts
    try:
        count = int(count_s)
        target = int(target_s)
        response = None if response_s.strip() == TIMEOUT else int(response_s)
        markers = tuple(Marker.from_token(t) for t in cats_s.split(","))
    except ValueError as exc:
        raise DataLoadError(f"line {lineno}: {exc}") from exc
    correct = correct_s.strip().lower() == "true"
    if response is None:
        correct = False  # timeouts count as incorrect
    for m in markers:
        if n_colors is not None and m.color_id is not None and not 0 <= m.color_id < n_colors:
            raise DataLoadError(f"line {lineno}: unknown color_id {m.color_id}")
        if n_shapes is not None and m.shape_id is not None and not 0 <= m.shape_id < n_shapes:
            raise DataLoadError(f"line {lineno}: unknown shape_id {m.shape_id}")
    try:
        return TrialRecord(trial_id, count, markers, target, response, correct, group_id)
    except InvalidArgumentError as exc:
        raise DataLoadError(f"line {lineno}: {exc}") from exc


def ingest_trials(source: str | Path, n_colors: int | None = None,
                  n_shapes: int | None = None) -> list[TrialRecord]:
    path = Path(source)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise DataLoadError(f"cannot read trial log {path}: {exc}") from exc
    if not lines or lines[0].strip() != TRIAL_FILE_HEADER:
        raise DataLoadError(f"{path}: missing header {TRIAL_FILE_HEADER!r}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        # keep tabs intact: an empty trailing group_id field is legitimate
        records.append(parse_trial_line(line.rstrip("\r\n"), lineno, n_colors, n_shapes))
    return records


def write_trials(records: list[TrialRecord], path: str | Path) -> None:
    lines = [TRIAL_FILE_HEADER,
             "# trial_id\tcategory_count\tcategories\ttarget_index\tresponse_index\tcorrect\tgroup_id"]
    for r in records:
        resp = TIMEOUT if r.response_index is None else str(r.response_index)
        cats = ",".join(m.token() for m in r.categories)
        lines.append(f"{r.trial_id}\t{r.category_count}\t{cats}\t{r.target_index}"
                     f"\t{resp}\t{str(r.correct).lower()}\t{r.group_id}")
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Matrix construction
# ---------------------------------------------------------------------------

def _axis_keys(trial: TrialRecord, axis: str) -> list | None:
    if axis == "color":
        if trial.categories[0].color_id is None:
            return None
        return [m.color_id for m in trial.categories]
    if axis == "shape":
        if trial.categories[0].shape_id is None:
            return None
        return [m.shape_id for m in trial.categories]
    if trial.categories[0].color_id is None or trial.categories[0].shape_id is None:
        return None
    return [(m.color_id, m.shape_id) for m in trial.categories]


def _bin_filter(trials: list[TrialRecord], bin: CategoryBin | None) -> list[TrialRecord]:
    if bin is None:
        return list(trials)
    return [t for t in trials if t.category_count in bin.counts]


def pairwise_accuracy(trials: list[TrialRecord], axis: str,
                      bin: CategoryBin | None = None,
                      labels: list | None = None) -> PairMatrix:
    """acc[i][j] = correct appearances of pair {i, j} / total appearances.

    A trial with k categories contributes C(k, 2) pair observations. When
    `labels` is omitted the label universe is the sorted set of observed keys.
    """
    selected = _bin_filter(trials, bin)
    correct: dict = {}
    total: dict = {}
    observed = set()
    for t in selected:
        keys = _axis_keys(t, axis)
        if keys is None:
            continue
        observed.update(keys)
        for i in range(len(keys) - 1):
            for j in range(i + 1, len(keys)):
                pair = (keys[i], keys[j]) if keys[i] <= keys[j] else (keys[j], keys[i])
                total[pair] = total.get(pair, 0) + 1
                if t.correct:
                    correct[pair] = correct.get(pair, 0) + 1
    if labels is None:
        labels = sorted(observed)
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    acc = np.zeros((n, n))
    counts = np.zeros((n, n), dtype=np.int64)
    for pair, tot in total.items():
        a, b = pair
        if a not in index or b not in index:
            continue
        i, j = index[a], index[b]
        counts[i, j] = counts[j, i] = tot
        val = correct.get(pair, 0) / tot
        acc[i, j] = acc[j, i] = val
    return PairMatrix(axis, bin, labels, acc, counts)


def marker_accuracy(trials: list[TrialRecord],
                    bin: CategoryBin | None = None) -> MarkerAccuracyTable:
    """Individual marker accuracy: correct appearances / total appearances."""
    selected = _bin_filter(trials, bin)
    correct: dict = {}
    total: dict = {}
    for t in selected:
        keys = _axis_keys(t, "marker")
        if keys is None:
            continue
        for k in keys:
            total[k] = total.get(k, 0) + 1
            if t.correct:
                correct[k] = correct.get(k, 0) + 1
    acc = {k: correct.get(k, 0) / v for k, v in total.items()}
    return MarkerAccuracyTable(bin, acc, total)


def summary_stats(matrix: PairMatrix) -> dict:
    vals = matrix.present_values()
    if len(vals) == 0:
        raise PalettekitError("matrix has no present cells")
    return {
        "cells": int(len(vals)),
        "mean": float(vals.mean()),
        "min": float(vals.min()),
        "max": float(vals.max()),
        "stddev": float(vals.std()),
    }


def expected_pair_observations(trials: list[TrialRecord], axis: str,
                               bin: CategoryBin | None = None) -> int:
    """Count-conservation oracle: sum of C(k, 2) over contributing trials."""
    return sum(comb(t.category_count, 2) for t in _bin_filter(trials, bin)
               if _axis_keys(t, axis) is not None)
