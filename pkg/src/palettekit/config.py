"""Runtime configuration: scoring weights, JND profiles, encoding advice.

All values here are configuration, not model logic; the CLI and service can
override them from a JSON config file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .colorlab import JndParams
from .errors import InvalidArgumentError

JND_PROFILES = {
    "engineering-model-default": JndParams(),
    # stricter variant requiring an 80% detection level
    "engineering-model-p80": JndParams(p=0.8, name="engineering-model-p80"),
}

DEFAULT_MIN_TRIALS = 5


@dataclass(frozen=True)
class ScoringWeights:
    marker_pair_mean: float = 0.35
    marker_individual_mean: float = 0.20
    color_pair_mean: float = 0.15
    shape_pair_mean: float = 0.15
    lightness_variance: float = 0.075
    shape_type_mix: float = 0.075

    def __post_init__(self):
        vals = self.as_dict().values()
        if any(v < 0 for v in vals):
            raise InvalidArgumentError("scoring weights must be nonnegative")
        if abs(sum(vals) - 1.0) > 1e-9:
            raise InvalidArgumentError(f"scoring weights must sum to 1, got {sum(vals)}")

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# Encoding advice by category count, derived from per-count significance of
# the redundancy benefit: clear wins at 5-8, marginal elsewhere, none at 2.
AUTO_ENCODING_TABLE = {
    2: ("color_only", "redundancy shows no benefit at 2 categories"),
    3: ("redundant", "diminished benefit below 5 categories"),
    4: ("redundant", "diminished benefit below 5 categories"),
    5: ("redundant", None),
    6: ("redundant", None),
    7: ("redundant", None),
    8: ("redundant", None),
    9: ("redundant", "diminished benefit above 8 categories"),
    10: ("redundant", "diminished benefit above 8 categories"),
}


@dataclass(frozen=True)
class AppConfig:
    weights: ScoringWeights = ScoringWeights()
    jnd_profile: str = "engineering-model-default"
    min_trials: int = DEFAULT_MIN_TRIALS
    shortlist_size: int = 50
    auto_encoding: dict = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.jnd_profile not in JND_PROFILES:
            raise InvalidArgumentError(f"unknown JND profile {self.jnd_profile!r}")
        if self.auto_encoding is None:
            object.__setattr__(self, "auto_encoding", dict(AUTO_ENCODING_TABLE))

    @property
    def jnd_params(self) -> JndParams:
        return JND_PROFILES[self.jnd_profile]


def load_config(path: str | Path | None = None) -> AppConfig:
    if path is None:
        return AppConfig()
    data = json.loads(Path(path).read_text())
    weights = ScoringWeights(**data["weights"]) if "weights" in data else ScoringWeights()
    table = {int(k): tuple(v) for k, v in data.get("auto_encoding", {}).items()} or None
    return AppConfig(
        weights=weights,
        jnd_profile=data.get("jnd_profile", "engineering-model-default"),
        min_trials=int(data.get("min_trials", DEFAULT_MIN_TRIALS)),
        shortlist_size=int(data.get("shortlist_size", 50)),
        auto_encoding=table,
    )
