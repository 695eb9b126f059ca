"""Experiment configuration: flat key=value files with typed accessors."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

__all__ = ["ExperimentConfig", "parse_config", "load_config"]

EXPERIMENTS = [
    "one-point",
    "conditional-hitting",
    "growth",
    "maximal",
    "two-point",
    "separation",
    "bottleneck",
    "driving",
    "natural-time",
    "escape",
    "oracle-suite",
]


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}"
            )
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")

    # -- typed accessors with defaults -------------------------------------

    def get(self, key, default=None):
        return self.params.get(key, default)

    @property
    def seed(self) -> int:
        return int(self.params.get("seed", 1))

    @property
    def replicas(self) -> int:
        return int(self.params.get("replicas", 1000))

    @property
    def kappa(self) -> float:
        return float(self.params.get("kappa", 2.0))

    @property
    def h(self) -> float:
        return float(self.params.get("h", 0.01))

    @property
    def dt(self) -> float:
        return float(self.params.get("dt", 1e-4))

    def float_list(self, key, default):
        raw = self.params.get(key)
        if raw is None:
            return list(default)
        if isinstance(raw, (list, tuple)):
            return [float(v) for v in raw]
        return [float(v) for v in str(raw).split(",") if v != ""]

    def int_list(self, key, default):
        return [int(round(v)) for v in self.float_list(key, default)]

    def canonical(self) -> str:
        lines = [f"experiment={self.experiment}"]
        for k in sorted(self.params):
            lines.append(f"{k}={self.params[k]}")
        return "\n".join(lines)

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def parse_config(text: str, experiment: str = None) -> ExperimentConfig:
    params = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (want key=value): {raw!r}")
        key, val = line.split("=", 1)
        params[key.strip()] = val.strip()
    exp = params.pop("experiment", experiment)
    if exp is None:
        raise ValueError("config does not name an experiment")
    return ExperimentConfig(experiment=exp, params=params)


def load_config(path, experiment: str = None) -> ExperimentConfig:
    with open(path) as f:
        return parse_config(f.read(), experiment)
