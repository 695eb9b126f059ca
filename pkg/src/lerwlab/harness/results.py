"""Result records: long-format CSV rows, bootstrap fits, and manifests.

Reruns with the same config and seed reproduce every output byte: floats
are written with repr-stable formatting, JSON keys are sorted, and no
timestamps are recorded.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from .config import ExperimentConfig

__all__ = ["ResultRecord", "bootstrap_slope", "bootstrap_mean_ci", "fit_loglog"]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


@dataclass
class ResultRecord:
    config: ExperimentConfig
    rows: list = field(default_factory=list)  # (param, replica, observable, value)
    summary: dict = field(default_factory=dict)

    def add(self, param, replica, observable, value):
        self.rows.append((param, replica, observable, value))

    def add_many(self, param, observable, values):
        for i, v in enumerate(values):
            self.rows.append((param, i, observable, v))

    def values(self, observable, param=None) -> np.ndarray:
        out = [
            v
            for (p, _, obs, v) in self.rows
            if obs == observable and (param is None or p == param)
        ]
        return np.asarray(out, dtype=float)

    def write(self, out_dir) -> None:
        os.makedirs(out_dir, exist_ok=True)
        exp = self.config.experiment
        with open(os.path.join(out_dir, "results.csv"), "w") as f:
            f.write("experiment,param,replica,observable,value\n")
            for param, replica, obs, val in self.rows:
                f.write(f"{exp},{param},{replica},{obs},{_fmt(val)}\n")
        with open(os.path.join(out_dir, "summary.json"), "w") as f:
            json.dump(_jsonable(self.summary), f, indent=2, sort_keys=True)
            f.write("\n")
        manifest = {
            "experiment": exp,
            "config": {k: str(v) for k, v in sorted(self.config.params.items())},
            "config_hash": self.config.content_hash(),
            "seed": self.config.seed,
            "code_version": __version__,
        }
        with open(os.path.join(out_dir, "manifest.json"), "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(format(float(obj), ".12g"))
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    return str(obj)


def fit_loglog(xs, ys) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = (xs > 0) & (ys > 0)
    if keep.sum() < 2:
        return float("nan")
    lx = np.log(xs[keep])
    ly = np.log(ys[keep])
    lx = lx - lx.mean()
    return float((lx * ly).sum() / (lx * lx).sum())


def bootstrap_slope(xs, samples_per_x, seed, n_boot: int = 1000, stat=np.mean,
                    counts=None):
    """Replica bootstrap of the log-log slope of stat(samples) against x.

    samples_per_x: list of per-replica observable arrays, one per x.
    counts: optional (hits, n) pairs instead, resampled binomially.
    Returns (slope, lo, hi) with a 95 percent percentile interval.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xB007]))
    xs = np.asarray(xs, dtype=float)
    if counts is not None:
        means = np.array([h / n for (h, n) in counts])
    else:
        means = np.array([stat(np.asarray(s, dtype=float)) for s in samples_per_x])
    point = fit_loglog(xs, means)
    slopes = np.empty(n_boot)
    for b in range(n_boot):
        ys = np.empty(len(xs))
        for i in range(len(xs)):
            if counts is not None:
                h, n = counts[i]
                ys[i] = rng.binomial(int(n), h / n) / n if n else 0.0
            else:
                s = np.asarray(samples_per_x[i], dtype=float)
                ys[i] = stat(rng.choice(s, size=len(s), replace=True))
        slopes[b] = fit_loglog(xs, np.maximum(ys, 1e-300))
    lo, hi = np.percentile(slopes, [2.5, 97.5])
    return float(point), float(lo), float(hi)


def bootstrap_mean_ci(samples, seed, n_boot: int = 1000):
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xC1]))
    s = np.asarray(samples, dtype=float)
    means = np.array([rng.choice(s, size=len(s)).mean() for _ in range(n_boot)])
    lo, hi = np.percentile(means, [2.5, 97.5])
    return float(s.mean()), float(lo), float(hi)
