"""Experiment configuration mirroring the benchmark protocol defaults."""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, field, replace

import yaml

ALGORITHMS = ("kmeans", "fcm", "ssfcm", "as3fcm", "kgbs3fcm")

DEFAULT_RATIOS = (0.00, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30)
DEFAULT_LAMBDA_GRID = (1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0)


@dataclass
class SafeParams:
    """Safe-clustering constants; defaults follow the benchmark protocol."""

    density_k: int = 5
    safety_threshold: float = 0.6
    un_min: int = 5
    un_max: int | None = None  # None -> round(sqrt(n))
    tol: float = 1e-4
    max_iter: int = 100

    def validate(self):
        if not 0 <= self.safety_threshold <= 1:
            raise ValueError("safety_threshold must lie in [0, 1]")
        if self.un_max is not None and self.un_min > self.un_max:
            raise ValueError("un_min must not exceed un_max")


@dataclass
class ExperimentConfig:
    dataset: str = "bupa"
    algorithm: str = "kgbs3fcm"
    mislabel_ratios: tuple = DEFAULT_RATIOS
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    repeats: int = 20
    base_seed: int = 0
    labeled_fraction: float = 0.2
    standardize: bool = True
    data_dir: str | None = None
    safe: SafeParams = field(default_factory=SafeParams)

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        for r in self.mislabel_ratios:
            if not 0 <= r <= 0.3:
                raise ValueError("mislabel ratios must lie in [0, 0.3]")
        if self.repeats < 1:
            raise ValueError("repeats must be positive")
        self.safe.validate()
        return self

    def grid(self):
        """Hyperparameter pairs searched for this algorithm.

        Unsupervised baselines take a single (None, None) slot; the plain
        semi-supervised baseline searches its fidelity weight on the same
        values; the safe algorithms search the full lambda1 x lambda2 grid.
        """
        if self.algorithm in ("kmeans", "fcm"):
            return [(None, None)]
        if self.algorithm == "ssfcm":
            return [(a, None) for a in self.lambda_grid]
        return [(l1, l2) for l1 in self.lambda_grid for l2 in self.lambda_grid]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        safe = d.pop("safe", {}) or {}
        cfg = cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()},
                  safe=SafeParams(**safe))
        return cfg.validate()

    @classmethod
    def from_yaml(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(yaml.safe_load(fh) or {})

    def to_yaml(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=False)

    def with_dataset(self, name):
        return replace(self, dataset=name)


def run_seed(base_seed, dataset, ratio, lambda1, lambda2, repeat):
    """Stable per-run seed; independent of execution order and process."""
    key = f"{base_seed}|{dataset}|{ratio:.6f}|{lambda1!r}|{lambda2!r}|{repeat}"
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")
