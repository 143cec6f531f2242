"""Experiment configuration: defaults per experiment and YAML ingestion."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

EXPERIMENTS = ("toy_gaussian", "bayes_linreg", "bayes_logreg", "theory_check")


class ConfigError(ValueError):
    """Raised for any invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    experiment: str
    body: dict
    skew: dict
    stepsize: float = 1e-4
    iterations: int = 1000
    chains: int = 100
    record_every: int = 1
    batch_size: int | None = None
    initial: object = "uniform"
    data: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    seeds: list = field(default_factory=lambda: [0, 1, 2])
    output_dir: Path = Path("results")
    reference_count: int = 3000
    reference_seed: int = 12345
    workers: int = 1
    plot: bool = False

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if not self.seeds:
            raise ConfigError("seeds must be a nonempty list")
        if any((not isinstance(s, int)) or s < 0 for s in self.seeds):
            raise ConfigError("seeds must be nonnegative integers")
        if not self.stepsize > 0:
            raise ConfigError("stepsize must be positive")
        if self.iterations < 0 or self.chains < 1 or self.record_every < 1:
            raise ConfigError("iterations >= 0, chains >= 1 and record_every >= 1 required")
        if self.batch_size is not None and self.batch_size < 1:
            raise ConfigError("batch_size must be positive")
        path = self.data.get("path")
        if path is not None and not Path(path).exists():
            raise ConfigError(f"data file {path} does not exist")
        tf = self.data.get("test_fraction", 0.2)
        if not 0.0 < tf < 1.0:
            raise ConfigError("test_fraction must lie in (0, 1)")
        if self.experiment == "bayes_logreg":
            source = self.data.get("source", "synthetic")
            if source not in ("synthetic", "telescope", "titanic"):
                raise ConfigError(f"unknown logistic data source {source!r}")
            if source != "synthetic" and path is None:
                raise ConfigError(f"{source} data needs data.path")
        self.output_dir = Path(self.output_dir)
        return self


def _toy_defaults(body_kind: str) -> dict:
    if body_kind == "box":
        body = {"kind": "box", "lower": [-1.0, -1.0, -1.0], "upper": [1.0, 1.0, 1.0]}
        return dict(body=body, skew={"kind": "tridiagonal", "a": 2.0}, initial=[0.5, -0.2, 0.8])
    body = {"kind": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0}
    return dict(body=body, skew={"kind": "tridiagonal", "a": 1.0}, initial=[0.3, 0.6, -0.4])


_LOGREG_SOURCES = {
    "synthetic": dict(batch_size=50, iterations=1000, a=2.0,
                      data={"n": 2000, "d": 3, "standardize": False}),
    "telescope": dict(batch_size=100, iterations=1000, a=1.5, data={"standardize": True}),
    "titanic": dict(batch_size=50, iterations=1500, a=2.0, data={"standardize": True}),
}


def default_config(experiment: str, *, body_kind: str = "ball", source: str = "synthetic") -> dict:
    """Reference-protocol defaults as a plain dict (before any user overrides)."""
    if experiment == "toy_gaussian":
        return dict(experiment=experiment, stepsize=1e-4, iterations=5000, chains=3000,
                    record_every=50, **_toy_defaults(body_kind))
    if experiment == "bayes_linreg":
        return dict(experiment=experiment,
                    body={"kind": "ball", "center": [0.0, 0.0], "radius": 1.0},
                    skew={"kind": "tridiagonal", "a": 2.0},
                    stepsize=1e-4, iterations=600, chains=100, record_every=1, batch_size=50,
                    data={"n": 10000, "noise_var": 0.25, "seed": 0})
    if experiment == "bayes_logreg":
        if source not in _LOGREG_SOURCES:
            raise ConfigError(f"unknown logistic data source {source!r}")
        d = _LOGREG_SOURCES[source]
        data = {"source": source, "test_fraction": 0.2, "seed": 0, **d["data"]}
        return dict(experiment=experiment,
                    body={"kind": "ball", "radius": 1.0},
                    skew={"kind": "tridiagonal", "a": d["a"]},
                    stepsize=1e-4, iterations=d["iterations"], chains=100, record_every=10,
                    batch_size=d["batch_size"], data=data)
    if experiment == "theory_check":
        return dict(experiment=experiment,
                    body={"kind": "ball", "center": [0.0, 0.0, 0.0], "radius": 5.0},
                    skew={"kind": "tridiagonal", "a": 1.0},
                    stepsize=1e-4, iterations=20000, chains=2, record_every=100,
                    initial=[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
                    options={"H": [1.0, 2.0, 3.0], "skew_params": [0.0, 1.0, 2.0],
                             "sweep_count": 1000, "sweep_dims": [2, 10]},
                    seeds=[0])
    raise ConfigError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k in ("data", "options"):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def build_config(experiment: str, overrides: dict | None = None) -> ExperimentConfig:
    """Defaults for ``experiment`` with ``overrides`` layered on top, validated.

    Overrides may nest sampler settings under a ``sampler`` block, as config
    files do.
    """
    overrides = dict(overrides or {})
    overrides.pop("experiment", None)
    sampler = overrides.pop("sampler", None) or {}
    if not isinstance(sampler, dict):
        raise ConfigError("'sampler' must be a mapping")
    overrides.update(sampler)
    body_kind = str((overrides.get("body") or {}).get("kind", "ball")).lower()
    source = str((overrides.get("data") or {}).get("source", "synthetic")).lower()
    merged = _merge(default_config(experiment, body_kind=body_kind, source=source), overrides)
    if "stepsize" in merged:
        merged["stepsize"] = float(merged["stepsize"])
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {sorted(unknown)}")
    return ExperimentConfig(**merged).validate()


def load_config(path) -> ExperimentConfig:
    """Read a YAML experiment description."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        raw = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(raw, dict) or "experiment" not in raw:
        raise ConfigError(f"{path}: expected a mapping with an 'experiment' key")
    return build_config(raw["experiment"], raw)
