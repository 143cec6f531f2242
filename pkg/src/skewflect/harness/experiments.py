"""Experiment drivers: compute functions plus ``cmd_*`` wrappers that write CSVs.

The compute functions return in-memory results so they can be checked
directly; the ``cmd_*`` functions serialise them with fixed headers.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import rng as streams
from ..data import (
    generate_linreg,
    generate_logreg,
    load_telescope,
    preprocess_titanic,
    standardize,
    train_test_split,
)
from ..geometry import body_from_config
from ..metrics import accuracy, fit_exp_rate, mse_trace, w1_per_dim
from ..samplers import (
    SamplerConfig,
    coupled_pair_run,
    rejection_sample_truncated_gaussian,
    run_chains,
)
from ..skewfield import SkewField, build_tridiagonal_skew, resolvent_symmetric_part, skew_field_from_config
from ..targets import GaussianStandard, LinearRegression, LogisticRegression
from .config import ExperimentConfig

log = logging.getLogger(__name__)

W1_HEADER = ["iteration", "algorithm", "dim", "w1", "seed"]
MSE_HEADER = ["iteration", "algorithm", "mse", "seed"]
ACC_HEADER = ["iteration", "algorithm", "split", "mean", "std", "seeds"]
THEORY_HEADER = ["J", "predicted_rate", "fitted_rate", "r2"]


def _body_and_field(cfg: ExperimentConfig, d: int | None = None):
    spec = dict(cfg.body)
    if d is not None and "center" not in spec:
        spec["dim"] = d
    body = body_from_config(spec)
    return body, skew_field_from_config(cfg.skew, body.dim)


def _pair(cfg: ExperimentConfig, body, field, potential, seed, initial, stochastic):
    """SamplerConfigs for the skew sampler and its projected baseline, same seed."""
    common = dict(body=body, potential=potential, stepsize=cfg.stepsize,
                  iterations=cfg.iterations, chains=cfg.chains, initial=initial,
                  batch_size=cfg.batch_size if stochastic else None, seed=seed,
                  record_every=cfg.record_every)
    names = ("SRNSGLD", "PSGLD") if stochastic else ("SRNLMC", "PLMC")
    return {
        names[0]: SamplerConfig(field=field, method="skew", **common),
        names[1]: SamplerConfig(field=SkewField.zero(body.dim), method="projected", **common),
    }


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


# ---------------------------------------------------------------------------
# toy truncated Gaussian
# ---------------------------------------------------------------------------

@dataclass
class ToyResult:
    reference: np.ndarray
    iterations: np.ndarray
    curves: dict = field(default_factory=dict)  # (algorithm, seed) -> (R, d) W1 values
    traces: dict = field(default_factory=dict)  # (algorithm, seed) -> ChainTrace


def toy_gaussian(cfg: ExperimentConfig) -> ToyResult:
    """SRNLMC vs PLMC on the standard normal truncated to the body."""
    body, field_ = _body_and_field(cfg)
    potential = GaussianStandard(body.dim)
    reference = rejection_sample_truncated_gaussian(body, cfg.reference_count, cfg.reference_seed)
    res = None
    for seed in cfg.seeds:
        for name, scfg in _pair(cfg, body, field_, potential, seed, cfg.initial, False).items():
            trace = run_chains(scfg, workers=cfg.workers)
            if res is None:
                res = ToyResult(reference, trace.iterations)
            res.traces[name, seed] = trace
            res.curves[name, seed] = np.array(
                [w1_per_dim(states, reference).per_dimension for states in trace.states])
            log.info("%s seed %d: final W1 %s", name, seed, res.curves[name, seed][-1])
    return res


def cmd_toy_gaussian(cfg: ExperimentConfig) -> dict:
    res = toy_gaussian(cfg)
    out = cfg.output_dir
    rows = []
    for (alg, seed), curve in res.curves.items():
        for r, it in enumerate(res.iterations):
            for dim in range(curve.shape[1]):
                rows.append((int(it), alg, dim + 1, curve[r, dim], seed))
    files = {"w1_curve": _write_csv(out / "w1_curve.csv", W1_HEADER, rows)}

    d = res.reference.shape[1]
    state_rows = [("reference", -1, *x) for x in res.reference]
    for (alg, seed), tr in res.traces.items():
        state_rows += [(alg, seed, *x) for x in tr.final_states]
    files["final_states"] = _write_csv(
        out / "final_states.csv", ["algorithm", "seed"] + [f"x{i + 1}" for i in range(d)], state_rows)
    if cfg.plot:
        files.update(_plot_curves(out, "w1_curve", rows, key_cols=(1, 2), x_col=0, y_col=3,
                                  ylabel="W1 per dimension"))
    return files


# ---------------------------------------------------------------------------
# Bayesian linear regression
# ---------------------------------------------------------------------------

@dataclass
class LinRegResult:
    dataset: object
    iterations: np.ndarray
    mse: dict = field(default_factory=dict)  # (algorithm, seed) -> (R,)
    traces: dict = field(default_factory=dict)


def bayes_linreg(cfg: ExperimentConfig) -> LinRegResult:
    data = cfg.data
    ds = generate_linreg(int(data.get("n", 10000)), int(data.get("seed", 0)),
                         noise_var=float(data.get("noise_var", 0.25)))
    body, field_ = _body_and_field(cfg, ds.d)
    potential = LinearRegression.from_dataset(ds)
    stochastic = cfg.batch_size is not None
    res = None
    for seed in cfg.seeds:
        for name, scfg in _pair(cfg, body, field_, potential, seed, cfg.initial, stochastic).items():
            trace = run_chains(scfg, workers=cfg.workers)
            if res is None:
                res = LinRegResult(ds, trace.iterations)
            res.traces[name, seed] = trace
            res.mse[name, seed] = mse_trace(trace, ds)
    return res


def cmd_bayes_linreg(cfg: ExperimentConfig) -> dict:
    res = bayes_linreg(cfg)
    out = cfg.output_dir
    rows = [(int(it), alg, m, seed)
            for (alg, seed), curve in res.mse.items()
            for it, m in zip(res.iterations, curve)]
    files = {"mse_curve": _write_csv(out / "mse_curve.csv", MSE_HEADER, rows)}
    d = res.dataset.d
    post = [(alg, seed, *x) for (alg, seed), tr in res.traces.items() for x in tr.final_states]
    files["posterior_samples"] = _write_csv(
        out / "posterior_samples.csv", ["algorithm", "seed"] + [f"x{i + 1}" for i in range(d)], post)
    if cfg.plot:
        files.update(_plot_curves(out, "mse_curve", rows, key_cols=(1,), x_col=0, y_col=2,
                                  ylabel="MSE"))
    return files


# ---------------------------------------------------------------------------
# Bayesian logistic regression
# ---------------------------------------------------------------------------

@dataclass
class LogRegResult:
    train: object
    test: object
    iterations: np.ndarray
    accuracy: dict = field(default_factory=dict)  # (algorithm, split, seed) -> (R,)
    traces: dict = field(default_factory=dict)

    def aggregate(self):
        """``(algorithm, split) -> (mean, std, count)`` across seeds, per iteration."""
        groups = {}
        for (alg, split, _seed), curve in self.accuracy.items():
            groups.setdefault((alg, split), []).append(curve)
        out = {}
        for key, curves in groups.items():
            arr = np.array(curves)
            std = arr.std(axis=0, ddof=1) if len(arr) > 1 else np.zeros(arr.shape[1])
            out[key] = (arr.mean(axis=0), std, len(arr))
        return out


def load_logreg_data(cfg: ExperimentConfig):
    data = cfg.data
    source = data.get("source", "synthetic")
    if source == "synthetic":
        ds, _ = generate_logreg(int(data.get("n", 2000)), int(data.get("seed", 0)),
                                beta_true=data.get("beta_true"), d=int(data.get("d", 3)))
    elif source == "telescope":
        ds = load_telescope(data["path"])
    else:
        ds = preprocess_titanic(data["path"])
    if data.get("standardize", False):
        ds, _, _ = standardize(ds)
    return train_test_split(ds, float(data.get("test_fraction", 0.2)), int(data.get("seed", 0)))


def bayes_logreg(cfg: ExperimentConfig) -> LogRegResult:
    train, test = load_logreg_data(cfg)
    body, field_ = _body_and_field(cfg, train.d)
    potential = LogisticRegression.from_dataset(train)
    stochastic = cfg.batch_size is not None
    res = None
    for seed in cfg.seeds:
        for name, scfg in _pair(cfg, body, field_, potential, seed, cfg.initial, stochastic).items():
            trace = run_chains(scfg, workers=cfg.workers)
            if res is None:
                res = LogRegResult(train, test, trace.iterations)
            res.traces[name, seed] = trace
            for split, ds in (("train", train), ("test", test)):
                res.accuracy[name, split, seed] = np.array(
                    [accuracy(states, ds).mean() for states in trace.states])
    return res


def cmd_bayes_logreg(cfg: ExperimentConfig) -> dict:
    res = bayes_logreg(cfg)
    rows = []
    for (alg, split), (mean, std, count) in res.aggregate().items():
        rows += [(int(it), alg, split, m, s, count)
                 for it, m, s in zip(res.iterations, mean, std)]
    files = {"accuracy_curve": _write_csv(cfg.output_dir / "accuracy_curve.csv", ACC_HEADER, rows)}
    if cfg.plot:
        files.update(_plot_curves(cfg.output_dir, "accuracy_curve", rows, key_cols=(1, 2),
                                  x_col=0, y_col=3, ylabel="accuracy"))
    return files


# ---------------------------------------------------------------------------
# theory checks
# ---------------------------------------------------------------------------

@dataclass
class TheoryResult:
    sweep_count: int
    sweep_violations: int
    max_eigenvalue: float
    min_eigenvalue: float
    max_singular_mismatch: float
    rows: list  # (label, predicted, fitted, r2)
    runs: dict = field(default_factory=dict)


def random_antisymmetric(rng: np.random.Generator, d: int, scale: float = 3.0) -> np.ndarray:
    M = rng.uniform(-scale, scale, (d, d))
    return np.triu(M, 1) - np.triu(M, 1).T


def resolvent_sweep(count: int, dims, seed: int):
    """Check the resolvent spectrum on ``count`` random antisymmetric matrices.

    Returns ``(violations, max_eig, min_eig, max_mismatch)`` where a violation
    is an eigenvalue outside ``(0, 1 + 1e-10]`` or a nonzero singular value
    ``s`` of ``J`` with no eigenvalue within 1e-8 of ``1 / (1 + s^2)``.
    """
    gen = streams.stream(seed, 0, streams.AUX)
    lo, hi = dims
    violations, max_eig, min_eig, max_mismatch = 0, -np.inf, np.inf, 0.0
    for _ in range(count):
        d = int(gen.integers(lo, hi + 1))
        J = random_antisymmetric(gen, d)
        eig = resolvent_symmetric_part(J).eigenvalues
        sv = np.linalg.svd(J, compute_uv=False)
        sv = sv[sv > 1e-10]
        mismatch = max((np.min(np.abs(eig - 1.0 / (1.0 + s * s))) for s in sv), default=0.0)
        bad = eig.min() <= 0.0 or eig.max() > 1.0 + 1e-10 or mismatch > 1e-8
        violations += int(bad)
        max_eig, min_eig = max(max_eig, eig.max()), min(min_eig, eig.min())
        max_mismatch = max(max_mismatch, mismatch)
    return violations, float(max_eig), float(min_eig), float(max_mismatch)


def theory_check(cfg: ExperimentConfig) -> TheoryResult:
    opts = cfg.options
    seed = cfg.seeds[0]
    viol, max_eig, min_eig, mismatch = resolvent_sweep(
        int(opts.get("sweep_count", 1000)), opts.get("sweep_dims", [2, 10]), seed)

    body = body_from_config(cfg.body)
    H = np.diag(np.asarray(opts.get("H", [1.0, 2.0, 3.0]), dtype=float))
    lam_min = float(np.linalg.eigvalsh(H)[0])
    x0, x0_tilde = np.asarray(cfg.initial, dtype=float)
    rows, runs = [], {}
    for a in opts.get("skew_params", [0.0, 1.0, 2.0]):
        a = float(a)
        f = SkewField.zero(body.dim) if a == 0.0 else build_tridiagonal_skew(body.dim, a)
        C = resolvent_symmetric_part(f).C
        run = coupled_pair_run(H, f, body, cfg.stepsize, cfg.iterations, seed, x0, x0_tilde,
                               record_every=cfg.record_every)
        rate, r2 = fit_exp_rate(run.weighted_sq_norm, run.times)
        label = f"J_{a:g}"
        rows.append((label, 2.0 * lam_min / C, rate, r2))
        runs[label] = run
    return TheoryResult(int(opts.get("sweep_count", 1000)), viol, max_eig, min_eig, mismatch,
                        rows, runs)


def cmd_theory_check(cfg: ExperimentConfig) -> dict:
    res = theory_check(cfg)
    out = cfg.output_dir
    files = {"theory_check": _write_csv(out / "theory_check.csv", THEORY_HEADER, res.rows)}
    summary = {
        "sweep_count": res.sweep_count,
        "sweep_violations": res.sweep_violations,
        "max_eigenvalue": res.max_eigenvalue,
        "min_eigenvalue": res.min_eigenvalue,
        "max_singular_mismatch": res.max_singular_mismatch,
        "contacts": {k: r.boundary_events for k, r in res.runs.items()},
    }
    path = out / "resolvent_sweep.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    files["resolvent_sweep"] = path
    return files


COMMANDS = {
    "toy_gaussian": cmd_toy_gaussian,
    "bayes_linreg": cmd_bayes_linreg,
    "bayes_logreg": cmd_bayes_logreg,
    "theory_check": cmd_theory_check,
}


def _plot_curves(out: Path, stem: str, rows, key_cols, x_col, y_col, ylabel) -> dict:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = {}
    for row in rows:
        key = " / ".join(str(row[c]) for c in key_cols)
        series.setdefault(key, []).append((row[x_col], row[y_col]))
    fig, ax = plt.subplots(figsize=(7, 4))
    for key, pts in sorted(series.items()):
        pts = np.array(sorted(pts))
        # several seeds share a key: plot the seed mean
        xs = np.unique(pts[:, 0])
        ys = [pts[pts[:, 0] == x, 1].mean() for x in xs]
        ax.plot(xs, ys, label=key)
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
    path = out / f"{stem}.svg"
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return {f"{stem}_plot": path}
