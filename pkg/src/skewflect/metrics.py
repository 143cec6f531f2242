"""Evaluation metrics: marginal Wasserstein distances, MSE, accuracy, rate fits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class W1Report:
    per_dimension: np.ndarray
    sample_sizes: tuple[int, int]


def _quantiles_on_grid(sorted_x: np.ndarray, m: int) -> np.ndarray:
    # left-continuous empirical quantile Q(p) = x_(ceil(p n)) at p = (i - 1/2) / m
    n = sorted_x.size
    p = (np.arange(1, m + 1) - 0.5) / m
    return sorted_x[np.ceil(p * n).astype(int) - 1]


def w1_1d(a, b) -> float:
    """Empirical 1-Wasserstein distance between two scalar samples.

    Equal sizes pair order statistics. Unequal sizes compare both empirical
    quantile functions on the midpoint grid of the larger sample.
    """
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("w1_1d needs nonempty samples")
    if a.size == b.size:
        return float(np.mean(np.abs(a - b)))
    m = max(a.size, b.size)
    return float(np.mean(np.abs(_quantiles_on_grid(a, m) - _quantiles_on_grid(b, m))))


def w1_per_dim(A, B) -> W1Report:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise ValueError(f"sample matrices must share a dimension, got {A.shape} and {B.shape}")
    dists = np.array([w1_1d(A[:, i], B[:, i]) for i in range(A.shape[1])])
    return W1Report(dists, (A.shape[0], B.shape[0]))


def mse_trace(trace, ds) -> np.ndarray:
    """``mean_j (y_j - x_k^T a_j)^2`` at each recorded iterate, averaged over chains."""
    states = trace.states if hasattr(trace, "states") else np.asarray(trace, dtype=float)
    if states.ndim == 2:
        states = states[:, None, :]
    if states.shape[-1] != ds.d:
        raise ValueError(f"states have dimension {states.shape[-1]}, data has {ds.d}")
    out = np.empty(states.shape[0])
    for r, xs in enumerate(states):
        resid = ds.labels - xs @ ds.features.T  # (m, n)
        out[r] = np.mean(resid**2)
    return out


def accuracy(beta, ds):
    """Fraction of labels matched by ``1{beta^T X >= 0}`` (ties go to class 1).

    ``beta`` may be a stack of coefficient vectors; one accuracy per row is
    returned then.
    """
    beta = np.asarray(beta, dtype=float)
    pred = (np.atleast_2d(beta) @ ds.features.T >= 0.0).astype(float)
    acc = np.mean(pred == ds.labels, axis=1)
    return float(acc[0]) if beta.ndim == 1 else acc


def fit_exp_rate(values, times) -> tuple[float, float]:
    """Least-squares fit of ``log values ~ -rate * t``; returns ``(rate, r^2)``."""
    values = np.asarray(values, dtype=float)
    times = np.asarray(times, dtype=float)
    if values.size < 3 or values.size != times.size:
        raise ValueError("need at least three (time, value) pairs")
    logv = np.log(np.clip(values, 1e-300, None))
    if np.ptp(logv) == 0.0:
        return 0.0, 1.0
    fit = stats.linregress(times, logv)
    return float(-fit.slope), float(fit.rvalue**2)


def correction_rate_halves(trace) -> tuple[float, float]:
    """Boundary correction accumulated per unit time on each half of the run."""
    K = trace.corrections.size
    half = K // 2
    if half == 0:
        raise ValueError("run too short to split")
    first = trace.corrections[:half].sum() / (half * trace.stepsize)
    second = trace.corrections[half:].sum() / ((K - half) * trace.stepsize)
    return float(first), float(second)


def moment_gaps(samples, reference) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate absolute differences of means and of variances."""
    samples = np.asarray(samples, dtype=float)
    reference = np.asarray(reference, dtype=float)
    return (np.abs(samples.mean(axis=0) - reference.mean(axis=0)),
            np.abs(samples.var(axis=0, ddof=1) - reference.var(axis=0, ddof=1)))


def hitting_iteration(curve, iterations, factor: float = 1.1) -> int:
    """First recorded iteration at which ``curve`` falls below ``factor`` times its final value."""
    curve = np.asarray(curve, dtype=float)
    below = np.flatnonzero(curve <= factor * curve[-1])
    return int(np.asarray(iterations)[below[0]])
