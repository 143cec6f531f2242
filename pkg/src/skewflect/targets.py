"""Negative log-densities ``f`` with exact and minibatch gradients.

All ``value``/``gradient`` methods accept a single point ``(d,)`` or a stack
``(m, d)`` (one row per chain).
"""

from __future__ import annotations

from math import lgamma, log, pi

import numpy as np
from scipy.special import expit


def _check(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2) or x.shape[-1] != d:
        raise ValueError(f"expected dimension {d}, got array of shape {x.shape}")
    return x


def log_unit_ball_volume(d: int) -> float:
    return 0.5 * d * log(pi) - lgamma(0.5 * d + 1.0)


class Potential:
    """Base class. ``lipschitz`` is a bound on the gradient's Lipschitz constant."""

    dim: int
    lipschitz: float

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError


class Quadratic(Potential):
    """``f(x) = x^T H x / 2`` so that ``grad f = H x``."""

    def __init__(self, H):
        H = np.array(H, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("H must be square")
        if np.max(np.abs(H - H.T)) > 1e-12:
            raise ValueError("H must be symmetric")
        H.setflags(write=False)
        self.H = H
        self.dim = H.shape[0]
        self.lipschitz = float(np.linalg.norm(H, 2))

    def value(self, x):
        x = _check(x, self.dim)
        return 0.5 * np.sum(x * (x @ self.H), axis=-1)

    def gradient(self, x):
        x = _check(x, self.dim)
        return np.sum(self.H * x[..., None, :], axis=-1)


class GaussianStandard(Potential):
    """``f(x) = |x|^2 / 2``, the standard normal restricted to the body."""

    def __init__(self, d: int):
        self.dim = int(d)
        self.lipschitz = 1.0

    def value(self, x):
        x = _check(x, self.dim)
        return 0.5 * np.sum(x * x, axis=-1)

    def gradient(self, x):
        return _check(x, self.dim).copy()


class _DataPotential(Potential):
    """Sum over data points ``f = sum_j f_j`` (plus a constant)."""

    def __init__(self, features, labels):
        A = np.array(features, dtype=float)
        y = np.array(labels, dtype=float)
        if A.ndim != 2 or y.shape != (A.shape[0],):
            raise ValueError("features must be (n, d) and labels (n,)")
        if A.shape[0] == 0:
            raise ValueError("empty dataset")
        A.setflags(write=False)
        y.setflags(write=False)
        self.features, self.labels = A, y
        self.n, self.dim = A.shape

    @classmethod
    def from_dataset(cls, ds):
        return cls(ds.features, ds.labels)

    def _weights(self, x, A, y):
        """Per-datum scalar ``w`` such that ``grad f_j = w_j * a_j``."""
        raise NotImplementedError

    def gradient(self, x):
        x = _check(x, self.dim)
        w = self._weights(np.atleast_2d(x), self.features, self.labels)  # (m, n)
        g = w @ self.features
        return g[0] if x.ndim == 1 else g

    def stochastic_gradient(self, x, batch) -> np.ndarray:
        """``(n / b) * sum_{i in batch} grad f_i(x)``; unbiased for ``gradient``.

        ``batch`` is an index vector of length ``b``, or an ``(m, b)`` array
        with one row per chain when ``x`` is a stack.
        """
        x = _check(x, self.dim)
        batch = np.asarray(batch)
        if batch.size == 0 or batch.shape[-1] == 0:
            raise ValueError("empty minibatch")
        if not np.issubdtype(batch.dtype, np.integer):
            raise ValueError("batch indices must be integers")
        if batch.min() < 0 or batch.max() >= self.n:
            raise ValueError(f"batch index out of range [0, {self.n})")
        xs = np.atleast_2d(x)
        idx = np.broadcast_to(batch, (xs.shape[0], batch.shape[-1]))
        A = self.features[idx]  # (m, b, d)
        y = self.labels[idx]  # (m, b)
        w = self._batch_weights(xs, A, y)
        g = (self.n / idx.shape[1]) * np.einsum("mb,mbd->md", w, A)
        return g[0] if x.ndim == 1 else g


class LinearRegression(_DataPotential):
    """Gaussian likelihood with unit noise: ``f = sum_j (y_j - x^T a_j)^2 / 2``."""

    def __init__(self, features, labels):
        super().__init__(features, labels)
        self.lipschitz = float(np.linalg.norm(self.features.T @ self.features, 2))

    def value(self, x):
        x = _check(x, self.dim)
        r = self.labels - np.atleast_2d(x) @ self.features.T
        v = 0.5 * np.sum(r * r, axis=1)
        return v[0] if x.ndim == 1 else v

    def _weights(self, x, A, y):
        return -(y - x @ A.T)

    def _batch_weights(self, x, A, y):
        return -(y - np.einsum("mbd,md->mb", A, x))


class LogisticRegression(_DataPotential):
    """Bernoulli negative log-likelihood plus the uniform-prior constant.

    ``f(b) = sum_j [softplus(b^T X_j) - y_j b^T X_j] + log V_d`` where ``V_d``
    is the unit-ball volume; the constant never affects gradients.
    """

    def __init__(self, features, labels):
        super().__init__(features, labels)
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise ValueError("logistic labels must be 0 or 1")
        self.lipschitz = 0.25 * float(np.linalg.norm(self.features.T @ self.features, 2))
        self.log_prior_volume = log_unit_ball_volume(self.dim)

    def value(self, x):
        x = _check(x, self.dim)
        z = np.atleast_2d(x) @ self.features.T
        v = np.sum(np.logaddexp(0.0, z) - self.labels * z, axis=1) + self.log_prior_volume
        return v[0] if x.ndim == 1 else v

    def _weights(self, x, A, y):
        return expit(x @ A.T) - y

    def _batch_weights(self, x, A, y):
        return expit(np.einsum("mbd,md->mb", A, x)) - y


def draw_minibatch(n: int, b: int, rng: np.random.Generator) -> np.ndarray:
    """``b`` distinct indices drawn uniformly from ``range(n)``."""
    if not 1 <= b <= n:
        raise ValueError(f"batch size must satisfy 1 <= b <= n, got b={b}, n={n}")
    return rng.choice(n, size=b, replace=False)


def potential_from_config(spec: dict, d: int, dataset=None) -> Potential:
    kind = str(spec.get("kind", "")).lower()
    if kind in ("gaussian", "gaussian_standard"):
        return GaussianStandard(d)
    if kind == "quadratic":
        return Quadratic(spec["H"])
    if kind in ("linear_regression", "logistic_regression"):
        if dataset is None:
            raise ValueError(f"{kind} potential needs a dataset")
        cls = LinearRegression if kind == "linear_regression" else LogisticRegression
        return cls.from_dataset(dataset)
    raise ValueError(f"unknown potential kind {spec.get('kind')!r}")
