"""Antisymmetric drift fields and the oblique boundary maps built from them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import ConvexBody

ANTISYM_TOL = 1e-12


@dataclass(frozen=True)
class SkewField:
    """A (constant) antisymmetric matrix field ``x -> J(x)``.

    Only constant fields are needed by the experiments, so ``J`` is stored
    once; ``at`` and ``apply`` take the state anyway so that state-dependent
    fields can slot in later without touching the samplers.
    """

    matrix: np.ndarray
    kind: str = "constant"
    lipschitz: float = 0.0
    sup_norm: float = field(init=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("skew field matrix must be square")
        if np.max(np.abs(m + m.T), initial=0.0) > ANTISYM_TOL:
            raise ValueError("skew field matrix must be antisymmetric (J + J^T = 0)")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "sup_norm", float(np.linalg.norm(m, 2)) if m.size else 0.0)

    @classmethod
    def zero(cls, d: int) -> "SkewField":
        return cls(np.zeros((d, d)), kind="zero")

    @classmethod
    def constant(cls, matrix) -> "SkewField":
        return cls(matrix, kind="constant")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    @property
    def delta0(self) -> float:
        """Guaranteed lower bound on ``<nu^J, nu>`` over all unit ``nu``."""
        return 1.0 / np.sqrt(1.0 + self.sup_norm**2)

    def at(self, x) -> np.ndarray:
        return self.matrix

    def apply(self, x, v) -> np.ndarray:
        """``J(x) v`` for a vector or a stack of row vectors."""
        v = np.asarray(v, dtype=float)
        # elementwise product-sum keeps each row independent of the batch size
        return np.sum(self.matrix * v[..., None, :], axis=-1)

    def to_config(self) -> dict:
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "tridiagonal":
            return {"kind": "tridiagonal", "a": float(self.matrix[0, 1])}
        return {"kind": "constant", "matrix": self.matrix.tolist()}


def build_tridiagonal_skew(d: int, a: float) -> SkewField:
    """``d x d`` matrix with ``a`` above the diagonal and ``-a`` below it.

    For ``d = 3`` this is the ``J_a`` family used in the toy and regression
    experiments.
    """
    if d < 2:
        raise ValueError("tridiagonal skew field needs d >= 2")
    j = a * (np.eye(d, k=1) - np.eye(d, k=-1))
    return SkewField(j, kind="tridiagonal")


def skew_field_from_config(spec: dict, d: int) -> SkewField:
    kind = str(spec.get("kind", "")).lower()
    if kind == "zero":
        return SkewField.zero(d)
    if kind == "tridiagonal":
        return build_tridiagonal_skew(d, float(spec["a"]))
    if kind == "constant":
        f = SkewField.constant(spec["matrix"])
        if f.dim != d:
            raise ValueError(f"skew matrix is {f.dim}x{f.dim}, body dimension is {d}")
        return f
    raise ValueError(f"unknown skew field kind {spec.get('kind')!r}")


def skew_normal(J, nu) -> np.ndarray:
    """Oblique unit direction ``(I + J) nu / sqrt(|nu|^2 + |J nu|^2)``.

    Because ``<nu, J nu> = 0`` the result has unit norm and
    ``<nu^J, nu> = 1 / sqrt(1 + |J nu|^2)``.
    """
    J = np.asarray(J, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if np.max(np.abs(J + J.T), initial=0.0) > ANTISYM_TOL:
        raise ValueError("J must be antisymmetric")
    if np.any(np.abs(np.linalg.norm(nu, axis=-1) - 1.0) > 1e-10):
        raise ValueError("nu must be a unit vector")
    return _skew_normal(J, nu)


def _skew_normal(J, nu):
    jnu = np.sum(J * nu[..., None, :], axis=-1)
    denom = np.sqrt(np.sum(nu * nu, axis=-1) + np.sum(jnu * jnu, axis=-1))
    return (nu + jnu) / denom[..., None]


def skew_reflect(body: ConvexBody, field: SkewField, x) -> np.ndarray:
    """``(I + J(x)) (P(x) - x) + P(x)``; the identity inside the body."""
    x = np.asarray(x, dtype=float)
    p = body.project(x)
    return field.apply(x, p - x) + (p - x) + p


def skew_project(body: ConvexBody, field: SkewField, x):
    """Oblique projection of ``x`` onto the body along the skew normal.

    Exterior points are moved along ``nu^J(P(x))`` to the first boundary
    point hit. If that ray misses the body the Euclidean projection is
    returned and the point is flagged.

    Returns:
        ``(point, fallback)``; for stacked input both are arrays.
    """
    x = np.asarray(x, dtype=float)
    pts, fallback = _skew_project(body, field, np.atleast_2d(x))
    if x.ndim == 1:
        return pts[0], bool(fallback[0])
    return pts, fallback


def _skew_project(body: ConvexBody, field: SkewField, x: np.ndarray):
    p = body._project(x)
    out = np.any(p != x, axis=1)
    fallback = np.zeros(x.shape[0], dtype=bool)
    if not out.any() or field.is_zero:
        return p, fallback
    xo, po = x[out], p[out]
    diff = po - xo
    nu = diff / np.linalg.norm(diff, axis=1, keepdims=True)
    jnu = field.apply(po, nu)
    # J nu = 0 (e.g. an odd-dimensional zero mode) means nu^J = nu: the ray lands on P(x)
    tilted = np.any(jnu != 0.0, axis=1)
    if tilted.any():
        u = _skew_normal(field.at(po), nu[tilted])
        t = body._ray_entry(xo[tilted], u)
        miss = np.isnan(t)
        hits = xo[tilted] + t[:, None] * u
        hits = body._project(hits)  # snap ulp-level overshoot onto the boundary
        hits[miss] = po[tilted][miss]
        sub = po.copy()
        sub[tilted] = hits
        p = p.copy()
        p[out] = sub
        idx = np.flatnonzero(out)[tilted]
        fallback[idx] = miss
    return p, fallback


@dataclass(frozen=True)
class ResolventSummary:
    """Symmetric part ``S = (I - J^2)^{-1}`` of ``(I + J)^{-1}`` and its spectrum."""

    S: np.ndarray
    eigenvalues: np.ndarray

    @property
    def c(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def C(self) -> float:
        return float(self.eigenvalues[-1])


def resolvent_symmetric_part(J) -> ResolventSummary:
    """Symmetric part of the resolvent ``(I + J)^{-1}`` for antisymmetric ``J``.

    ``S`` is obtained by solving ``(I - J^2) S = I``; ``I - J^2`` is symmetric
    positive definite so the solve is always well posed.
    """
    if isinstance(J, SkewField):
        J = J.matrix
    J = np.asarray(J, dtype=float)
    if np.max(np.abs(J + J.T), initial=0.0) > ANTISYM_TOL * max(1.0, np.abs(J).max(initial=0.0)):
        raise ValueError("J must be antisymmetric")
    eye = np.eye(J.shape[0])
    S = np.linalg.solve(eye - J @ J, eye)
    S = 0.5 * (S + S.T)
    return ResolventSummary(S=S, eigenvalues=np.linalg.eigvalsh(S))


def weighted_sq_norm(J, v) -> np.ndarray:
    """``v^T (I + J)^{-1} v``, evaluated through its symmetric part by a solve."""
    J = J.matrix if isinstance(J, SkewField) else np.asarray(J, dtype=float)
    v = np.asarray(v, dtype=float)
    A = np.eye(J.shape[0]) - J @ J
    sol = np.linalg.solve(A, np.atleast_2d(v).T).T
    w = np.sum(np.atleast_2d(v) * sol, axis=1)
    return w[0] if v.ndim == 1 else w
