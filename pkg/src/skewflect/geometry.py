"""Bounded convex bodies and the geometric primitives the samplers rely on.

Every method accepts either a single point of shape ``(d,)`` or a stack of
points of shape ``(m, d)`` and broadcasts over the leading axis.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

MEMBERSHIP_TOL = 1e-12
BOUNDARY_TOL = 1e-9


def _as_points(body: "ConvexBody", x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2) or x.shape[-1] != body.dim:
        raise ValueError(
            f"expected points of dimension {body.dim}, got array of shape {x.shape}"
        )
    return x


class ConvexBody(ABC):
    """A closed, bounded convex set containing the origin in its interior.

    Subclasses provide membership, Euclidean projection and ray clipping;
    the inner normal and its consistency with the other two are shared.

    Attributes:
        dim: Ambient dimension.
        inner_radius: Radius ``r`` of a ball about the origin inside the body.
        outer_radius: Radius ``R`` of a ball about the origin containing it.
    """

    dim: int
    inner_radius: float
    outer_radius: float

    @abstractmethod
    def _contains(self, x: np.ndarray, tol: float) -> np.ndarray: ...

    @abstractmethod
    def _project(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _ray_entry(self, origin: np.ndarray, direction: np.ndarray) -> np.ndarray:
        """Entry parameters ``t`` (NaN on a miss) for stacked rays."""

    @abstractmethod
    def _sample(self, rng: np.random.Generator, size: int) -> np.ndarray: ...

    @abstractmethod
    def to_config(self) -> dict: ...

    def contains(self, x, tol: float = MEMBERSHIP_TOL):
        """Closed-set membership with boundary tolerance ``tol``."""
        x = _as_points(self, x)
        inside = self._contains(np.atleast_2d(x), tol)
        return bool(inside[0]) if x.ndim == 1 else inside

    def project(self, x) -> np.ndarray:
        """Euclidean nearest point of the closed body (identity on members)."""
        x = _as_points(self, x)
        return self._project(np.atleast_2d(x)).reshape(x.shape)

    def inner_normal(self, x) -> np.ndarray:
        """Unit vector from an exterior point towards its projection.

        The result lies in the normal cone at ``project(x)`` and points into
        the body; at box edges and corners it is the diagonal element of
        that cone selected by the nearest point.

        Raises:
            ValueError: if any point is within ``MEMBERSHIP_TOL`` of the body.
        """
        x = _as_points(self, x)
        pts = np.atleast_2d(x)
        diff = self._project(pts) - pts
        dist = np.linalg.norm(diff, axis=1)
        if np.any(dist <= MEMBERSHIP_TOL):
            raise ValueError("interior point: inner normal is defined only outside the body")
        return (diff / dist[:, None]).reshape(x.shape)

    def ray_entry(self, origin, direction):
        """First point where the ray ``origin + t * direction`` enters the body.

        For a single ray returns ``(t, point)`` or ``None`` when the ray
        misses. For stacked rays returns arrays ``(t, points)`` with NaN rows
        for misses.
        """
        origin = _as_points(self, origin)
        direction = _as_points(self, direction)
        o = np.atleast_2d(origin)
        u = np.broadcast_to(np.atleast_2d(direction), o.shape)
        if np.any(np.linalg.norm(u, axis=1) == 0.0):
            raise ValueError("ray direction must be nonzero")
        if np.any(np.all(self._project(o) == o, axis=1)):
            raise ValueError("ray origin must lie strictly outside the body")
        t = self._ray_entry(o, u)
        points = o + t[:, None] * u
        if origin.ndim == 1:
            return None if np.isnan(t[0]) else (float(t[0]), points[0])
        return t, points

    def sample_uniform(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Uniform draw(s) from the body."""
        pts = self._sample(rng, 1 if size is None else size)
        return pts[0] if size is None else pts


class Ball(ConvexBody):
    """Euclidean ball ``{x : ||x - center|| <= radius}``."""

    def __init__(self, center, radius: float):
        self.center = np.array(center, dtype=float)
        if self.center.ndim != 1 or self.center.size == 0:
            raise ValueError("center must be a nonempty vector")
        self.radius = float(radius)
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        offset = float(np.linalg.norm(self.center))
        if offset >= self.radius:
            raise ValueError("body must contain the origin in its interior")
        self.dim = self.center.size
        self.inner_radius = self.radius - offset
        self.outer_radius = self.radius + offset
        self.center.setflags(write=False)

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"

    def _contains(self, x, tol):
        return np.linalg.norm(x - self.center, axis=1) <= self.radius + tol

    def _project(self, x):
        rel = x - self.center
        norm = np.linalg.norm(rel, axis=1)
        out = norm > self.radius
        res = x.copy()
        res[out] = self.center + self.radius * rel[out] / norm[out, None]
        return res

    def _ray_entry(self, origin, direction):
        rel = origin - self.center
        a = np.einsum("ij,ij->i", direction, direction)
        b = np.einsum("ij,ij->i", rel, direction)
        c = np.einsum("ij,ij->i", rel, rel) - self.radius**2
        disc = b * b - a * c
        t = np.full(origin.shape[0], np.nan)
        # origin outside means c > 0: both roots share a sign, entry needs b < 0
        hit = (disc >= 0.0) & (b < 0.0)
        # smaller root written as c / q to stay accurate when c is tiny
        q = -b[hit] + np.sqrt(disc[hit])
        t[hit] = c[hit] / q
        return t

    def _sample(self, rng, size):
        g = rng.standard_normal((size, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        u = rng.random(size) ** (1.0 / self.dim)
        return self.center + self.radius * u[:, None] * g

    def to_config(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


class Box(ConvexBody):
    """Axis-aligned box ``[lower, upper]`` (coordinatewise)."""

    def __init__(self, lower, upper):
        self.lower = np.array(lower, dtype=float)
        self.upper = np.array(upper, dtype=float)
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1 or self.lower.size == 0:
            raise ValueError("lower and upper must be vectors of equal length")
        if np.any(self.lower >= self.upper):
            raise ValueError("need lower[i] < upper[i] for every coordinate")
        if np.any(self.lower >= 0) or np.any(self.upper <= 0):
            raise ValueError("body must contain the origin in its interior")
        self.dim = self.lower.size
        self.inner_radius = float(min(-self.lower.max(), self.upper.min()))
        self.outer_radius = float(np.linalg.norm(np.maximum(-self.lower, self.upper)))
        self.lower.setflags(write=False)
        self.upper.setflags(write=False)

    def __repr__(self):
        return f"Box(lower={self.lower.tolist()}, upper={self.upper.tolist()})"

    def _contains(self, x, tol):
        return np.all((x >= self.lower - tol) & (x <= self.upper + tol), axis=1)

    def _project(self, x):
        return np.clip(x, self.lower, self.upper)

    def _ray_entry(self, origin, direction):
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (self.lower - origin) / direction
            t2 = (self.upper - origin) / direction
        t_lo = np.minimum(t1, t2)
        t_hi = np.maximum(t1, t2)
        # zero direction component: the slab is all-or-nothing
        flat = direction == 0.0
        inside_slab = (origin >= self.lower) & (origin <= self.upper)
        t_lo = np.where(flat, np.where(inside_slab, -np.inf, np.inf), t_lo)
        t_hi = np.where(flat, np.where(inside_slab, np.inf, -np.inf), t_hi)
        enter = t_lo.max(axis=1)
        leave = t_hi.min(axis=1)
        # slabs touching at a single point (edge/corner hits) survive roundoff
        with np.errstate(invalid="ignore"):
            hit = (enter <= leave + 1e-12 * (1.0 + np.abs(leave))) & (leave >= 0.0)
        return np.where(hit, enter, np.nan)

    def ray_entry(self, origin, direction):
        res = super().ray_entry(origin, direction)
        if res is None:
            return None
        t, pts = res
        # the entry coordinate may sit an ulp outside; clamp onto the face
        if np.ndim(t) == 0:
            return t, np.clip(pts, self.lower, self.upper)
        ok = ~np.isnan(t)
        pts[ok] = np.clip(pts[ok], self.lower, self.upper)
        return t, pts

    def _sample(self, rng, size):
        return self.lower + (self.upper - self.lower) * rng.random((size, self.dim))

    def to_config(self):
        return {"kind": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


def body_from_config(spec: dict) -> ConvexBody:
    """Build a body from ``{kind: ball, center, radius}`` or ``{kind: box, lower, upper}``."""
    kind = str(spec.get("kind", "")).lower()
    if kind == "ball":
        if "center" in spec:
            center = spec["center"]
        elif "dim" in spec:
            center = [0.0] * int(spec["dim"])
        else:
            raise ValueError("ball needs 'center' or 'dim'")
        return Ball(center, spec.get("radius", 1.0))
    if kind == "box":
        if "lower" not in spec or "upper" not in spec:
            raise ValueError("box needs 'lower' and 'upper'")
        return Box(spec["lower"], spec["upper"])
    raise ValueError(f"unknown body kind {spec.get('kind')!r}")


def unit_ball(d: int) -> Ball:
    return Ball(np.zeros(d), 1.0)


def cube(d: int, half_width: float = 1.0) -> Box:
    return Box(-half_width * np.ones(d), half_width * np.ones(d))
