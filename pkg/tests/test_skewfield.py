import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from skewflect.geometry import Ball, cube, unit_ball
from skewflect.skewfield import (
    SkewField,
    build_tridiagonal_skew,
    resolvent_symmetric_part,
    skew_field_from_config,
    skew_normal,
    skew_project,
    skew_reflect,
    weighted_sq_norm,
)

ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])


def random_antisym(rng, d, scale=3.0):
    M = rng.uniform(-scale, scale, (d, d))
    return np.triu(M, 1) - np.triu(M, 1).T


def test_tridiagonal_examples():
    np.testing.assert_array_equal(build_tridiagonal_skew(3, 1).matrix,
                                  [[0, 1, 0], [-1, 0, 1], [0, -1, 0]])
    assert not np.any(build_tridiagonal_skew(3, 0).matrix)
    J = build_tridiagonal_skew(2, 2).matrix
    np.testing.assert_array_equal(J, [[0, 2], [-2, 0]])
    np.testing.assert_array_equal(J + J.T, 0)
    with pytest.raises(ValueError):
        build_tridiagonal_skew(1, 1.0)


def test_constant_field_rejects_non_antisymmetric():
    with pytest.raises(ValueError):
        SkewField.constant([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        SkewField.constant([[1e-3, 0], [0, 0]])


def test_field_metadata():
    f = build_tridiagonal_skew(3, 1.0)
    assert f.lipschitz == 0.0
    assert f.sup_norm == pytest.approx(np.sqrt(2))
    assert f.delta0 == pytest.approx(1 / np.sqrt(3))
    assert SkewField.zero(4).is_zero and not f.is_zero


def test_field_config():
    assert skew_field_from_config({"kind": "zero"}, 3).is_zero
    np.testing.assert_array_equal(skew_field_from_config({"kind": "tridiagonal", "a": 2.0}, 3).matrix,
                                  build_tridiagonal_skew(3, 2).matrix)
    f = skew_field_from_config({"kind": "constant", "matrix": ROT.tolist()}, 2)
    np.testing.assert_array_equal(f.matrix, ROT)
    with pytest.raises(ValueError):
        skew_field_from_config({"kind": "constant", "matrix": ROT.tolist()}, 3)


def test_antisymmetry_along_states(rng):
    f = build_tridiagonal_skew(5, 0.7)
    for x in rng.normal(size=(100, 5)):
        J = f.at(x)
        assert np.max(np.abs(J + J.T)) <= 1e-12
        assert np.linalg.norm(J, 2) <= f.sup_norm + 1e-12


def test_skew_normal_examples(J1):
    v = np.array([0.6, 0.0, 0.8])
    np.testing.assert_array_equal(skew_normal(np.zeros((3, 3)), v), v)
    np.testing.assert_allclose(skew_normal(J1.matrix, [1, 0, 0]), np.array([1, -1, 0]) / np.sqrt(2))
    np.testing.assert_allclose(skew_normal(2 * ROT, [0, 1]), np.array([2, 1]) / np.sqrt(5))


def test_skew_normal_errors():
    with pytest.raises(ValueError):
        skew_normal(2 * ROT, [0, 2])
    with pytest.raises(ValueError):
        skew_normal(np.ones((2, 2)), [0, 1])


@settings(max_examples=150, deadline=None)
@given(d=st.integers(2, 10), seed=st.integers(0, 2**32 - 1))
def test_skew_normal_unit_and_tilt(d, seed):
    rng = np.random.default_rng(seed)
    J = random_antisym(rng, d)
    nu = rng.normal(size=d)
    nu /= np.linalg.norm(nu)
    out = skew_normal(J, nu)
    assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-10)
    cos = out @ nu
    assert cos > 0
    assert cos == pytest.approx(1 / np.sqrt(1 + np.linalg.norm(J @ nu) ** 2), abs=1e-10)


def test_skew_reflect_examples(J1):
    x = np.array([0.1, 0.2, -0.3])
    np.testing.assert_array_equal(skew_reflect(unit_ball(3), J1, x), x)
    np.testing.assert_allclose(skew_reflect(unit_ball(3), SkewField.zero(3), [2, 0, 0]), [0, 0, 0])
    np.testing.assert_allclose(skew_reflect(unit_ball(3), J1, [2, 0, 0]), [0, 1, 0])


def test_skew_project_examples():
    pt, fb = skew_project(unit_ball(3), SkewField.zero(3), [2, 0, 0])
    np.testing.assert_array_equal(pt, [1, 0, 0])
    assert not fb

    # oracle: root of |(1.1 - s, s)|^2 = 1 along the direction (-1, 1)
    s = brentq(lambda s: (1.1 - s) ** 2 + s**2 - 1, 0.0, 0.5)
    pt, fb = skew_project(unit_ball(2), SkewField.constant(ROT), [1.1, 0.0])
    assert not fb
    np.testing.assert_allclose(pt, [1.1 - s, s], atol=1e-9)
    assert np.linalg.norm(pt) == pytest.approx(1.0, abs=1e-6)

    pt, fb = skew_project(unit_ball(2), SkewField.constant(ROT), [2.0, 0.0])
    assert fb
    np.testing.assert_array_equal(pt, [1.0, 0.0])


def test_skew_project_interior_is_identity(J1):
    x = np.array([0.3, -0.2, 0.5])
    pt, fb = skew_project(cube(3), J1, x)
    np.testing.assert_array_equal(pt, x)
    assert not fb


def test_skew_project_moves_parallel_to_skew_reflection(J1, rng):
    # x - P^J(x) is parallel to R^J(x) - P(x) whenever the ray hits
    body = unit_ball(3)
    x = rng.normal(size=(500, 3))
    x = 1.05 * x / np.linalg.norm(x, axis=1, keepdims=True)
    pts, fb = skew_project(body, J1, x)
    assert not fb.any()
    a = x - pts
    b = skew_reflect(body, J1, x) - body.project(x)
    cross = np.linalg.norm(np.cross(a, b), axis=1)
    assert np.max(cross / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))) < 1e-9


@pytest.mark.parametrize("body", [unit_ball(3), cube(3), Ball([0.1, 0.0, -0.2], 1.2)])
def test_zero_field_skew_project_is_exact_projection(body, rng):
    x = rng.uniform(-3, 3, (3000, 3))
    x = x[~body.contains(x)][:1000]
    pts, fb = skew_project(body, SkewField.zero(3), x)
    assert np.array_equal(pts, body.project(x))
    assert not fb.any()


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 4.0])
def test_skew_project_stays_in_body(body3, a, rng):
    f = build_tridiagonal_skew(3, a)
    x = rng.uniform(-3, 3, (3000, 3))
    pts, _ = skew_project(body3, f, x)
    assert np.all(body3.contains(pts, tol=1e-9))


def test_resolvent_examples(J1):
    r = resolvent_symmetric_part(np.zeros((3, 3)))
    np.testing.assert_array_equal(r.S, np.eye(3))
    assert r.c == r.C == 1.0

    a = 1.7
    r = resolvent_symmetric_part(a * ROT)
    np.testing.assert_allclose(r.S, np.eye(2) / (1 + a * a), atol=1e-15)

    r = resolvent_symmetric_part(J1)
    np.testing.assert_allclose(r.eigenvalues, [1 / 3, 1 / 3, 1.0], atol=1e-14)
    assert (r.c, r.C) == pytest.approx((1 / 3, 1.0))


def test_resolvent_matches_symmetric_part_of_inverse(rng):
    # independent route: symmetrise an explicit inverse of I + J
    for d in range(2, 11):
        J = random_antisym(rng, d)
        A = np.linalg.inv(np.eye(d) + J)
        np.testing.assert_allclose(resolvent_symmetric_part(J).S, 0.5 * (A + A.T), atol=1e-10)


@settings(max_examples=200, deadline=None)
@given(d=st.integers(2, 10), seed=st.integers(0, 2**32 - 1))
def test_resolvent_spectrum_property(d, seed):
    J = random_antisym(np.random.default_rng(seed), d)
    r = resolvent_symmetric_part(J)
    np.testing.assert_allclose(r.S, r.S.T, atol=1e-12)
    assert r.eigenvalues.min() > 0 and r.eigenvalues.max() <= 1 + 1e-10
    for s in np.linalg.svd(J, compute_uv=False):
        if s > 1e-10:
            assert np.min(np.abs(r.eigenvalues - 1 / (1 + s * s))) < 1e-8


def test_weighted_norm_against_explicit_inverse(rng):
    J = random_antisym(rng, 4)
    v = rng.normal(size=(10, 4))
    A = np.linalg.inv(np.eye(4) + J)
    np.testing.assert_allclose(weighted_sq_norm(J, v), np.einsum("ij,jk,ik->i", v, A, v), rtol=1e-12)
    assert weighted_sq_norm(J, v[0]) == pytest.approx(v[0] @ A @ v[0], rel=1e-12)
