import numpy as np
import pytest
from scipy import stats

from skewflect.data import generate_linreg, generate_logreg
from skewflect.geometry import Ball, cube, unit_ball
from skewflect.rng import stream
from skewflect.samplers import (
    SamplerConfig,
    SamplerError,
    coupled_pair_run,
    plmc_step,
    psgld_step,
    recorded_iterations,
    rejection_sample_truncated_gaussian,
    run_chains,
    srnlmc_step,
    srnsgld_step,
)
from skewflect.skewfield import SkewField, build_tridiagonal_skew
from skewflect.targets import GaussianStandard, LinearRegression, LogisticRegression, Quadratic


def _cfg(body=None, field=None, pot=None, **kw):
    body = body or unit_ball(3)
    d = body.dim
    kw.setdefault("stepsize", 0.1)
    kw.setdefault("iterations", 10)
    return SamplerConfig(body, field or SkewField.zero(d), pot or GaussianStandard(d), **kw)


def test_srnlmc_interior_step():
    x, corr, fb = srnlmc_step([0.5, 0, 0], _cfg(), np.zeros(3))
    np.testing.assert_allclose(x, [0.45, 0, 0])
    assert corr == 0.0 and not fb


def test_srnlmc_boundary_step():
    x, corr, fb = srnlmc_step([1.0, 0, 0], _cfg(), np.array([10.0, 0, 0]))
    xt = 0.9 + np.sqrt(0.2) * 10
    np.testing.assert_allclose(x, [1, 0, 0])
    assert corr == pytest.approx(xt - 1.0)
    assert not fb


def test_plmc_pure_gradient_step_and_projection():
    cfg = _cfg(stepsize=1e-6)
    x = np.array([0.2, -0.1, 0.3])
    nxt, corr = plmc_step(x, cfg, np.zeros(3))
    np.testing.assert_array_equal(nxt, x - 1e-6 * x)
    assert corr == 0.0
    nxt, corr = plmc_step([1.0, 0, 0], _cfg(stepsize=1.0), np.array([2.0 / np.sqrt(2.0), 0, 0]))
    np.testing.assert_allclose(nxt, [1, 0, 0])
    assert corr == pytest.approx(1.0)


@pytest.mark.parametrize("body", [unit_ball(3), cube(3), Ball([0.1, -0.2, 0.0], 0.8)])
def test_zero_field_matches_plmc_bit_for_bit(body):
    cfg = _cfg(body, stepsize=0.05)
    gen = stream(11, 0)
    a = b = np.zeros(3)
    for _ in range(10_000):
        xi = gen.standard_normal(3)
        a, ca, _ = srnlmc_step(a, cfg, xi)
        b, cb = plmc_step(b, cfg, xi)
        assert np.array_equal(a, b) and ca == cb


@pytest.mark.parametrize("body", [unit_ball(3), cube(3)])
def test_zero_field_run_chains_matches_projected_run(body):
    common = dict(stepsize=0.05, iterations=2000, chains=4, seed=3, initial=[0.1, 0.2, 0.3])
    skew = run_chains(_cfg(body, method="skew", **common))
    proj = run_chains(_cfg(body, method="projected", **common))
    assert np.array_equal(skew.states, proj.states)
    assert np.array_equal(skew.corrections, proj.corrections)


def test_zero_field_stochastic_matches_psgld():
    ds = generate_linreg(200, seed=0)
    pot = LinearRegression.from_dataset(ds)
    body = unit_ball(2)
    common = dict(stepsize=1e-3, iterations=3000, chains=3, seed=5, batch_size=20)
    a = run_chains(SamplerConfig(body, SkewField.zero(2), pot, method="skew", **common))
    b = run_chains(SamplerConfig(body, SkewField.zero(2), pot, method="projected", **common))
    assert np.array_equal(a.states, b.states)

    x, xi, batch = np.array([0.3, 0.1]), np.array([0.5, -2.0]), np.arange(20)
    cfg = SamplerConfig(body, SkewField.zero(2), pot, 1e-3, 1, batch_size=20)
    s, cs, _ = srnsgld_step(x, cfg, xi, batch)
    p, cp = psgld_step(x, cfg, xi, batch)
    assert np.array_equal(s, p) and cs == cp


def test_full_batch_srnsgld_matches_srnlmc():
    ds, _ = generate_logreg(40, seed=1)
    pot = LogisticRegression.from_dataset(ds)
    cfg = SamplerConfig(unit_ball(3), build_tridiagonal_skew(3, 2.0), pot, 1e-2, 1, batch_size=40)
    x, xi = np.array([0.2, 0.1, -0.3]), np.array([1.0, -0.5, 0.2])
    a = srnsgld_step(x, cfg, xi, np.arange(40))
    b = srnlmc_step(x, cfg, xi)
    np.testing.assert_allclose(a[0], b[0], rtol=1e-13, atol=1e-15)


def test_k_zero_returns_initial():
    tr = run_chains(_cfg(iterations=0, chains=5, initial=[0.3, 0.6, -0.4]))
    np.testing.assert_array_equal(tr.final_states, np.tile([0.3, 0.6, -0.4], (5, 1)))
    np.testing.assert_array_equal(tr.iterations, [0])


def test_determinism_and_chain_independence():
    cfg = _cfg(field=build_tridiagonal_skew(3, 1.0), chains=2,
               iterations=500, stepsize=0.01, seed=9, initial=[0.3, 0.6, -0.4])
    a, b = run_chains(cfg), run_chains(cfg)
    assert np.array_equal(a.states, b.states)
    assert not np.array_equal(a.final_states[0], a.final_states[1])
    other = run_chains(_cfg(field=build_tridiagonal_skew(3, 1.0), chains=2, iterations=500,
                            stepsize=0.01, seed=10, initial=[0.3, 0.6, -0.4]))
    assert not np.array_equal(a.final_states, other.final_states)


def test_stochastic_determinism_includes_batches():
    ds, _ = generate_logreg(100, seed=1)
    pot = LogisticRegression.from_dataset(ds)
    cfg = SamplerConfig(unit_ball(3), build_tridiagonal_skew(3, 2.0), pot, 1e-3, 300,
                        chains=3, batch_size=10, seed=2)
    assert np.array_equal(run_chains(cfg).states, run_chains(cfg).states)


@pytest.mark.parametrize("stochastic", [False, True])
def test_workers_do_not_change_results(stochastic):
    # 150 chains span three tiles, so worker groups really do differ
    if stochastic:
        ds = generate_linreg(300, seed=0)
        pot, kw = LinearRegression.from_dataset(ds), dict(batch_size=30)
        body = unit_ball(2)
    else:
        pot, kw, body = GaussianStandard(3), {}, cube(3)
    cfg = SamplerConfig(body, build_tridiagonal_skew(body.dim, 2.0), pot, 1e-3, 300,
                        chains=150, seed=4, **kw)
    one = run_chains(cfg, workers=1)
    many = run_chains(cfg, workers=3)
    assert np.array_equal(one.states, many.states)
    assert np.array_equal(one.corrections, many.corrections)
    assert one.fallback_count == many.fallback_count


def test_states_stay_in_body_and_correction_monotone(body3):
    cfg = _cfg(body3, field=build_tridiagonal_skew(3, 2.0), stepsize=0.05, iterations=1000,
               chains=20, seed=1)
    tr = run_chains(cfg)
    assert np.all(body3.contains(tr.states.reshape(-1, 3), tol=1e-9))
    assert np.all(np.diff(tr.cumulative_correction) >= 0)
    assert tr.boundary_events > 0


def test_recorded_iterations():
    np.testing.assert_array_equal(recorded_iterations(10, 4), [0, 4, 8, 10])
    np.testing.assert_array_equal(recorded_iterations(10, 5), [0, 5, 10])
    tr = run_chains(_cfg(iterations=10, record_every=4))
    assert tr.states.shape == (4, 1, 3)


def test_config_validation():
    with pytest.raises(ValueError):
        _cfg(stepsize=0.0)
    with pytest.raises(ValueError):
        _cfg(initial=[2.0, 0, 0])
    with pytest.raises(ValueError):
        _cfg(initial="somewhere")
    with pytest.raises(ValueError):
        _cfg(method="projected", field=build_tridiagonal_skew(3, 1.0))
    with pytest.raises(ValueError):
        _cfg(batch_size=5)
    with pytest.raises(ValueError):
        _cfg(field=SkewField.zero(2))


def test_nonfinite_state_reports_chain_and_step():
    pot = Quadratic(np.eye(3) * 1e308)
    cfg = _cfg(pot=pot, body=cube(3, 1e300), stepsize=1e10, chains=2, initial=[1.0, 1.0, 1.0])
    with pytest.raises(SamplerError, match=r"chain 0, step \d+"), np.errstate(all="ignore"):
        run_chains(cfg)


def test_rejection_acceptance_rates():
    ball, rate = rejection_sample_truncated_gaussian(unit_ball(3), 20_000, seed=0,
                                                     return_acceptance=True)
    assert rate == pytest.approx(stats.chi2.cdf(1, 3), abs=0.01)
    box, rate = rejection_sample_truncated_gaussian(cube(3), 30_000, seed=0, return_acceptance=True)
    assert rate == pytest.approx((2 * stats.norm.cdf(1) - 1) ** 3, abs=0.01)
    assert np.all(unit_ball(3).contains(ball)) and np.all(cube(3).contains(box))
    assert ball.shape == (20_000, 3)


def test_rejection_cap_and_determinism():
    tiny = Ball([0, 0, 0], 1e-3)
    with pytest.raises(RuntimeError):
        rejection_sample_truncated_gaussian(tiny, 10, seed=0, max_proposals=10_000)
    a = rejection_sample_truncated_gaussian(unit_ball(3), 100, seed=4)
    np.testing.assert_array_equal(a, rejection_sample_truncated_gaussian(unit_ball(3), 100, seed=4))


def test_coupled_identical_starts_stay_together():
    run = coupled_pair_run(np.diag([1.0, 2, 3]), build_tridiagonal_skew(3, 1.0), Ball(np.zeros(3), 5),
                           1e-3, 500, 0, [0.5, 0, 0], [0.5, 0, 0])
    assert np.all(run.weighted_sq_norm == 0.0)


def test_coupled_closed_form_without_skew():
    eta, K = 1e-3, 2000
    run = coupled_pair_run(np.eye(3), SkewField.zero(3), Ball(np.zeros(3), 50.0), eta, K, 1,
                           [1.0, 0, 0], [-1.0, 0, 0])
    assert run.boundary_events == 0
    expected = 4.0 * (1 - eta) ** (2 * np.arange(K + 1))
    np.testing.assert_allclose(run.weighted_sq_norm, expected, rtol=1e-9)
