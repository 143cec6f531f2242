"""Discrete-time constrained Langevin samplers.

``srnlmc_step`` moves with the non-reversible drift ``-(I + J) grad f`` and
returns to the body by skew projection; ``plmc_step`` is the reversible
projected baseline kept as a separate code path so the two can be checked
against each other. The stochastic-gradient variants swap in a minibatch
gradient. ``run_chains`` drives many independent chains at once.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng as streams
from .geometry import ConvexBody
from .skewfield import SkewField, _skew_project, weighted_sq_norm
from .targets import Potential, Quadratic, draw_minibatch

log = logging.getLogger(__name__)

NOISE_BLOCK = 256
# chain-averaged corrections are reduced over fixed tiles of chains so that the
# floating-point summation order, and hence the result, ignores ``workers``
CHAIN_TILE = 64


class SamplerError(RuntimeError):
    """A chain failed; the message names the chain(s) and step."""


@dataclass
class SamplerConfig:
    """Everything needed to run a set of chains.

    ``method="skew"`` runs SRNLMC (or SRNSGLD when ``batch_size`` is set);
    ``method="projected"`` runs PLMC/PSGLD and requires a zero field.
    ``initial`` is a point in the body, a ``(chains, d)`` array of starting
    points, or ``"uniform"`` for prior draws.
    """

    body: ConvexBody
    field: SkewField
    potential: Potential
    stepsize: float
    iterations: int
    chains: int = 1
    initial: object = "uniform"
    batch_size: int | None = None
    seed: int = 0
    record_every: int = 1
    method: str = "skew"

    def __post_init__(self):
        d = self.body.dim
        if self.field.dim != d or self.potential.dim != d:
            raise ValueError("body, skew field and potential dimensions disagree")
        if not self.stepsize > 0:
            raise ValueError("stepsize must be positive")
        if self.iterations < 0 or self.chains < 1 or self.record_every < 1:
            raise ValueError("need iterations >= 0, chains >= 1, record_every >= 1")
        if self.method not in ("skew", "projected"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "projected" and not self.field.is_zero:
            raise ValueError("the projected baseline runs without a skew field")
        if isinstance(self.initial, str):
            if self.initial != "uniform":
                raise ValueError(f"unknown initialisation {self.initial!r}")
        else:
            x0 = np.asarray(self.initial, dtype=float)
            if x0.shape not in ((d,), (self.chains, d)):
                raise ValueError(f"initial must have shape ({d},) or ({self.chains}, {d})")
            if not np.all(self.body.contains(x0)):
                raise ValueError("initial point must lie in the body")
            self.initial = x0
        if self.batch_size is not None:
            n = getattr(self.potential, "n", None)
            if n is None:
                raise ValueError("minibatching needs a data-backed potential")
            if not 1 <= self.batch_size <= n:
                raise ValueError(f"batch size {self.batch_size} not in [1, {n}]")

    @property
    def stochastic(self) -> bool:
        return self.batch_size is not None


@dataclass
class ChainTrace:
    """Output of ``run_chains``.

    ``states[r]`` holds every chain at ``iterations[r]``. ``corrections[k]``
    is the chain-averaged size ``|x_tilde - x_{k+1}|`` of the boundary
    correction at step ``k``, a discrete stand-in for the local time.
    """

    iterations: np.ndarray
    states: np.ndarray
    final_states: np.ndarray
    corrections: np.ndarray
    boundary_events: int
    fallback_count: int
    stepsize: float
    seed: int
    chain_ids: np.ndarray = field(repr=False, default=None)

    @property
    def times(self) -> np.ndarray:
        return self.iterations * self.stepsize

    @property
    def cumulative_correction(self) -> np.ndarray:
        return np.cumsum(self.corrections)

    @property
    def fallback_rate(self) -> float:
        return self.fallback_count / self.boundary_events if self.boundary_events else 0.0


def _noise_scale(cfg):
    return math.sqrt(2.0 * cfg.stepsize)


def _skew_move(x, grad, cfg, xi):
    proposal = x - cfg.stepsize * (grad + cfg.field.apply(x, grad)) + _noise_scale(cfg) * xi
    nxt, fallback = _skew_project(cfg.body, cfg.field, np.atleast_2d(proposal))
    nxt = nxt.reshape(proposal.shape)
    correction = np.linalg.norm(proposal - nxt, axis=-1)
    if proposal.ndim == 1:
        return nxt, float(correction), bool(fallback[0])
    return nxt, correction, fallback


def _projected_move(x, grad, cfg, xi):
    proposal = x - cfg.stepsize * grad + _noise_scale(cfg) * xi
    nxt = cfg.body.project(proposal)
    correction = np.linalg.norm(proposal - nxt, axis=-1)
    return nxt, (float(correction) if proposal.ndim == 1 else correction)


def srnlmc_step(x, cfg: SamplerConfig, xi):
    """One SRNLMC step for a point or a stack of chains.

    Returns:
        ``(x_next, correction, fallback)`` where ``correction`` is the
        distance moved by the skew projection and ``fallback`` flags a
        skew ray that missed the body.
    """
    x = np.asarray(x, dtype=float)
    return _skew_move(x, cfg.potential.gradient(x), cfg, xi)


def plmc_step(x, cfg: SamplerConfig, xi):
    """One projected Langevin step: ``P(x - eta grad f + sqrt(2 eta) xi)``."""
    x = np.asarray(x, dtype=float)
    return _projected_move(x, cfg.potential.gradient(x), cfg, xi)


def srnsgld_step(x, cfg: SamplerConfig, xi, batch):
    """SRNLMC step driven by the minibatch gradient over ``batch``."""
    x = np.asarray(x, dtype=float)
    return _skew_move(x, cfg.potential.stochastic_gradient(x, batch), cfg, xi)


def psgld_step(x, cfg: SamplerConfig, xi, batch):
    x = np.asarray(x, dtype=float)
    return _projected_move(x, cfg.potential.stochastic_gradient(x, batch), cfg, xi)


def _initial_states(cfg, chain_ids):
    if isinstance(cfg.initial, str):
        return np.stack([cfg.body.sample_uniform(streams.stream(cfg.seed, c, streams.INIT))
                         for c in chain_ids])
    if cfg.initial.ndim == 2:
        return cfg.initial[chain_ids].copy()
    return np.tile(cfg.initial, (len(chain_ids), 1))


def _run_block(cfg: SamplerConfig, chain_ids: np.ndarray):
    m, d, K = len(chain_ids), cfg.body.dim, cfg.iterations
    noise_gens = [streams.stream(cfg.seed, c, streams.NOISE) for c in chain_ids]
    batch_gens = ([streams.stream(cfg.seed, c, streams.BATCH) for c in chain_ids]
                  if cfg.stochastic else None)
    n_data = getattr(cfg.potential, "n", 0)

    x = _initial_states(cfg, chain_ids)
    records = [x.copy()]
    tile_starts = np.arange(0, m, CHAIN_TILE)
    corr_sum = np.zeros((tile_starts.size, K))
    boundary = fallbacks = 0
    skew = cfg.method == "skew"

    for start in range(0, K, NOISE_BLOCK):
        stop = min(start + NOISE_BLOCK, K)
        noise = np.stack([g.standard_normal((stop - start, d)) for g in noise_gens], axis=1)
        for k in range(start, stop):
            xi = noise[k - start]
            try:
                if cfg.stochastic:
                    batch = np.stack([draw_minibatch(n_data, cfg.batch_size, g) for g in batch_gens])
                    grad = cfg.potential.stochastic_gradient(x, batch)
                else:
                    grad = cfg.potential.gradient(x)
                if skew:
                    x, corr, fb = _skew_move(x, grad, cfg, xi)
                    fallbacks += int(fb.sum())
                else:
                    x, corr = _projected_move(x, grad, cfg, xi)
            except Exception as exc:
                raise SamplerError(
                    f"chains {chain_ids[0]}..{chain_ids[-1]}, step {k}: {exc}") from exc
            bad = ~np.all(np.isfinite(x), axis=1)
            if bad.any():
                raise SamplerError(
                    f"chain {chain_ids[np.flatnonzero(bad)[0]]}, step {k}: non-finite state")
            corr_sum[:, k] = [corr[t:t + CHAIN_TILE].sum() for t in tile_starts]
            boundary += int(np.count_nonzero(corr))
            if (k + 1) % cfg.record_every == 0 or k + 1 == K:
                records.append(x.copy())
    return np.stack(records), corr_sum, boundary, fallbacks


def recorded_iterations(K: int, record_every: int) -> np.ndarray:
    its = list(range(0, K + 1, record_every))
    if its[-1] != K:
        its.append(K)
    return np.array(its)


def run_chains(cfg: SamplerConfig, workers: int = 1) -> ChainTrace:
    """Run ``cfg.chains`` independent chains for ``cfg.iterations`` steps.

    Chains are split into at most ``workers`` contiguous groups (whole
    tiles of ``CHAIN_TILE`` chains) run on a thread pool. Each chain draws from its own (seed, chain)-keyed stream, so the
    trace does not depend on ``workers``.
    """
    ids = np.arange(cfg.chains)
    tiles = [ids[t:t + CHAIN_TILE] for t in range(0, cfg.chains, CHAIN_TILE)]
    n_groups = max(1, min(workers, len(tiles)))
    bounds = np.linspace(0, len(tiles), n_groups + 1).astype(int)
    groups = [np.concatenate(tiles[lo:hi]) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if len(groups) == 1:
        parts = [_run_block(cfg, groups[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(groups)) as pool:
            parts = list(pool.map(lambda g: _run_block(cfg, g), groups))
    states = np.concatenate([p[0] for p in parts], axis=1)
    corr = np.concatenate([p[1] for p in parts]).sum(axis=0) / cfg.chains
    trace = ChainTrace(
        iterations=recorded_iterations(cfg.iterations, cfg.record_every),
        states=states,
        final_states=states[-1].copy(),
        corrections=corr,
        boundary_events=sum(p[2] for p in parts),
        fallback_count=sum(p[3] for p in parts),
        stepsize=cfg.stepsize,
        seed=cfg.seed,
        chain_ids=ids,
    )
    if trace.fallback_count:
        log.info("%d of %d boundary corrections fell back to Euclidean projection",
                 trace.fallback_count, trace.boundary_events)
    return trace


def rejection_sample_truncated_gaussian(body: ConvexBody, count: int, seed: int,
                                        max_proposals: int = 10**8,
                                        return_acceptance: bool = False):
    """Standard normal draws conditioned on the body, by rejection.

    With ``return_acceptance`` the empirical acceptance rate (accepted over
    proposed, counting every draw made) is returned alongside the samples.

    Raises:
        RuntimeError: if ``max_proposals`` proposals do not yield ``count``
            acceptances (the body carries negligible Gaussian mass).
    """
    if count < 1:
        raise ValueError("count must be positive")
    gen = streams.stream(seed, 0, streams.AUX)
    kept, n_kept, proposed = [], 0, 0
    chunk = max(1024, 4 * count)
    while n_kept < count:
        if proposed >= max_proposals:
            raise RuntimeError(
                f"rejection sampler accepted {n_kept} of {proposed} proposals; cap reached")
        size = min(chunk, max_proposals - proposed)
        z = gen.standard_normal((size, body.dim))
        acc = z[body.contains(z)]
        kept.append(acc)
        n_kept += len(acc)
        proposed += size
    samples = np.concatenate(kept)[:count]
    return (samples, n_kept / proposed) if return_acceptance else samples


@dataclass
class CoupledRun:
    iterations: np.ndarray
    times: np.ndarray
    weighted_sq_norm: np.ndarray
    boundary_events: int
    fallback_count: int


def coupled_pair_run(H, field: SkewField, body: ConvexBody, eta: float, K: int, seed: int,
                     x0, x0_tilde, record_every: int = 1) -> CoupledRun:
    """Two SRNLMC chains on ``f = x^T H x / 2`` driven by identical noise.

    Records ``w_k = v^T (I + J)^{-1} v`` for ``v = x_k - x_tilde_k``; each
    chain handles boundary contact with its own skew projection.
    """
    cfg = SamplerConfig(body, field, Quadratic(H), eta, K, chains=2, initial=x0,
                        seed=seed, record_every=record_every)
    x = np.stack([np.asarray(x0, dtype=float), np.asarray(x0_tilde, dtype=float)])
    if not np.all(body.contains(x)):
        raise ValueError("both starting points must lie in the body")
    gen = streams.stream(seed, 0, streams.NOISE)
    diffs = [x[0] - x[1]]
    boundary = fallbacks = 0
    for start in range(0, K, NOISE_BLOCK):
        stop = min(start + NOISE_BLOCK, K)
        noise = gen.standard_normal((stop - start, body.dim))
        for k in range(start, stop):
            x, corr, fb = srnlmc_step(x, cfg, np.broadcast_to(noise[k - start], x.shape))
            boundary += int(np.count_nonzero(corr))
            fallbacks += int(fb.sum())
            if (k + 1) % record_every == 0 or k + 1 == K:
                diffs.append(x[0] - x[1])
    its = recorded_iterations(K, record_every)
    return CoupledRun(its, its * eta, weighted_sq_norm(field, np.array(diffs)),
                      boundary, fallbacks)
