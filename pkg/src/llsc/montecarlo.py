"""Monte Carlo estimates of the SC receiver metrics, with standard errors.

Work is split into fixed-size batches. Batch ``b`` draws from its own
generator seeded by ``SeedSequence(seed, spawn_key=key + (b,))`` and the
per-batch moments are merged in batch order, so results do not depend on how
many worker threads ran the batches.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .metrics import Method, MetricResult, ModulationParams
from .sc_stats import ScModel

__all__ = [
    "MIN_SAMPLES",
    "SimConfig",
    "BatchSummary",
    "sample_sc",
    "run_batches",
    "estimate_outage",
    "estimate_ber",
    "estimate_capacity",
    "estimate_moment",
]

MIN_SAMPLES = 10_000
_U64 = 2**64


@dataclass(frozen=True)
class SimConfig:
    """Sample budget and stream identity of one simulation.

    ``key`` lets callers derive independent streams from one ``seed`` (one key
    per sweep point, say) without touching the seed itself.
    """

    samples: int = 1_000_000
    seed: int = 0
    batch: int = 100_000
    key: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "key", tuple(int(k) for k in self.key))
        if int(self.samples) != self.samples or self.samples < MIN_SAMPLES:
            raise ValueError(f"samples must be an integer >= {MIN_SAMPLES}, got {self.samples!r}")
        if int(self.batch) != self.batch or self.batch < 1:
            raise ValueError(f"batch must be a positive integer, got {self.batch!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < _U64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if any(k < 0 for k in self.key):
            raise ValueError("key entries must be non-negative")

    @property
    def n_batches(self) -> int:
        return -(-self.samples // self.batch)

    def batch_size(self, b: int) -> int:
        return min(self.batch, self.samples - b * self.batch)

    def rng(self, b: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.key + (b,))
        return np.random.default_rng(ss)

    def with_key(self, *key: int) -> "SimConfig":
        return SimConfig(self.samples, self.seed, self.batch, key)


@dataclass(frozen=True)
class BatchSummary:
    """Merged sample moments of a statistic plus the per-batch means."""

    n: int
    mean: float
    m2: float
    max_value: float
    batch_means: tuple[float, ...]

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.n)


def sample_sc(rng: np.random.Generator, model: ScModel, size=None):
    """Draw ``max_l gamma_l`` by inverse-transform sampling of every branch.

    One uniform per branch per draw, laid out branch-major so the L=1 case
    consumes the stream exactly like a single-branch sampler.
    """
    shape = () if size is None else (size if isinstance(size, tuple) else (int(size),))
    u = rng.random((model.L,) + shape)
    rho = model.rho
    with np.errstate(divide="ignore"):
        logit_u = np.log(u) - np.log1p(-u)
    log_g = np.stack(
        [math.log(rho * b.alpha) + logit_u[l] / b.beta for l, b in enumerate(model.branches)]
    )
    out = np.exp(np.max(log_g, axis=0))
    return float(out) if size is None else out


def _batch_stats(stat, model: ScModel, cfg: SimConfig, b: int):
    x = np.asarray(stat(sample_sc(cfg.rng(b), model, cfg.batch_size(b))), dtype=float)
    mean = float(np.mean(x))
    return x.size, mean, float(np.sum((x - mean) ** 2)), float(np.max(x))


def run_batches(stat, model: ScModel, cfg: SimConfig, workers: int = 1) -> BatchSummary:
    """Apply ``stat`` to every sampled ``gamma_SC`` and merge the batch moments.

    Batches may run on ``workers`` threads; the reduction always follows batch
    index order (pairwise update of Chan et al.).
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    idx = range(cfg.n_batches)
    if workers == 1:
        parts = [_batch_stats(stat, model, cfg, b) for b in idx]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _batch_stats(stat, model, cfg, b), idx))
    n, mean, m2, mx = 0, 0.0, 0.0, -math.inf
    for nb, mb, m2b, mxb in parts:
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
        mx = max(mx, mxb)
    return BatchSummary(n, mean, m2, mx, tuple(p[1] for p in parts))


def estimate_outage(model: ScModel, gamma_th: float, cfg: SimConfig, workers: int = 1) -> MetricResult:
    """Fraction of draws with ``gamma_SC <= gamma_th`` and its binomial standard error."""
    if not gamma_th > 0:
        raise ValueError("gamma_th must be > 0")
    s = run_batches(lambda g: g <= gamma_th, model, cfg, workers)
    p = s.mean
    se = math.sqrt(p * (1.0 - p) / s.n)
    return MetricResult(p, Method.MONTE_CARLO, se, n_samples=s.n, degenerate=p in (0.0, 1.0))


def estimate_ber(
    model: ScModel, mod: ModulationParams, cfg: SimConfig, workers: int = 1
) -> MetricResult:
    """Sample mean of the conditional error probability ``delta * erfc(sqrt(zeta * gamma))``."""
    s = run_batches(lambda g: mod.delta * erfc(np.sqrt(mod.zeta * g)), model, cfg, workers)
    return MetricResult(s.mean, Method.MONTE_CARLO, s.stderr, n_samples=s.n, degenerate=s.stderr == 0)


def estimate_capacity(model: ScModel, cfg: SimConfig, workers: int = 1) -> MetricResult:
    """Sample mean of ``log2(1 + gamma)``.

    ``max_sample`` holds the largest ``log2(1 + gamma)`` seen; a value far above
    the mean hints that the tail was undersampled.
    """
    s = run_batches(lambda g: np.log1p(g) / math.log(2.0), model, cfg, workers)
    return MetricResult(
        s.mean, Method.MONTE_CARLO, s.stderr, n_samples=s.n, max_sample=s.max_value,
        degenerate=s.stderr == 0,
    )


def estimate_moment(model: ScModel, n: float, cfg: SimConfig, workers: int = 1) -> MetricResult:
    """Sample mean of ``gamma**n``; the estimate is only meaningful when the moment is finite."""
    s = run_batches(lambda g: g**n, model, cfg, workers)
    return MetricResult(s.mean, Method.MONTE_CARLO, s.stderr, n_samples=s.n, max_sample=s.max_value)
