"""Log-logistic amplitude and SNR distributions for a single branch.

A branch SNR ``gamma = rho * |h|**2`` is log-logistic with scale ``rho * alpha``
and shape ``beta``. All functions are vectorized over ``gamma`` / ``u``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, logit

__all__ = [
    "AmplitudeParams",
    "BranchParams",
    "from_amplitude",
    "cdf_snr",
    "pdf_snr",
    "quantile_snr",
    "sample_snr",
    "raw_moment_snr",
]


@dataclass(frozen=True)
class AmplitudeParams:
    """Log-logistic parameters of the fading amplitude ``|h|``."""

    scale_prime: float
    shape_prime: float

    def __post_init__(self):
        if not self.scale_prime > 0:
            raise ValueError(f"scale_prime must be > 0, got {self.scale_prime!r}")
        if not self.shape_prime > 0:
            raise ValueError(f"shape_prime must be > 0, got {self.shape_prime!r}")


@dataclass(frozen=True)
class BranchParams:
    """SNR-domain log-logistic parameters (scale before multiplication by rho)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha!r}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")


def from_amplitude(p: AmplitudeParams) -> BranchParams:
    """Map amplitude parameters to the SNR domain: ``(scale**2, shape/2)``."""
    return BranchParams(alpha=p.scale_prime**2, beta=p.shape_prime / 2.0)


def _check_rho(rho):
    if not rho > 0:
        raise ValueError(f"rho must be > 0, got {rho!r}")


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def cdf_snr(gamma, p: BranchParams, rho: float):
    """CDF ``1 / (1 + (gamma / (rho*alpha))**-beta)``.

    Evaluated as a logistic function of ``beta * ln(gamma / (rho*alpha))`` so
    that neither tiny nor huge ``gamma`` overflows.
    """
    _check_rho(rho)
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(np.isnan(g)):
        raise ValueError("gamma must be >= 0")
    out = np.zeros_like(g)
    pos = g > 0
    t = p.beta * (np.log(g[pos]) - np.log(rho * p.alpha))
    out[pos] = expit(t)
    return _out(out)


def pdf_snr(gamma, p: BranchParams, rho: float):
    """Density of the branch SNR; defined for ``gamma > 0`` only."""
    _check_rho(rho)
    g = np.asarray(gamma, dtype=float)
    if np.any(~(g > 0)):
        raise ValueError("gamma must be > 0")
    t = p.beta * (np.log(g) - np.log(rho * p.alpha))
    return _out(p.beta * expit(t) * expit(-t) / g)


def quantile_snr(u, p: BranchParams, rho: float):
    """Inverse CDF: ``rho*alpha * (u / (1-u))**(1/beta)`` for ``0 < u < 1``."""
    _check_rho(rho)
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise ValueError("u must lie in the open interval (0, 1)")
    return _out(rho * p.alpha * np.exp(logit(u) / p.beta))


def sample_snr(rng: np.random.Generator, p: BranchParams, rho: float, size=None):
    """Inverse-transform draws of the branch SNR from an explicit generator."""
    _check_rho(rho)
    u = rng.random(size)
    # u == 0 maps to gamma == 0, the lower support endpoint
    with np.errstate(divide="ignore"):
        log_gamma = np.log(rho * p.alpha) + (np.log(u) - np.log1p(-u)) / p.beta
    return _out(np.exp(log_gamma))


def raw_moment_snr(n: float, p: BranchParams, rho: float) -> float:
    """``E[gamma**n] = (rho*alpha)**n * Gamma(1 - n/beta) * Gamma(1 + n/beta)``.

    Finite only for ``-beta < n < beta``; anything else raises instead of
    returning an overflowed float.
    """
    _check_rho(rho)
    if not -p.beta < n < p.beta:
        raise ValueError(
            f"moment of order n={n} diverges: Gamma(1 - n/beta) needs -beta < n < beta "
            f"(beta={p.beta})"
        )
    x = n / p.beta
    return float(np.exp(n * np.log(rho * p.alpha) + gammaln(1 - x) + gammaln(1 + x)))
