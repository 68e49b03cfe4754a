"""Output-SNR statistics of an L-branch selection-combining receiver.

``gamma_SC = max(gamma_1, ..., gamma_L)`` with independent log-logistic
branches. Elementary (product-form) and H-function evaluations are both
provided; the former is the oracle for the latter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln

from .loglogistic import BranchParams, cdf_snr, pdf_snr
from .mellin_barnes import (
    ContourPlan,
    FoxHResult,
    FoxHSpec,
    GammaFactor,
    eval_foxh,
    eval_meijer_g,
    meijer_g_spec,
)

__all__ = [
    "ScModel",
    "AsymptoticConstants",
    "cdf_sc_elementary",
    "pdf_sc_elementary",
    "log_snr_density",
    "cdf_spec",
    "pdf_spec",
    "cdf_sc_foxh",
    "pdf_sc_foxh",
    "cdf_sc_iid_meijer",
    "asymptotic_constants",
    "cdf_sc_asymptotic",
    "pdf_sc_asymptotic",
]


@dataclass(frozen=True)
class ScModel:
    """Branch parameters plus the average transmit SNR ``rho`` (linear)."""

    branches: tuple[BranchParams, ...]
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if len(self.branches) < 1:
            raise ValueError("need at least one branch")
        if not all(isinstance(b, BranchParams) for b in self.branches):
            raise TypeError("branches must be BranchParams")
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho!r}")

    @classmethod
    def identical(cls, branch: BranchParams, L: int, rho: float) -> "ScModel":
        if L < 1:
            raise ValueError("L must be >= 1")
        return cls((branch,) * L, rho)

    @classmethod
    def from_pairs(cls, pairs, rho: float) -> "ScModel":
        return cls(tuple(BranchParams(a, b) for a, b in pairs), rho)

    @property
    def L(self) -> int:
        return len(self.branches)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([b.alpha for b in self.branches])

    @property
    def betas(self) -> np.ndarray:
        return np.array([b.beta for b in self.branches])

    def iid(self) -> bool:
        # exact equality on purpose: no silent switch for near-identical branches
        first = self.branches[0]
        return all(b == first for b in self.branches)

    def with_rho(self, rho: float) -> "ScModel":
        return ScModel(self.branches, rho)

    def add_branch(self, branch: BranchParams) -> "ScModel":
        return ScModel(self.branches + (branch,), self.rho)


@dataclass(frozen=True)
class AsymptoticConstants:
    s_beta: float
    phi: float


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def cdf_sc_elementary(gamma, model: ScModel):
    """``prod_l F_l(gamma)``."""
    g = np.asarray(gamma, dtype=float)
    out = np.ones_like(g)
    for b in model.branches:
        out = out * cdf_snr(g, b, model.rho)
    return _out(out)


def pdf_sc_elementary(gamma, model: ScModel):
    """Density of the maximum: ``sum_l f_l prod_{k != l} F_k``."""
    g = np.asarray(gamma, dtype=float)
    if np.any(~(g > 0)):
        raise ValueError("gamma must be > 0")
    F = [np.asarray(cdf_snr(g, b, model.rho)) for b in model.branches]
    out = np.zeros_like(g)
    for l, b in enumerate(model.branches):
        term = np.asarray(pdf_snr(g, b, model.rho))
        for k in range(model.L):
            if k != l:
                term = term * F[k]
        out = out + term
    return _out(out)


def log_snr_density(v, model: ScModel):
    """Density of ``ln gamma_SC`` at ``v``, i.e. ``gamma * f(gamma)`` at ``gamma = e**v``.

    Written in logistic form so it stays finite for any real ``v``; this is
    the integrand weight used by the quadrature oracles.
    """
    v = np.asarray(v, dtype=float)
    t = [b.beta * (v - math.log(model.rho * b.alpha)) for b in model.branches]
    F = [expit(ti) for ti in t]
    out = np.zeros_like(v)
    for l, b in enumerate(model.branches):
        term = b.beta * F[l] * expit(-t[l])
        for k in range(model.L):
            if k != l:
                term = term * F[k]
        out = out + term
    return _out(out)


def _log_args(gamma: float, model: ScModel):
    # ln x_l with x_l = (gamma / (rho alpha_l)) ** beta_l
    lg = math.log(gamma)
    return tuple(b.beta * (lg - math.log(model.rho * b.alpha)) for b in model.branches)


def _pair_factors(L: int):
    """``Gamma(1 - s_l) Gamma(s_l)`` for every variable.

    Same factor order as the univariate Meijer form, so an L=1 spec is
    identical to it (and evaluates to the same bits).
    """
    out = []
    for l in range(L):
        e = np.zeros(L)
        e[l] = 1.0
        out += [GammaFactor.right(0.0, e), GammaFactor.left(0.0, e)]
    return out


def cdf_spec(gamma: float, model: ScModel) -> FoxHSpec:
    """L-variate H-function of the SC output CDF (no coupling factor)."""
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    return FoxHSpec(tuple(_pair_factors(model.L)), _log_args(gamma, model))


def pdf_spec(gamma: float, model: ScModel) -> FoxHSpec:
    """CDF spec times ``Gamma(1 + z) / Gamma(z)`` with ``z = sum beta_l s_l``, scaled by 1/gamma."""
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    betas = tuple(model.betas)
    factors = _pair_factors(model.L) + [
        GammaFactor(1.0, betas, True),
        GammaFactor.denominator(0.0, betas),
    ]
    return FoxHSpec(tuple(factors), _log_args(gamma, model), 1.0 / gamma)


def cdf_sc_foxh(gamma: float, model: ScModel, plan: ContourPlan | None = None, **kwargs) -> FoxHResult:
    """SC output CDF evaluated from its multivariate H-function form."""
    return eval_foxh(cdf_spec(gamma, model), plan, **kwargs)


def pdf_sc_foxh(gamma: float, model: ScModel, plan: ContourPlan | None = None, **kwargs) -> FoxHResult:
    """SC output PDF from the contour integral with the composite coupling factor."""
    return eval_foxh(pdf_spec(gamma, model), plan, **kwargs)


def cdf_sc_iid_meijer(gamma: float, model: ScModel, plan: ContourPlan | None = None, **kwargs) -> FoxHResult:
    """i.i.d. CDF as ``G^{1,1}_{1,1}[x | 1; L] / Gamma(L)``, ``x = (gamma / rho alpha)**beta``."""
    if not model.iid():
        raise ValueError("cdf_sc_iid_meijer requires identical branches")
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    b = model.branches[0]
    log_x = b.beta * (math.log(gamma) - math.log(model.rho * b.alpha))
    spec = meijer_g_spec(1.0, [1.0], [float(model.L)], 1, 1, math.exp(-gammaln(model.L)))
    spec = FoxHSpec(spec.factors, (log_x,), spec.coefficient)
    return eval_meijer_g(spec, plan, **kwargs)


def asymptotic_constants(model: ScModel) -> AsymptoticConstants:
    """``S_beta = sum beta_l`` and ``phi = prod alpha_l**(-beta_l)``."""
    betas, alphas = model.betas, model.alphas
    return AsymptoticConstants(float(np.sum(betas)), float(np.exp(-np.sum(betas * np.log(alphas)))))


def cdf_sc_asymptotic(gamma, model: ScModel):
    """High-SNR CDF ``phi * rho**-S * gamma**S``."""
    k = asymptotic_constants(model)
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("gamma must be >= 0")
    return _out(k.phi * (g / model.rho) ** k.s_beta)


def pdf_sc_asymptotic(gamma, model: ScModel):
    """High-SNR PDF ``phi * S * rho**-S * gamma**(S-1)``."""
    k = asymptotic_constants(model)
    g = np.asarray(gamma, dtype=float)
    if np.any(~(g > 0)):
        raise ValueError("gamma must be > 0")
    return _out(k.phi * k.s_beta * (g / model.rho) ** k.s_beta / g)
