"""Outage probability, average BER and ergodic capacity of the SC receiver.

Every metric has an exact H-function route, a quadrature reference computed
from the elementary density, and (where one exists) a high-SNR asymptote.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import digamma, erfc, gammaln

from .mellin_barnes import (
    AccuracyError,
    ContourPlan,
    FoxHSpec,
    GammaFactor,
    eval_foxh,
    fox_h_spec,
    plan_contour,
)
from .sc_stats import (
    ScModel,
    _pair_factors,
    asymptotic_constants,
    cdf_sc_elementary,
    cdf_sc_foxh,
    log_snr_density,
)

__all__ = [
    "ModulationParams",
    "Method",
    "MetricResult",
    "outage",
    "outage_foxh",
    "outage_asymptotic",
    "ber_quadrature",
    "ber_spec_inid",
    "ber_spec_iid",
    "ber_exact_inid",
    "ber_exact_iid",
    "ber_asymptotic",
    "diversity_order",
    "capacity_quadrature",
    "capacity_spec_inid",
    "capacity_spec_iid",
    "capacity_plan_inid",
    "capacity_exact_inid",
    "capacity_exact_iid",
    "capacity_asymptotic_iid",
    "moment_iid",
    "db_to_linear",
    "linear_to_db",
]

LN2 = math.log(2.0)
QUAD_RTOL = 1e-9


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class ModulationParams:
    """Kernel ``delta * erfc(sqrt(zeta * gamma))`` of the conditional BER.

    The defaults (1/2, 1/4) are the usual IM-DD OOK convention
    ``P_e = erfc(sqrt(gamma) / 2) / 2``; they are a choice, not a fitted value.
    """

    delta: float = 0.5
    zeta: float = 0.25

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta!r}")
        if not self.zeta > 0:
            raise ValueError(f"zeta must be > 0, got {self.zeta!r}")


class Method(str, enum.Enum):
    EXACT_H = "exact_h"
    QUADRATURE = "quadrature"
    ASYMPTOTIC = "asymptotic"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class MetricResult:
    value: float
    method: Method
    error_estimate: float = 0.0
    n_samples: int | None = None
    max_sample: float | None = None
    degenerate: bool = False

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be >= 0")

    def __float__(self):
        return self.value


def _require_iid(model: ScModel, what: str):
    if not model.iid():
        raise ValueError(f"{what} requires identical branches (model is i.n.i.d.)")


# --------------------------------------------------------------------------
# outage


def outage(model: ScModel, gamma_th: float, cross_check: bool = False) -> MetricResult:
    """``P(gamma_SC <= gamma_th)`` from the product-form CDF.

    With ``cross_check`` the H-function CDF is evaluated too and the gap is
    reported as the error estimate.
    """
    if not gamma_th > 0:
        raise ValueError("gamma_th must be > 0")
    value = cdf_sc_elementary(gamma_th, model)
    err = 0.0
    if cross_check:
        h = cdf_sc_foxh(gamma_th, model)
        err = abs(h.value - value) + h.error
    return MetricResult(value, Method.EXACT_H, err)


def outage_foxh(model: ScModel, gamma_th: float, plan: ContourPlan | None = None) -> MetricResult:
    """Outage from the multivariate H-function CDF."""
    if not gamma_th > 0:
        raise ValueError("gamma_th must be > 0")
    h = cdf_sc_foxh(gamma_th, model, plan)
    return MetricResult(h.value, Method.EXACT_H, h.error)


def outage_asymptotic(model: ScModel, gamma_th: float) -> MetricResult:
    if not gamma_th > 0:
        raise ValueError("gamma_th must be > 0")
    k = asymptotic_constants(model)
    value = k.phi * math.exp(k.s_beta * (math.log(gamma_th) - math.log(model.rho)))
    return MetricResult(value, Method.ASYMPTOTIC)


# --------------------------------------------------------------------------
# quadrature oracle


def _expectation(kernel, model: ScModel, breakpoints) -> tuple[float, float]:
    """``E[kernel(gamma_SC)]`` integrated over ``v = ln gamma`` in segments."""
    pts = sorted(set(float(b) for b in breakpoints))
    edges = [-np.inf] + pts + [np.inf]

    def integrand(v):
        return kernel(v) * log_snr_density(v, model)

    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            out = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400, full_output=1)
        total += out[0]
        err += out[1]
    if not err <= QUAD_RTOL * abs(total) + 1e-300:
        raise AccuracyError("quadrature did not reach relative tolerance 1e-9", total, err)
    return total, err


def _branch_breaks(model: ScModel):
    return [math.log(model.rho * a) for a in model.alphas]


def ber_quadrature(model: ScModel, mod: ModulationParams = ModulationParams()) -> MetricResult:
    """Reference ``E[delta * erfc(sqrt(zeta * gamma_SC))]`` by adaptive quadrature."""
    k = asymptotic_constants(model)

    def kernel(v):
        with np.errstate(over="ignore"):
            return mod.delta * erfc(np.sqrt(mod.zeta * np.exp(v)))

    knee = -math.log(mod.zeta)
    value, err = _expectation(kernel, model, [knee, knee + math.log(k.s_beta + 0.5)] + _branch_breaks(model))
    return MetricResult(value, Method.QUADRATURE, err)


def capacity_quadrature(model: ScModel) -> MetricResult:
    """Reference ``E[log2(1 + gamma_SC)]`` by adaptive quadrature."""

    def kernel(v):
        return np.logaddexp(0.0, v) / LN2

    value, err = _expectation(kernel, model, [0.0] + _branch_breaks(model))
    return MetricResult(value, Method.QUADRATURE, err)


# --------------------------------------------------------------------------
# average BER


def ber_spec_inid(model: ScModel, mod: ModulationParams = ModulationParams()) -> FoxHSpec:
    """``(delta/sqrt(pi)) Gamma(1/2 + sum beta_l s_l) prod Gamma(s_l) Gamma(1-s_l) (zeta rho alpha_l)**(-beta_l s_l)``."""
    betas = tuple(model.betas)
    factors = _pair_factors(model.L) + [GammaFactor(0.5, betas, True)]
    log_args = tuple(-b.beta * math.log(mod.zeta * model.rho * b.alpha) for b in model.branches)
    return FoxHSpec(tuple(factors), log_args, mod.delta / math.sqrt(math.pi))


def ber_spec_iid(model: ScModel, mod: ModulationParams = ModulationParams()) -> FoxHSpec:
    """``delta / (sqrt(pi) Gamma(L)) H^{2,3}_{4,3}[1 / (zeta alpha rho)]`` for identical branches."""
    _require_iid(model, "ber_spec_iid")
    b, L = model.branches[0], model.L
    inv_beta = 1.0 / b.beta
    spec = fox_h_spec(
        1.0,
        a=[(0.0, inv_beta), (1.0, 1.0), (0.5, 1.0), (1.0, 1.0)],
        b=[(float(L), inv_beta), (1.0, 1.0), (0.0, 1.0)],
        m=2,
        n=3,
        coefficient=mod.delta / math.sqrt(math.pi) * math.exp(-gammaln(L)),
    )
    return FoxHSpec(spec.factors, (-math.log(mod.zeta * b.alpha * model.rho),), spec.coefficient)


def ber_exact_inid(
    model: ScModel, mod: ModulationParams = ModulationParams(), plan: ContourPlan | None = None
) -> MetricResult:
    """Average BER from the L-fold contour integral."""
    h = eval_foxh(ber_spec_inid(model, mod), plan)
    return MetricResult(h.value, Method.EXACT_H, h.error)


def ber_exact_iid(
    model: ScModel, mod: ModulationParams = ModulationParams(), plan: ContourPlan | None = None
) -> MetricResult:
    """Average BER for identical branches from the univariate H-function."""
    h = eval_foxh(ber_spec_iid(model, mod), plan)
    return MetricResult(h.value, Method.EXACT_H, h.error)


def ber_asymptotic(model: ScModel, mod: ModulationParams = ModulationParams()) -> MetricResult:
    """``(delta/sqrt(pi)) zeta**-S phi Gamma(1/2 + S) rho**-S``."""
    k = asymptotic_constants(model)
    log_v = (
        math.log(mod.delta / math.sqrt(math.pi))
        - k.s_beta * math.log(mod.zeta)
        + math.log(k.phi)
        + gammaln(0.5 + k.s_beta)
        - k.s_beta * math.log(model.rho)
    )
    return MetricResult(math.exp(log_v), Method.ASYMPTOTIC)


def diversity_order(model: ScModel) -> float:
    """High-SNR slope magnitude ``S_beta``; equals ``beta * L`` for identical branches."""
    s = asymptotic_constants(model).s_beta
    if model.iid():
        assert math.isclose(s, model.branches[0].beta * model.L, rel_tol=1e-12)
    return s


# --------------------------------------------------------------------------
# ergodic capacity


def capacity_spec_inid(model: ScModel) -> FoxHSpec:
    """Capacity integrand with the composite factor reduced to ``pi / sin(pi z)``.

    ``pi / sin(pi z) = -Gamma(1 + z) Gamma(-z)``, which keeps the pole sides
    of the unreduced composite (left poles at z = -1, -2, ..., right poles at
    z = 0, 1, ...) while costing two gamma evaluations.
    """
    betas = tuple(model.betas)
    factors = _pair_factors(model.L) + [
        GammaFactor(1.0, betas, True),
        GammaFactor(0.0, tuple(-x for x in betas), True),
    ]
    log_args = tuple(-b.beta * math.log(model.rho * b.alpha) for b in model.branches)
    return FoxHSpec(tuple(factors), log_args, -1.0 / LN2)


def capacity_plan_inid(model: ScModel) -> ContourPlan:
    """Crossed contour (``c_l < 0``, ``sum beta_l c_l`` in (-1, 0)) with residue terms at ``s_l = 0``."""
    return plan_contour(capacity_spec_inid(model), strategy="cross-zero")


def capacity_spec_iid(model: ScModel) -> FoxHSpec:
    """``1 / (ln 2 Gamma(L)) H^{3,2}_{3,3}[1 / (alpha rho)]`` for identical branches."""
    _require_iid(model, "capacity_spec_iid")
    b, L = model.branches[0], model.L
    inv_beta = 1.0 / b.beta
    spec = fox_h_spec(
        1.0,
        a=[(0.0, inv_beta), (0.0, 1.0), (1.0, 1.0)],
        b=[(float(L), inv_beta), (0.0, 1.0), (0.0, 1.0)],
        m=3,
        n=2,
        coefficient=math.exp(-gammaln(L)) / LN2,
    )
    return FoxHSpec(spec.factors, (-math.log(b.alpha * model.rho),), spec.coefficient)


def capacity_exact_inid(model: ScModel, plan: ContourPlan | None = None) -> MetricResult:
    """Ergodic capacity from the L-fold contour integral with residue corrections."""
    if plan is None:
        plan = capacity_plan_inid(model)
    try:
        h = eval_foxh(capacity_spec_inid(model), plan)
    except AccuracyError as exc:
        raise AccuracyError(
            f"capacity contour plan (abscissas {plan.abscissas}, "
            f"{len(plan.residue_corrections)} residue terms) failed: {exc}",
            exc.value,
            exc.error,
        ) from exc
    return MetricResult(h.value, Method.EXACT_H, h.error)


def capacity_exact_iid(model: ScModel, plan: ContourPlan | None = None) -> MetricResult:
    """Ergodic capacity for identical branches from the univariate H-function."""
    h = eval_foxh(capacity_spec_iid(model), plan)
    return MetricResult(h.value, Method.EXACT_H, h.error)


def moment_iid(model: ScModel, n: float) -> float:
    """``E[gamma_SC**n] = (rho alpha)**n Gamma(1 - n/beta) Gamma(L + n/beta) / Gamma(L)``.

    Finite only for ``-beta L < n < beta``: outside that strip
    ``Gamma((beta - n)/beta)`` or ``Gamma((beta L + n)/beta)`` hits a pole and
    the moment diverges.
    """
    _require_iid(model, "moment_iid")
    b, L = model.branches[0], model.L
    if not -b.beta * L < n < b.beta:
        raise ValueError(
            f"moment of order {n} diverges: needs -beta*L < n < beta "
            f"(beta={b.beta}, L={L}); Gamma((beta - n)/beta) has a pole"
        )
    log_v = (
        n * math.log(model.rho * b.alpha)
        + gammaln((b.beta - n) / b.beta)
        + gammaln((b.beta * L + n) / b.beta)
        - gammaln(L)
    )
    return math.exp(log_v)


def capacity_asymptotic_iid(model: ScModel) -> MetricResult:
    """``log2(rho) + (beta ln alpha + E0 + psi(L)) / (beta ln 2)``."""
    _require_iid(model, "capacity_asymptotic_iid")
    b, L = model.branches[0], model.L
    value = math.log2(model.rho) + (b.beta * math.log(b.alpha) + np.euler_gamma + digamma(L)) / (
        b.beta * LN2
    )
    return MetricResult(float(value), Method.ASYMPTOTIC)
