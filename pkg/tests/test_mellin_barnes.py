import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as gamma_fn

from llsc.loglogistic import BranchParams
from llsc.mellin_barnes import (
    AccuracyError,
    ContourPlan,
    FoxHSpec,
    GammaFactor,
    PlanningError,
    PoleError,
    complex_log_gamma,
    eval_foxh,
    eval_meijer_g,
    fox_h_spec,
    meijer_g_spec,
    plan_contour,
    reduce_at_residues,
    reflection_defect,
)
from llsc.metrics import ber_spec_inid, capacity_spec_inid, db_to_linear
from llsc.sc_stats import ScModel, cdf_sc_elementary, cdf_spec

SCEN1 = [(1.0, 2.2), (0.98, 2.3), (1.1, 2.4)]


def eq4_spec(z):
    """Single-branch CDF as G^{1,1}_{1,1}[z | 1; 1] = z / (1 + z)."""
    return meijer_g_spec(z, [1.0], [1.0], 1, 1)


def test_complex_log_gamma_examples():
    assert complex_log_gamma(1.0) == 0
    assert complex_log_gamma(0.5).real == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-15)
    # |Gamma(1/2 + jt)|**2 = pi / cosh(pi t)
    lg = complex_log_gamma(0.5 + 10j)
    assert math.exp(2 * lg.real) == pytest.approx(math.pi / math.cosh(10 * math.pi), rel=1e-10)
    for pole in (0.0, -1.0, -7.0):
        with pytest.raises(PoleError):
            complex_log_gamma(pole)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(-20, 20), y=st.floats(-30, 30))
def test_log_gamma_reflection(x, y):
    z = complex(x, y)
    if abs(math.sin(math.pi * x)) < 1e-3 and abs(y) < 1e-3:
        return
    lhs = complex_log_gamma(z) + complex_log_gamma(1 - z)
    rhs = np.log(np.pi / np.sin(np.pi * z))
    # equal modulo 2 pi j
    d = lhs - rhs
    assert abs(d.real) < 1e-9 * max(1.0, abs(rhs.real))
    assert abs((d.imag / (2 * math.pi)) - round(d.imag / (2 * math.pi))) < 1e-9


def test_gamma_factor_orientation():
    assert GammaFactor.left(0.0, (1.0, 0.0)).orientation == "numerator-left"
    assert GammaFactor.right(0.0, (0.0, 1.0)).orientation == "numerator-right"
    assert GammaFactor.denominator(0.0, (1.0, 1.0)).orientation == "denominator"
    # Gamma(1 - a - A s) written via right(): offset 1 - a, slope -A
    f = GammaFactor.right(0.25, (2.0,))
    assert f.offset == 0.75 and f.slopes == (-2.0,)


def test_spec_validation():
    with pytest.raises(ValueError):
        FoxHSpec((GammaFactor(0.0, (1.0, 1.0)),), (0.0,))
    with pytest.raises(ValueError):
        FoxHSpec.from_arguments((GammaFactor(0.0, (1.0,)),), (-1.0,))


def test_simplified_cancels_identical_pairs():
    # Gamma(s) Gamma(1 - s) / Gamma(1 - s): the upper row a_2 = (1, 1) cancels b_1 = (1, 1)
    spec = fox_h_spec(0.3, [(1.0, 1.0), (1.0, 1.0)], [(1.0, 1.0)], 1, 1)
    assert len(spec.factors) == 1
    # inverse Mellin transform of Gamma(s) in the x**(+s) convention
    assert eval_foxh(spec).value == pytest.approx(math.exp(-1 / 0.3), rel=1e-9)


def test_plan_center_cdf_is_one_half():
    model = ScModel.from_pairs(SCEN1, 10.0)
    plan = plan_contour(cdf_spec(5.0, model), placement="center")
    np.testing.assert_allclose(plan.abscissas, 0.5, atol=1e-9)
    assert plan.residue_corrections == () and plan.conflicts == ()


def test_plan_saddle_is_one_half_at_unit_arguments():
    model = ScModel.identical(BranchParams(1.0, 2.0), 3, 1.0)
    plan = plan_contour(cdf_spec(1.0, model))
    np.testing.assert_allclose(plan.abscissas, 0.5, atol=1e-6)


def test_plan_ber_center_valid():
    model = ScModel.from_pairs(SCEN1, db_to_linear(20))
    spec = ber_spec_inid(model)
    plan = plan_contour(spec, placement="center")
    np.testing.assert_allclose(plan.abscissas, 0.5, atol=1e-9)
    # the coupled factor Gamma(1/2 + z) stays on the right of its poles
    coupled = [f for f in spec.factors if len(f.support) > 1]
    assert all(f.real_part(plan.abscissas) > 0.5 for f in coupled)


def test_plan_capacity_needs_residue_strategy():
    model = ScModel.from_pairs(SCEN1, 100.0)
    spec = capacity_spec_inid(model)
    with pytest.raises(PlanningError, match="factor"):
        plan_contour(spec)
    plan = plan_contour(spec, strategy="cross-zero")
    assert plan.conflicts
    assert all(c < 0 for c in plan.abscissas)
    betas = model.betas
    assert -1 < float(np.dot(betas, plan.abscissas)) < 0
    # every non-empty proper subset of the three variables
    assert len(plan.residue_corrections) == 6
    with pytest.raises(ValueError):
        plan_contour(spec, strategy="nonsense")


def test_plan_rejects_pole_on_contour_and_bad_hint():
    spec = eq4_spec(2.0)
    with pytest.raises(PlanningError):
        plan_contour(spec, hint=[-0.5])
    plan = ContourPlan((1.0,), (10.0,), (0.1,))
    with pytest.raises(PlanningError, match="pole"):
        eval_foxh(spec, plan)
    with pytest.raises(ValueError, match="nodes"):
        ContourPlan((0.5,), (10.0,), (1.0,))
    with pytest.raises(ValueError):
        plan_contour(spec, nodes=8)


def test_eval_eq4_examples():
    assert eval_foxh(eq4_spec(1.0)).value == pytest.approx(0.5, abs=1e-12)
    for z in np.logspace(-4, 4, 17):
        r = eval_meijer_g(eq4_spec(z))
        assert r.value == pytest.approx(z / (1 + z), rel=1e-9)
        assert abs(r.imag) <= 1e-8 * abs(r.value)


def test_multivariate_l1_equals_univariate():
    rng = np.random.default_rng(5)
    for lx in rng.uniform(-6, 6, 10):
        model = ScModel((BranchParams(1.0, 1.0),), 1.0)
        multi = cdf_spec(math.exp(lx), model)
        uni = eq4_spec(math.exp(lx))
        a, b = eval_foxh(multi).value, eval_foxh(uni).value
        assert a == pytest.approx(b, abs=1e-9)
        assert multi == uni
        plan = plan_contour(uni)
        assert eval_foxh(multi, plan).value == eval_foxh(uni, plan).value


def test_eval_cdf_scenario1_example():
    model = ScModel.from_pairs(SCEN1, db_to_linear(10))
    r = eval_foxh(cdf_spec(5.0, model))
    assert abs(r.value - cdf_sc_elementary(5.0, model)) <= 1e-8


def test_meijer_eq8_examples():
    # G^{1,1}_{1,1}[z | 1; L] = Gamma(L) (1 + 1/z)**(-L)
    assert eval_meijer_g(meijer_g_spec(1.0, [1.0], [2.0], 1, 1)).value == pytest.approx(0.25, rel=1e-9)
    rng = np.random.default_rng(11)
    for z in np.exp(rng.uniform(-5, 5, 8)):
        v = eval_meijer_g(meijer_g_spec(z, [1.0], [4.0], 1, 1)).value
        assert v == pytest.approx(gamma_fn(4) * (1 + 1 / z) ** -4, rel=1e-9)
    with pytest.raises(ValueError, match="non-unit"):
        eval_meijer_g(fox_h_spec(1.0, [(1.0, 0.5)], [(1.0, 1.0)], 1, 1))


def test_fox_h_nonunit_slopes_against_closed_form():
    # x**b / (1 + x**b) = G^{1,1}_{1,1}[x**b | 1; 1] = H^{1,1}_{1,1}[x | (1, 1/b); (1, 1/b)] / b
    b, x = 2.7, 0.8
    spec = fox_h_spec(x, [(1.0, 1.0 / b)], [(1.0, 1.0 / b)], 1, 1, coefficient=1.0 / b)
    assert eval_foxh(spec).value == pytest.approx(x**b / (1 + x**b), rel=1e-9)


def test_doubling_nodes_and_width_within_error():
    model = ScModel.from_pairs(SCEN1, db_to_linear(20))
    for spec in (cdf_spec(30.0, model), ber_spec_inid(model)):
        plan = plan_contour(spec)
        base = eval_foxh(spec, plan)
        finer = eval_foxh(spec, plan.refined(1).widened(2.0))
        assert abs(finer.value - base.value) <= max(base.error, 1e-15)


def test_tensor_matches_convolution_l2():
    model = ScModel.from_pairs([(1.0, 2.2), (0.98, 2.3)], 30.0)
    spec = ber_spec_inid(model)
    a = eval_foxh(spec)
    b = eval_foxh(spec, method="tensor")
    assert a.value == pytest.approx(b.value, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(lx=st.lists(st.floats(-8, 8), min_size=2, max_size=3))
def test_saddle_and_center_agree(lx):
    spec = FoxHSpec(
        tuple(f for l in range(len(lx)) for f in (GammaFactor.left(0.0, np.eye(len(lx))[l]),
                                                 GammaFactor.right(0.0, np.eye(len(lx))[l]))),
        tuple(lx),
    )
    exact = math.prod(1 / (1 + math.exp(-v)) for v in lx)
    for placement in ("center", "saddle"):
        r = eval_foxh(spec, plan_contour(spec, placement=placement))
        assert r.value == pytest.approx(exact, rel=1e-9, abs=1e-12)


def test_reflection_identity_along_contour():
    model = ScModel.from_pairs(SCEN1, db_to_linear(10))
    spec = cdf_spec(8.0, model)
    plan = plan_contour(spec)
    assert reflection_defect(spec, plan) < 1e-12
    assert eval_foxh(spec, plan, debug=True).value == pytest.approx(cdf_sc_elementary(8.0, model), abs=1e-9)


def test_capacity_composite_factor_is_reflection():
    # Gamma(1+z) Gamma(-z)**2 Gamma(1+z) / (Gamma(z) Gamma(1-z)) == pi / sin(pi z)
    rng = np.random.default_rng(3)
    z = rng.uniform(-0.95, -0.05, 100) + 1j * rng.uniform(-20, 20, 100)
    comp = np.exp(
        complex_log_gamma(1 + z) * 2 + complex_log_gamma(-z) * 2
        - complex_log_gamma(z) - complex_log_gamma(1 - z)
    )
    np.testing.assert_allclose(comp, np.pi / np.sin(np.pi * z), rtol=1e-10)


def test_reduce_at_residues_univariate():
    # residue of Gamma(s) Gamma(1-s) x**s at s = 0 is 1
    spec = eq4_spec(3.0)
    left = next(f for f in spec.factors if f.slopes[0] > 0)
    red = reduce_at_residues(spec, (0,), (-left.offset / left.slopes[0],))
    assert red.num_vars == 0 and red.coefficient == pytest.approx(1.0)


def test_nonconvergence_raises_with_best_value():
    with pytest.raises(AccuracyError) as info:
        eval_foxh(eq4_spec(2.0), max_refinements=0)
    assert math.isfinite(info.value.value)
