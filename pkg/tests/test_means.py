import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanx.errors import ArityError, DomainError, NumericalError
from meanx.generators import CustomGen, ExpGen, PowerGen
from meanx.means import (
    ConjugateMean,
    CustomMean,
    ExtendedMean,
    GiniMean,
    PowerMean,
    QuasiArithmeticMean,
    conjugate_eval,
    eval_mean,
    eval_quasiarithmetic,
    eval_rows,
)

# hand-computed reference values
GINI_21_AT_12 = 5.0 / 3.0
GINI_1M1_AT_112 = math.sqrt(4.0 / 2.5)  # = sqrt(8/5) = 1.2649110640673518
LN_1_5 = 0.4054651081081644
CONJ_GINI10_POW2 = 1.5811388300841898  # sqrt((1+4)/2)


def test_gini_2_1_at_1_2():
    assert eval_mean(GiniMean(2, 1), (1.0, 2.0)) == pytest.approx(GINI_21_AT_12, rel=1e-15)


def test_power_zero_geometric_progression():
    assert eval_mean(PowerMean(0.0), (1.0, 2.0, 4.0)) == pytest.approx(2.0, rel=1e-15)


def test_gini_equal_params_reflexive():
    for c in (0.5, 1.0, 7.25):
        assert eval_mean(GiniMean(3.0, 3.0), (c, c, c, c)) == c


def test_gini_1_m1_direct_formula():
    assert eval_mean(GiniMean(1, -1), (1.0, 1.0, 2.0)) == pytest.approx(
        GINI_1M1_AT_112, rel=1e-14
    )


def test_quasiarithmetic_arithmetic_mean():
    assert eval_quasiarithmetic(PowerGen(1.0), (1.0, 2.0, 3.0)) == pytest.approx(2.0)


def test_quasiarithmetic_log_gen():
    assert eval_quasiarithmetic(PowerGen(0.0), (1.0, 4.0)) == pytest.approx(2.0, rel=1e-15)


def test_quasiarithmetic_exp_gen():
    assert eval_quasiarithmetic(ExpGen(1.0), (0.0, math.log(2.0))) == pytest.approx(
        LN_1_5, rel=1e-14
    )


def test_conjugate_of_arithmetic_by_log_is_geometric():
    assert conjugate_eval(PowerMean(1.0), PowerGen(0.0), (1.0, 4.0)) == pytest.approx(
        2.0, rel=1e-14
    )


def test_conjugate_identity_generator():
    x = (1.3, 2.7, 0.4)
    assert conjugate_eval(PowerMean(1.0), PowerGen(1.0), x) == pytest.approx(
        eval_mean(PowerMean(1.0), x), rel=1e-15
    )


def test_conjugate_gini_by_square():
    assert conjugate_eval(GiniMean(1, 0), PowerGen(2.0), (1.0, 2.0)) == pytest.approx(
        CONJ_GINI10_POW2, rel=1e-15
    )


def test_domain_error_outside_positive():
    with pytest.raises(DomainError):
        eval_mean(PowerMean(2.0), (1.0, -1.0))
    with pytest.raises(DomainError):
        eval_mean(GiniMean(1, -1), (0.0, 1.0))


def test_arity_error_fixed_arity_custom():
    m = CustomMean(evaluator=lambda v: min(v), arity=2)
    with pytest.raises(ArityError):
        eval_mean(m, (1.0, 2.0, 3.0))


def test_conjugate_domain_error_when_image_escapes():
    # exp maps the whole line onto (0, inf), so conjugating a mean that only
    # lives on (0, 1) must reject points whose image lands outside
    base = CustomMean(
        evaluator=lambda v: sum(v) / len(v),
        domain=__import__("meanx.domain", fromlist=["Interval"]).Interval(0.0, 1.0, True),
    )
    with pytest.raises(DomainError):
        conjugate_eval(base, ExpGen(1.0), (1.0, 2.0))


def test_exp_gen_large_arguments_stay_finite():
    # log-sum-exp keeps the value representable even when exp overflows
    v = eval_quasiarithmetic(ExpGen(1.0), (1e6, 2e6))
    assert v == pytest.approx(2e6 - math.log(2.0), rel=1e-12)


def test_numerical_error_on_overflowing_custom_gen():
    gen = CustomGen(
        forward_fn=lambda t: math.exp(t) if t < 700 else math.inf,
        inverse_fn=math.log,
        domain=REALS,
        increasing=True,
    )
    with pytest.raises(NumericalError):
        eval_quasiarithmetic(gen, (800.0, 900.0))


# -- invariants -------------------------------------------------------------

MEANS_FOR_BOUNDS = [
    PowerMean(-2.0),
    PowerMean(0.0),
    PowerMean(3.0),
    GiniMean(2.0, 1.0),
    GiniMean(1.0, -1.0),
    QuasiArithmeticMean(ExpGen(0.5)),
    ConjugateMean(PowerMean(1.0), PowerGen(2.0)),
]


@pytest.mark.parametrize("mean", MEANS_FOR_BOUNDS, ids=str)
@settings(max_examples=60, deadline=None)
@given(
    x=st.lists(st.floats(0.01, 100.0, allow_nan=False), min_size=1, max_size=6),
)
def test_mean_bounds_invariant(mean, x):
    v = eval_mean(mean, x)
    assert min(x) <= v <= max(x)


@pytest.mark.parametrize("mean", MEANS_FOR_BOUNDS, ids=str)
def test_constant_vector_returns_first_entry(mean):
    assert eval_mean(mean, (3.5, 3.5, 3.5)) == 3.5


@settings(max_examples=40, deadline=None)
@given(
    r=st.floats(-5, 5, allow_nan=False),
    s=st.floats(-5, 5, allow_nan=False),
    x=st.lists(st.floats(0.1, 10.0), min_size=2, max_size=5),
)
def test_gini_parameter_swap_exact(r, s, x):
    assert eval_mean(GiniMean(r, s), x) == eval_mean(GiniMean(s, r), x)


@settings(max_examples=40, deadline=None)
@given(
    r=st.floats(-8, 8, allow_nan=False),
    x=st.floats(0.1, 10.0),
    y=st.floats(0.1, 10.0),
)
def test_bivariate_gini_r_minus_r_is_geometric(r, x, y):
    g = eval_mean(GiniMean(r, -r), (x, y))
    assert abs(g - math.sqrt(x * y)) <= 1e-12 * math.sqrt(x * y)


def test_gini_equal_parameter_branch_continuity():
    # the weighted-log branch at r = s must match the ratio branch nearby
    x = (0.7, 1.9, 4.2)
    for r in (-1.5, 0.0, 2.0):
        v_eq = eval_mean(GiniMean(r, r), x)
        v_near = eval_mean(GiniMean(r, r + 1e-8), x)
        assert v_eq == pytest.approx(v_near, rel=1e-6)


def test_generator_affine_equivalence():
    # a*f + b generates the same quasiarithmetic mean
    x = (0.5, 1.5, 3.0)
    base = eval_quasiarithmetic(PowerGen(2.0), x)
    gen = CustomGen(
        forward_fn=lambda t: 3.0 * t**2 + 1.0,
        inverse_fn=lambda t: math.sqrt((t - 1.0) / 3.0),
        domain=__import__("meanx.domain", fromlist=["Interval"]).POSITIVE,
        increasing=True,
    )
    assert eval_quasiarithmetic(gen, x) == pytest.approx(base, rel=1e-12)


def test_conjugation_of_arithmetic_is_quasiarithmetic():
    x = (0.8, 1.1, 2.6)
    for gen in (PowerGen(0.0), PowerGen(3.0), ExpGen(0.7)):
        assert conjugate_eval(PowerMean(1.0), gen, x) == pytest.approx(
            eval_quasiarithmetic(gen, x), rel=1e-12
        )


def test_power_mean_matches_quasiarithmetic_power_gen():
    x = (0.2, 1.0, 7.3, 2.2)
    for r in (-3.0, -0.5, 0.0, 0.5, 2.0):
        assert eval_mean(PowerMean(r), x) == eval_mean(
            QuasiArithmeticMean(PowerGen(r)), x
        )


# -- log-space stability ----------------------------------------------------


def test_power_mean_huge_exponent():
    x = (1.0, 2.0, 3.0)
    v = eval_mean(PowerMean(200.0), x)
    # converges toward max as r grows; must not overflow
    assert 2.9 < v <= 3.0


def test_power_mean_wide_spread():
    x = (1e-12, 1.0, 1e12)
    v = eval_mean(PowerMean(2.0), x)
    assert v == pytest.approx(1e12 / math.sqrt(3.0), rel=1e-12)


def test_gini_mean_huge_parameters():
    v = eval_mean(GiniMean(80.0, 78.0), (1.0, 2.0, 3.0))
    assert 2.9 < v <= 3.0


def test_power_mean_values_near_double_limit():
    # r=3 would overflow directly at 1e150; the log-space path must not
    v = eval_mean(PowerMean(3.0), (1e150, 2e150))
    assert v == pytest.approx(1e150 * (4.5) ** (1 / 3), rel=1e-10)


def test_eval_rows_matches_scalar():
    rng = np.random.default_rng(3)
    x = np.exp(rng.uniform(-2, 2, size=(40, 4)))
    for mean in MEANS_FOR_BOUNDS:
        rows = eval_rows(mean, x)
        scalars = np.array([eval_mean(mean, row) for row in x])
        np.testing.assert_allclose(rows, scalars, rtol=1e-13)


def test_extended_descriptor_small_arities():
    ext = ExtendedMean(GiniMean(1, -1))
    assert eval_mean(ext, (5.0,)) == 5.0
    assert eval_mean(ext, (1.0, 4.0)) == pytest.approx(2.0, rel=1e-14)
