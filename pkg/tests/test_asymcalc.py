import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from lkinterp.asymcalc import (EndpointSymbol, Growth, Side, Tag, TailPreconditionError,
                               TierOverflowError, ell, integrate_to_endpoint,
                               lex_growth_compare, norm_power_symbol, reciprocal_tail,
                               sup_toward_endpoint)
from lkinterp.quadnum import side_integral

Z, I = Side.ZERO, Side.INF


def sym(*exps, side=Z, coeff=1.0, tilt=0.0):
    return EndpointSymbol(side, coeff, exps, tilt)


# --- representation --------------------------------------------------------------

def test_trailing_zeros_are_canonical():
    assert sym(-1.0, 0.0, 0.0).exponents == (-1.0,)
    assert sym(-1.0, 0.0, 0.0) == sym(-1.0)


def test_tier_cap():
    with pytest.raises(TierOverflowError):
        sym(*([1.0] * 7))


def test_coefficient_must_be_positive():
    with pytest.raises(ValueError):
        EndpointSymbol(Z, 0.0, (1.0,))


def test_ell_tiers_match_definition():
    Y = 3.0
    assert ell(Y, 1) == pytest.approx(4.0)
    assert ell(Y, 2) == pytest.approx(1 + math.log(4.0))
    assert ell(Y, 3) == pytest.approx(1 + math.log(1 + math.log(4.0)))


def test_symbol_value_at_astronomic_y():
    s = sym(-1.0, 0.5)
    lv = float(s.log_value(1e300))
    assert lv == pytest.approx(-math.log1p(1e300) + 0.5 * math.log1p(math.log1p(1e300)))


# --- comparison ------------------------------------------------------------------

def test_compare_examples():
    assert lex_growth_compare(sym(-1.0), sym(-1.0, 0.5)) is Growth.LESS
    assert lex_growth_compare(sym(0.2), sym(0.1)) is Growth.GREATER
    assert lex_growth_compare(sym(coeff=3.0), sym(coeff=7.0)) is Growth.EQUIV


def test_compare_rejects_mixed_sides():
    with pytest.raises(ValueError):
        lex_growth_compare(sym(1.0), sym(1.0, side=I))


def test_tilt_dominates_logs():
    # x^0.1 -> 0 at zero, so it is smaller than any log power there
    assert lex_growth_compare(sym(5.0, tilt=0.1), sym(-5.0)) is Growth.LESS
    assert lex_growth_compare(sym(-5.0, side=I, tilt=0.1), sym(5.0, side=I)) is Growth.GREATER


exps_st = st.lists(st.sampled_from([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0]), max_size=3)


@given(a=exps_st, b=exps_st, c=exps_st)
@settings(max_examples=200, deadline=None)
def test_compare_is_total_preorder(a, b, c):
    u, v, w = sym(*a), sym(*b), sym(*c)
    assert lex_growth_compare(u, u) is Growth.EQUIV
    uv, vu = lex_growth_compare(u, v), lex_growth_compare(v, u)
    flip = {Growth.LESS: Growth.GREATER, Growth.GREATER: Growth.LESS, Growth.EQUIV: Growth.EQUIV}
    assert vu is flip[uv]
    if uv is not Growth.GREATER and lex_growth_compare(v, w) is not Growth.GREATER:
        assert lex_growth_compare(u, w) is not Growth.GREATER


@given(a=exps_st, b=exps_st)
@settings(max_examples=100, deadline=None)
def test_compare_matches_numeric_ratio_trend(a, b):
    u, v = sym(*a), sym(*b)
    res = lex_growth_compare(u, v)
    assume(res is not Growth.EQUIV)
    # the ratio u/v must move in the predicted direction at astronomic Y
    d1 = float(u.log_value(1e100) - v.log_value(1e100))
    d2 = float(u.log_value(1e300) - v.log_value(1e300))
    if res is Growth.LESS:
        assert d2 < d1
    else:
        assert d2 > d1


# --- integration -----------------------------------------------------------------

def test_integrate_inverse_square_log_closed_form():
    v = integrate_to_endpoint(sym(-2.0))
    assert v.tag is Tag.FINITE
    assert v.asymptote == sym(-1.0)
    # the closed form is exact: int_0^x t^-1 l1^-2 dt = l1(x)^-1
    for Y in (0.5, 3.0, 100.0):
        exact = float(mpmath.quad(lambda y: (1 + y) ** -2, [Y, mpmath.inf]))
        assert v.asymptote.value(Y) == pytest.approx(exact, rel=1e-12)


def test_integrate_harmonic_diverges_like_ell2():
    v = integrate_to_endpoint(sym(-1.0))
    assert v.tag is Tag.INFINITE
    assert v.divergence == sym(0.0, 1.0)


def test_integrate_second_tier_finite():
    theta_r = -2.0
    v = integrate_to_endpoint(sym(-1.0, theta_r))
    assert v.tag is Tag.FINITE
    assert v.asymptote.exponents == (0.0, theta_r + 1.0)
    assert v.asymptote.coeff == pytest.approx(1.0 / (-theta_r - 1.0))


def test_integrate_all_minus_one_diverges_at_next_tier():
    v = integrate_to_endpoint(sym(-1.0, -1.0, -1.0))
    assert v.tag is Tag.INFINITE
    assert v.divergence.exponents == (0.0, 0.0, 0.0, 1.0)


def test_integrate_beyond_cap_rejected():
    with pytest.raises(TierOverflowError):
        integrate_to_endpoint(sym(*([-1.0] * 6)))


def test_integrate_tilted():
    v = integrate_to_endpoint(sym(-1.0, tilt=0.5))
    assert v.tag is Tag.FINITE and v.asymptote.coeff == pytest.approx(2.0)
    assert integrate_to_endpoint(sym(-1.0, tilt=-0.5)).tag is Tag.INFINITE
    assert integrate_to_endpoint(sym(0.0, side=I, tilt=-0.5)).tag is Tag.FINITE


@pytest.mark.parametrize("exps", [(-2.0,), (-1.5, 0.5), (-3.0, -1.0, 0.5), (-1.3,), (-1.3, -0.5)])
def test_finite_asymptote_drift_bound(exps):
    s = sym(*exps)
    v = integrate_to_endpoint(s)
    assert v.finite
    ratios = []
    for Y in (1e4, 1e5):
        num = side_integral(s, Z, Y)
        assert num.finite
        ratios.append(num.value / float(v.asymptote.value(Y)))
    assert abs(ratios[1] / ratios[0] - 1) < 0.10


@given(a1=st.floats(-3, 1).filter(lambda a: abs(a + 1) >= 0.2),
       a2=st.floats(-3, 3), side=st.sampled_from([Z, I]))
@settings(max_examples=30, deadline=None)
def test_integrate_agrees_with_quadrature_on_clean_gap(a1, a2, side):
    s = sym(a1, a2, side=side)
    assert integrate_to_endpoint(s).tag is side_integral(s, side).tag


# --- suprema -----------------------------------------------------------------------

def test_sup_examples():
    assert sup_toward_endpoint(sym(-0.3)).tag is Tag.FINITE
    assert sup_toward_endpoint(sym(0.0, 0.2)).tag is Tag.INFINITE
    v = sup_toward_endpoint(sym(coeff=5.0))
    assert v.finite and v.value == 5.0


def test_sup_decay_numeric_trend():
    Y = np.logspace(0, 12, 50)
    assert np.all(np.diff(sym(-0.3).log_value(Y)) < 0)
    assert np.all(np.diff(sym(0.0, 0.2).log_value(Y)) > 0)


# --- power norms -------------------------------------------------------------------

def test_tilted_norm_is_local():
    v = norm_power_symbol(0.5, sym(-1.0), 2.0)
    assert v.finite
    assert v.asymptote.tilt == 0.5 and v.asymptote.exponents == (-1.0,)


def test_tilted_norm_numeric_ratio():
    v = norm_power_symbol(0.5, sym(-1.0), 2.0)
    for Y in (1.0, 10.0, 40.0, 1e3):
        num = side_integral("t^0.5 * l1^-1", Z, Y, r=2.0, measure="dt/t")
        assert num.value / float(v.asymptote.value(Y)) == pytest.approx(1.0, rel=0.5)


def test_untilted_norm_uses_integration_rule():
    v = norm_power_symbol(0.0, sym(-2.0), 1.0)
    assert v.finite and v.asymptote == sym(-1.0)
    assert norm_power_symbol(0.0, sym(), 2.0).tag is Tag.INFINITE


def test_outer_norm_growth():
    # ||t^-1/2||_{2,(x,1)} = log(1/x)^(1/2)
    v = norm_power_symbol(0.0, sym(), 2.0, "outer")
    assert v.finite and v.asymptote.exponents == (0.5,)
    assert norm_power_symbol(0.0, sym(-2.0), 1.0, "outer").asymptote.is_constant


def test_sup_norm_segments():
    assert norm_power_symbol(0.0, sym(-1.0), math.inf).finite
    assert norm_power_symbol(0.0, sym(1.0), math.inf).tag is Tag.INFINITE
    assert norm_power_symbol(0.0, sym(1.0), math.inf, "outer").asymptote == sym(1.0)


@given(a=exps_st, r=st.sampled_from([1.0, 2.0, 3.5]))
@settings(max_examples=100, deadline=None)
def test_untilted_norm_dominates_symbol(a, r):
    s = sym(*a)
    v = norm_power_symbol(0.0, s, r)
    if v.finite:
        assert lex_growth_compare(v.asymptote, s) is not Growth.LESS


# --- reciprocal tails ----------------------------------------------------------------

def test_reciprocal_tail_unit_weight():
    out = reciprocal_tail(sym(), 1.0, 2.0)
    assert out.exponents == (-1.0,)
    ratios = []
    for Y in (10.0, 100.0, 1000.0):
        lhs = Y  # ||t^-1||_{1,(x,1)}
        tail = side_integral("l1^0", Z, Y, r=2.0)  # placeholder shape check below
        rhs_norm = float(mpmath.sqrt(mpmath.quad(lambda y: y ** -3, [Y, mpmath.inf])))
        ratios.append(lhs * rhs_norm)
        assert tail.tag is Tag.INFINITE
    assert max(ratios) / min(ratios) < 1.05


def test_reciprocal_tail_symbol_matches_direct_norm():
    out = reciprocal_tail(sym(), 1.0, 2.0)
    drift = [math.sqrt(float(mpmath.quad(lambda y: y ** -3, [Y, mpmath.inf])))
             / float(out.value(Y)) for Y in (100.0, 1000.0, 1e4)]
    assert max(drift) / min(drift) < 1.05


def test_reciprocal_tail_sup_is_exact_power():
    lam = sym(-0.5)
    out = reciprocal_tail(lam, 2.0, math.inf)
    big = integrate_to_endpoint(lam.power(2.0)).divergence
    assert out == big.power(-0.5)


def test_reciprocal_tail_requires_divergence():
    with pytest.raises(TailPreconditionError) as err:
        reciprocal_tail(sym(-1.0), 2.0, 2.0)
    assert err.value.fallback == "restricted"


def test_reciprocal_tail_restricted_variant_numeric():
    lam = sym(-1.0)
    out = reciprocal_tail(lam, 2.0, 2.0, allow_restricted=True)
    # both sides of the equivalence, by quadrature
    ratios = []
    for Y in (10.0, 100.0, 1000.0):
        lhs = side_integral("l1^-1", Z, Y, r=2.0).value
        rhs = side_integral("l1^-1 * l1", Z, 0.0, Y, r=2.0).value ** -1  # lam * Lam^-1 = 1
        ratios.append(lhs / rhs)
        assert float(out.value(Y)) ** -1 == pytest.approx(lhs, rel=0.2)
    assert max(ratios) / min(ratios) < 1.2


@given(a=st.floats(-0.95, 2.0), R=st.sampled_from([1.0, 2.0, 3.0]),
       S=st.sampled_from([1.0, 2.0, 4.0, math.inf]))
@settings(max_examples=60, deadline=None)
def test_reciprocal_tail_is_reciprocal_of_complementary_norm(a, R, S):
    lam = sym(a)
    assume(integrate_to_endpoint(lam.power(R)).tag is Tag.INFINITE)
    out = reciprocal_tail(lam, R, S)
    comp = norm_power_symbol(0.0, lam, R, "outer").asymptote.power(-1.0)
    n = max(len(out.exponents), len(comp.exponents))
    np.testing.assert_allclose(out.growth_key(n), comp.growth_key(n), atol=1e-12)
