import dataclasses
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lkinterp.asymcalc import Side, Tag
from lkinterp.interpengine import (HypothesisError, InterpolationQuery, catalog, decide, ell,
                                   optimal_source, optimal_target, rational)
from lkinterp.lkspaces import LKSpaceSpec, SumSpaceSpec, embeds
from lkinterp.opsim import CATALOG, InterpolationSegment, OperatorProfile, riesz_potential_profile
from lkinterp.svfunc import log_eval, to_text

INF = math.inf
M, C, H = CATALOG["M"], CATALOG["C"], CATALOG["H"]
I31 = riesz_potential_profile(3, 1.0)


def lk(p, r, a="1", B=1.0):
    return LKSpaceSpec(p, r, a, B)


# --- decide: worked instances ------------------------------------------------------

def test_hilbert_interior_diagonal():
    for p, s, b in ((2, 2, "1"), (3, 1, "l1^-1 * l2^2"), (1.5, INF, "l2^0.3")):
        q = InterpolationQuery(H, "interior", lk(p, s, b, INF), lk(p, s, b, INF))
        v = decide(q)
        assert v.bounded == "yes"
        assert "N" in v.functionals and v.symbolic


def test_maximal_llogl_to_l1():
    v = decide(InterpolationQuery(M, "left", lk(1, 1, "l1"), lk(1, 1)))
    assert v.bounded == "yes"
    assert v.functionals["L"].tag is Tag.FINITE


def test_maximal_l1_to_l1_fails_with_log_witness():
    v = decide(InterpolationQuery(M, "left", lk(1, 1), lk(1, 1)))
    assert v.bounded == "no"
    w = v.functionals["L"].witness
    assert len(w) >= 3
    # witness values are l1(x) = 1 + log(1/x)
    for pt in w:
        assert pt.log_value == pytest.approx(math.log1p(math.exp(pt.log_y)), rel=1e-9)
    assert v.certificate["condition"] == "L" and v.certificate["witness"]


def test_hilbert_l1_to_l1_fails():
    v = decide(InterpolationQuery(H, "left", lk(1, 1, "1", INF), lk(1, 1, "1", INF)))
    assert v.bounded == "no" and v.certificate["witness"]
    # L log L near 0 plus L1 near infinity does map into L1 near 0
    q = InterpolationQuery(H, "sum", SumSpaceSpec(1, 1, INF, 1, "l1"),
                           SumSpaceSpec(1, 1, INF, 1, "1"))
    assert decide(q).bounded == "yes"


def test_riesz_potential_interior():
    for p in (1.2, 1.4, 2, 2.5):
        q = 1 / (1 / p - 1 / 3)
        v = decide(InterpolationQuery(I31, "interior", lk(p, 2, "1", INF), lk(q, 2, "1", INF)))
        assert v.bounded == "yes"


def test_riesz_potential_wrong_target_exponent_rejected():
    with pytest.raises(HypothesisError, match="target q"):
        InterpolationQuery(I31, "interior", lk(1.2, 2, "1", INF), lk(2.5, 2, "1", INF))


def test_hilbert_not_bounded_on_linfty():
    # ||a||_inf on (0, inf) is finite, so the divergence condition fails
    v = decide(InterpolationQuery(H, "right", lk(INF, INF, "1", INF), lk(INF, INF, "1", INF)))
    assert v.bounded == "no"
    assert v.conditions[0].status == "fails"


def test_conjugate_linfty_to_exp_class():
    v = decide(InterpolationQuery(C, "right", lk(INF, INF), lk(INF, INF, "l1^-1")))
    assert v.bounded == "yes"
    v = decide(InterpolationQuery(C, "right", lk(INF, INF), lk(INF, INF)))
    assert v.bounded == "no"


def test_maximal_linfty_by_averaging_arm():
    v = decide(InterpolationQuery(M, "right", lk(INF, INF), lk(INF, INF)))
    assert v.bounded == "yes" and v.sufficiency_only
    assert "averaging" in v.theorem


def test_unsupported_case_rejected():
    with pytest.raises(HypothesisError):
        InterpolationQuery(M, "sum", lk(1, 1), lk(1, 1))
    with pytest.raises(HypothesisError):
        InterpolationQuery(M, "left", lk(2, 2), lk(2, 2))
    with pytest.raises(HypothesisError, match="theta"):
        InterpolationQuery(M, "interior", lk(1, 1), lk(1, 1))
    with pytest.raises(HypothesisError, match="finite or both"):
        InterpolationQuery(M, "left", lk(1, 1), lk(1, 1, "1", INF))
    with pytest.raises(ValueError):
        InterpolationQuery(M, "middle", lk(2, 2), lk(2, 2))


def test_vacuous_intersection_flagged():
    q = InterpolationQuery(H, "intersection",
                           SumSpaceSpec(1, 1, INF, INF, "1", "intersection", "l1"),
                           SumSpaceSpec(1, INF, INF, INF, "1", "intersection", "l2^-1"))
    v = decide(q)
    assert v.bounded == "yes" and v.certificate.get("vacuous")
    assert any("vacuously" in n for n in v.notes)


def test_verdict_to_dict():
    v = decide(InterpolationQuery(M, "left", lk(1, 1), lk(1, 1)))
    d = v.to_dict()
    assert d["bounded"] == "no" and d["conditions"][0]["verdict"]["tag"] == "Infinite"


# --- exact exponent arithmetic -----------------------------------------------------

def test_rational_snaps_floats():
    assert rational(0.25) == Fraction(1, 4)
    assert rational(1 / 3) == Fraction(1, 3)
    assert rational("inf") == INF and rational(INF) == INF
    assert rational("6/5") == Fraction(6, 5)


def test_theta_exact():
    q = InterpolationQuery(I31, "interior", lk(1.2, 2, "1", INF), lk(2, 2, "1", INF))
    assert q.theta == Fraction(1, 4)
    assert q.exponents == (Fraction(6, 5), Fraction(2))
    q = InterpolationQuery(M, "interior", lk(1.5, 1), lk(1.5, 1))
    assert q.theta == Fraction(1, 3)
    assert q.slope == 1


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=Fraction(1, 50), max_value=Fraction(49, 50), max_denominator=50))
def test_theta_round_trip(theta):
    # 1/p = 1 - theta (2/3) on the Riesz potential segment, q from the same theta
    p = 1 / (1 - theta * Fraction(2, 3))
    q = 1 / (1 - theta) * Fraction(3, 2)
    query = InterpolationQuery(I31, "interior", lk(float(p), 2, "1", INF),
                               lk(float(q), 2, "1", INF))
    assert query.theta == theta


def test_slope_of_riesz_potential():
    assert InterpolationQuery(I31, "left", lk(1, 1, "1", INF), lk(1.5, INF, "1", INF)).slope == 1
    prof = OperatorProfile("slope 2", InterpolationSegment(1, 1, INF, 2), True, True, False)
    q = InterpolationQuery(prof, "left", lk(1, 1), lk(1, 1))
    assert q.slope == Fraction(1, 2)


# --- catalog -----------------------------------------------------------------------

def test_catalog_profiles():
    cat = catalog()
    m = cat.profiles["M"]
    assert (m.segment.p1, m.segment.q1, m.segment.p2, m.segment.q2) == (1, 1, INF, INF)
    assert m.lb1 and not m.lb2
    for key in ("C", "H", "R", "I"):
        assert cat.profiles[key].lb1 and cat.profiles[key].lb2
    i = cat.profiles["I"].segment
    assert (i.p1, i.q1, i.p2, i.q2) == (1, 1.5, 3, INF)


def test_catalog_closure():
    cat = catalog()
    assert len(cat.rows) >= 60
    for row in cat.rows:
        v = decide(row.query)
        assert v.bounded == row.expected, row.label
        exp_weight = "exp(" in row.label
        assert v.symbolic or exp_weight, row.label


def test_catalog_errata_fail_with_witness():
    cat = catalog()
    assert len(cat.errata) == 3
    for row in cat.errata:
        v = decide(row.query)
        assert v.bounded == "no", row.label
        assert v.certificate.get("witness"), row.label


def test_catalog_conjugate_listed_rows():
    labels = [r.label for r in catalog().rows]
    assert "C: L_{inf,inf;1} -> L_{inf,inf;l1^-1}" in labels
    assert "H: L_{1,1;1} cap L_{inf,inf;1} -> L_{1,inf;1} cap L_{inf,inf;l1^-1}" in labels


# --- contracts ---------------------------------------------------------------------

def _queries_for_sufficiency():
    cat = catalog()
    qs = [r.query for r in cat.rows + cat.errata]
    qs.append(InterpolationQuery(M, "left", lk(1, 1), lk(1, 1)))
    qs.append(InterpolationQuery(H, "right", lk(INF, INF, "1", INF), lk(INF, INF, "1", INF)))
    qs.append(InterpolationQuery(C, "interior", lk(2, 2, "1"), lk(2, 2, "l1")))
    return qs


def test_sufficiency_only_never_no():
    rng = random.Random(7)
    qs = _queries_for_sufficiency()
    seen_fail = 0
    for q in rng.sample(qs, 25) + qs[-3:]:
        prof = dataclasses.replace(q.profile, lb1=False, lb2=False)
        v = decide(dataclasses.replace(q, profile=prof))
        assert v.bounded != "no"
        assert v.sufficiency_only
        seen_fail += any(c.status == "fails" for c in v.conditions)
    assert seen_fail >= 3


def test_right_limit_condition_branches():
    # infinite measure: the divergence condition is evaluated, and first
    q = InterpolationQuery(C, "right", lk(INF, INF, "1", INF), lk(INF, INF, "l1^-1", INF))
    v = decide(q)
    first = v.conditions[0]
    assert first.name.startswith("||t^(-1/r) a||_r") and first.status in ("holds", "fails")
    assert first.verdict is not None
    # finite measure: dropped, never evaluated
    v = decide(dataclasses.replace(q, source=lk(INF, INF), target=lk(INF, INF, "l1^-1")))
    first = v.conditions[0]
    assert first.status == "dropped" and first.verdict is None
    assert [c.name for c in v.conditions][1] == "Rinf"


def test_no_requires_flags():
    v = decide(InterpolationQuery(C, "interior", lk(2, 2, "1"), lk(2, 2, "l1")))
    assert v.bounded == "no"
    # the interior case accepts either lower bound
    prof = dataclasses.replace(C, lb2=False)
    v = decide(InterpolationQuery(prof, "interior", lk(2, 2, "1"), lk(2, 2, "l1")))
    assert v.bounded == "no"


# --- optimal and sharp spaces ------------------------------------------------------

@pytest.mark.parametrize("r,s", [(2, 3), (2, 2), (4, INF), (1.5, 6)])
def test_left_target_iterated_log(r, s):
    alpha = 0.5
    ir, js = 1 - 1 / r, 0.0 if s == INF else 1 / s
    o = optimal_target("left", lk(1, r, ell(ir, ir, ir + alpha)), M, s=s)
    assert o.space.p == 1 and o.space.r == s
    got = [o.symbol.exponent(i) for i in (1, 2, 3)]
    assert got == pytest.approx([-js, -js, -js + alpha])
    assert "limit" in o.sharpness


@pytest.mark.parametrize("r,s", [(2, 3), (1, 2), (3, 3)])
def test_left_source_iterated_log(r, s):
    alpha = 0.5
    ir, js = 1 - 1 / r, 1 / s
    o = optimal_source("left", lk(1, s, ell(-js, -js, -js + alpha)), M, r=r)
    assert o.space.r == r
    got = [o.symbol.exponent(i) for i in (1, 2, 3)]
    assert got == pytest.approx([ir, ir, ir + alpha])


@pytest.mark.parametrize("r,s", [(1, 1), (2, 3), (1, 4)])
def test_left_source_unweighted_target(r, s):
    o = optimal_source("left", lk(1, s), M, r=r)
    e = (1 - 1 / r) + 1 / s
    assert o.symbol.exponents[0] == pytest.approx(e)
    # exact weight: (1 + int_t^1 du/u)^e = l1^e
    Y = np.array([0.5, 10.0, 1e3])
    assert log_eval(o.weight, Y, Side.ZERO) == pytest.approx(e * np.log1p(Y), rel=1e-9)


def test_right_target_exponential_weight():
    o = optimal_target("right", lk(INF, INF, "exp(-1*l1^0.5)"), C)
    assert o.symbol is None and "numerically" in o.notes[-1]
    Y = np.array([1e2, 1e4])
    got = log_eval(o.weight, Y, Side.ZERO)
    # 1 + int_t^1 u^-1 exp(sqrt l1) du = 1 + 2 (sqrt l1 - 1) e^sqrt(l1) exactly
    L = 1 + Y
    exact = -np.log(1 + 2 * (np.sqrt(L) - 1) * np.exp(np.sqrt(L)))
    assert got == pytest.approx(exact, rel=1e-9)
    # up to a constant this is exp(-sqrt l1) / sqrt l1
    ratio = got - (-np.sqrt(L) - 0.5 * np.log(L))
    assert abs(ratio[1] - ratio[0]) < 0.1
    v = decide(InterpolationQuery(C, "right", lk(INF, INF, "exp(-1*l1^0.5)"),
                                  lk(INF, INF, "exp(-1*l1^0.5) * l1^-0.5")))
    assert v.bounded == "yes"


def test_right_source_r_s_one_exchange_identity():
    o = optimal_source("right", lk(INF, 1, "l1^-3"), C, r=1)
    # alpha(t) = int_0^t u^-1 l1^-3 du = l1^-2 / 2
    Y = np.array([0.0, 1.0, 50.0])
    assert log_eval(o.weight, Y, Side.ZERO) == pytest.approx(np.log(0.5 / (1 + Y) ** 2), rel=1e-9)
    assert o.symbol.exponents[0] == pytest.approx(-2)
    # ||t^-1 alpha||_{1,(0,x)} = int_0^x u^-1 b(u) log(x/u) du
    # in the variable y = log(1/u), with x = e^-Y0
    Y0 = mpmath.mpf(4)
    lhs = mpmath.quad(lambda y: 0.5 * (1 + y) ** -2, [Y0, mpmath.inf])
    rhs = mpmath.quad(lambda y: (1 + y) ** -3 * (y - Y0), [Y0, mpmath.inf])
    assert float(lhs) == pytest.approx(float(rhs), rel=1e-8)


def test_right_source_unweighted_rejected():
    with pytest.raises(HypothesisError) as err:
        optimal_source("right", lk(INF, 2, "1"), I31)
    assert err.value.verdict.tag is Tag.INFINITE


@pytest.mark.parametrize("r", [2, INF])
def test_p2_infinite_other_indices_rejected(r):
    with pytest.raises(HypothesisError, match="only available"):
        optimal_target("right", lk(INF, r, "l1^-1"), C, s=2)
    with pytest.raises(HypothesisError, match="only available"):
        optimal_source("right", lk(INF, 2, "l1^-2"), C, r=1 if r == INF else r)


def test_left_target_hypothesis_failure():
    # int_0^1 t^-1 a^-r' with a = 1 diverges
    with pytest.raises(HypothesisError) as err:
        optimal_target("left", lk(1, 2), M, s=2)
    assert err.value.verdict.tag is Tag.INFINITE
    with pytest.raises(HypothesisError, match="1 < r"):
        optimal_target("left", lk(1, 1, "l1^2"), M)


def test_interior_optimal_pair():
    o = optimal_target("interior", lk(1.2, 2, "l1^0.5", INF), I31)
    assert o.space.p == 2 and o.space.r == 2 and to_text(o.space.a) == "l1^0.5"
    back = optimal_source("interior", o.space, I31)
    assert back.space.p == pytest.approx(1.2) and to_text(back.space.a) == "l1^0.5"


def _random_weight(rng):
    return ell(*(rng.choice([-1.0, -0.5, 0.0, 0.5, 1.0]) for _ in range(3)))


@pytest.mark.parametrize("seed", range(10))
def test_interior_optimality_by_embedding(seed):
    rng = random.Random(seed)
    prof = rng.choice([M, C, I31])
    p = rng.choice([1.2, 1.5, 2.0]) if prof is I31 else rng.choice([1.5, 2.0, 4.0])
    s = rng.choice([1.0, 2.0, INF])
    src = lk(p, s, _random_weight(rng))
    beta = optimal_target("interior", src, prof).space
    for _ in range(3):
        k, sign = rng.randint(1, 3), rng.choice([1, -1])
        R = rng.choice([1.0, 2.0, s, INF])
        lam = f"{to_text(beta.a)} * l{k}^{0.1 * sign}"
        tgt = lk(beta.p, R, lam)
        bounded = decide(InterpolationQuery(prof, "interior", src, tgt)).bounded
        emb = embeds(beta, tgt)
        assert emb.tag is not Tag.INCONCLUSIVE
        assert (bounded == "yes") == emb.finite, (src, tgt)
