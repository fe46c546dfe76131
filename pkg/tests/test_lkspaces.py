import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lkinterp.asymcalc import Tag
from lkinterp.lkspaces import (LKSpaceSpec, StepFunction, SumSpaceSpec, embeds, nontrivial,
                               quasinorm, rearrange, sum_quasinorm)
from lkinterp.svfunc import RunningSup

INF = math.inf


# --- rearrangement ---------------------------------------------------------------

def test_rearrange_sorts():
    f = StepFunction(((3, 1), (1, 1), (2, 1)))
    assert rearrange(f).pieces == ((3, 1), (2, 1), (1, 1))


def test_rearrange_idempotent():
    f = StepFunction(((3, 1), (2, 1), (1, 1)))
    assert rearrange(f) == f
    assert rearrange(rearrange(f)) == rearrange(f)


def test_rearrange_merges_ties():
    f = StepFunction(((2, 1), (2, Fraction(1, 2)), (1, 1)))
    assert rearrange(f).pieces == ((2, Fraction(3, 2)), (1, 1))
    assert rearrange(f).exact


def test_rearrange_ties_float_measure():
    f = StepFunction(((2, 1), (2, 0.5), (1, 1)))
    assert [(float(h), float(m)) for h, m in rearrange(f).pieces] == [(2.0, 1.5), (1.0, 1.0)]


def test_distribution_values():
    f = StepFunction(((2, 1), (2, Fraction(1, 2)), (1, 1)))
    assert f.distribution(1) == Fraction(3, 2)
    assert f.distribution(0) == Fraction(5, 2)
    assert f.distribution(2) == 0


pieces = st.lists(st.tuples(st.integers(0, 6), st.fractions(Fraction(1, 8), 4)),
                  min_size=1, max_size=12)


@given(pieces)
def test_equimeasurable(ps):
    f = StepFunction(tuple(ps))
    g = rearrange(f)
    for h in range(0, 8):
        assert g.distribution(h) == f.distribution(h)
    for h, _ in ps:
        if h == 0:
            continue
        assert g.distribution(Fraction(h) - Fraction(1, 3)) == f.distribution(Fraction(h) - Fraction(1, 3))
    assert g.is_nonincreasing()


@given(pieces, st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_rearrangement_invariance(ps, rnd):
    shuffled = list(ps)
    rnd.shuffle(shuffled)
    total = sum(m for _, m in ps)
    scale = Fraction(1, 1) / total  # fit inside (0, 1)
    f = StepFunction(tuple((h, m * scale) for h, m in ps))
    g = StepFunction(tuple((h, m * scale) for h, m in shuffled))
    assert rearrange(f) == rearrange(g)
    spec = LKSpaceSpec(2, 3, "l1^-1", 1)
    assert quasinorm(rearrange(f), spec).value == quasinorm(rearrange(g), spec).value


# --- validation and csv ----------------------------------------------------------

@pytest.mark.parametrize("bad", [((-1, 1),), ((1, 0),), ((INF, 1),), ((1, INF), (1, 1))])
def test_invalid_pieces(bad):
    with pytest.raises(ValueError):
        StepFunction(bad)


def test_csv_roundtrip():
    f = StepFunction.from_intervals([(3, 0, 1), (1, 2, 2.5)])
    g = StepFunction.from_csv(f.to_csv())
    assert g.pieces == f.pieces and g.support == f.support


def test_csv_rejects_negative():
    with pytest.raises(ValueError):
        StepFunction.from_csv("height,measure\n1,1\n-2,1\n")
    with pytest.raises(ValueError):
        StepFunction.from_csv("1,abc\n")


def test_csv_exact_rationals():
    f = StepFunction.from_csv("1/2,1/3\n2,1\n")
    assert f.exact and f.pieces[0] == (Fraction(1, 2), Fraction(1, 3))


def test_support_must_be_disjoint():
    with pytest.raises(ValueError):
        StepFunction.from_intervals([(1, 0, 2), (1, 1, 3)])


# --- quasinorm -------------------------------------------------------------------

def test_quasinorm_indicator():
    v = quasinorm(StepFunction(((1, 1),)), LKSpaceSpec(1, 1, "1", 1))
    assert v.tag is Tag.FINITE and v.value == pytest.approx(1.0, rel=1e-10)


def test_quasinorm_log_weighted_closed_form():
    # int_0^inf e^-Y (1+Y)^-2 dY = 1 - e E1(1)
    from scipy.special import exp1
    v = quasinorm(StepFunction(((1, 1),)), LKSpaceSpec(2, 2, "l1^-1", 1))
    assert v.value == pytest.approx(math.sqrt(1 - math.e * exp1(1.0)), rel=1e-8)


def test_quasinorm_sup_of_log_product():
    # f* = l1 as right-sampled steps; a = l1^-1 (non-decreasing on (0,1))
    edges = np.concatenate([[0.0], np.logspace(-300, 0, 400)])
    fstar = StepFunction.sample(lambda t: 1.0 + math.log(1.0 / t), edges, at="right")
    v = quasinorm(fstar, LKSpaceSpec(INF, INF, "l1^-1", 1))
    assert v.value == pytest.approx(1.0, rel=0.02)


def test_quasinorm_power_blowup():
    # t^-1/2 on dyadic steps down to 2^-n: the L2 norm squared grows like n,
    # and the doubling protocol calls the limit Infinite
    from lkinterp.quadnum import detect_divergence

    def truncated(n):
        edges = np.concatenate([[0.0], 2.0 ** np.arange(-n, 1, dtype=float)])
        f = StepFunction.sample(lambda t: t ** -0.5, edges, at="right")
        return quasinorm(f, LKSpaceSpec(2, 2, "1", 1)).value ** 2

    depths = [2 ** k for k in range(3, 10)]
    v = detect_divergence([(n * math.log(2), truncated(n)) for n in depths])
    assert v.tag is Tag.INFINITE


def test_quasinorm_requires_nonincreasing():
    with pytest.raises(ValueError):
        quasinorm(StepFunction(((1, 0.5), (2, 0.5))), LKSpaceSpec(1, 1, "1", 1))


def test_quasinorm_infinite_tail():
    f = StepFunction(((1, INF),))
    assert quasinorm(f, LKSpaceSpec(2, 2, "1", INF)).tag is Tag.INFINITE
    assert quasinorm(f, LKSpaceSpec(INF, INF, "1", INF)).value == pytest.approx(1.0)


def test_running_sup_notice():
    spec = LKSpaceSpec(INF, INF, "l1^-1", INF)
    new, notes = spec.normalized()
    assert isinstance(new.a, RunningSup) and notes
    same, none = LKSpaceSpec(INF, INF, "l1^-1", 1).normalized()
    assert not none


def test_trivial_space_flag():
    v = quasinorm(StepFunction(((1, 1),)), LKSpaceSpec(INF, 1, "1", 1))
    assert v.tag is Tag.INFINITE and any("trivial" in n for n in v.notes)


@pytest.mark.parametrize("spec,want", [(LKSpaceSpec(INF, 1, "1", 1), False),
                                       (LKSpaceSpec(INF, INF, "l1^-1", 1), True),
                                       (LKSpaceSpec(3, 1, "l1^-5", 1), True),
                                       (LKSpaceSpec(INF, 2, "l1^-1", 1), True),
                                       (LKSpaceSpec(INF, 2, "l1^-0.5", 1), False)])
def test_nontrivial(spec, want):
    assert nontrivial(spec) is want


# --- sums and intersections ------------------------------------------------------

def test_sum_quasinorm_indicator():
    f = StepFunction(((1, 2),))
    assert sum_quasinorm(f, SumSpaceSpec(1, 1, INF, INF)).value == pytest.approx(2.0)
    assert sum_quasinorm(f, SumSpaceSpec(1, 1, INF, INF, mode="intersection")).value \
        == pytest.approx(2.0)


def test_sum_quasinorm_zero():
    assert sum_quasinorm(StepFunction(((0, 3),)), SumSpaceSpec(1, 1, 2, 2)).value == 0.0


def test_intersection_swaps_pairing():
    s = SumSpaceSpec(1, 1, 2, 2)
    i = SumSpaceSpec(1, 1, 2, 2, mode="intersection")
    assert s.pairing() == ((1.0, 1.0), (2.0, 2.0))
    assert i.pairing() == ((2.0, 2.0), (1.0, 1.0))
    f = StepFunction(((4, Fraction(1, 4)), (1, 3)))
    # sum: int_0^1 f* + (int_1^inf f*^2)^(1/2) = 1.75 + sqrt(2.25)
    assert sum_quasinorm(f, s).value == pytest.approx(1.75 + 1.5)
    # intersection: (int_0^1 f*^2)^(1/2) + int_1^inf f* = sqrt(4.75) + 2.25
    assert sum_quasinorm(f, i).value == pytest.approx(math.sqrt(4.75) + 2.25)


def test_sum_requires_distinct_p():
    with pytest.raises(ValueError):
        SumSpaceSpec(2, 1, 2, 3)


# --- embeddings ------------------------------------------------------------------

def test_embeds_finite_measure_larger_p():
    assert embeds(LKSpaceSpec(2, 5, "l1^7", 1), LKSpaceSpec(1, 1, "l1^-3", 1)).finite


def test_embeds_log_weight():
    assert embeds(LKSpaceSpec(1, 1, "l1", 1), LKSpaceSpec(1, 1, "1", 1)).finite


def test_embeds_fails_linf_to_linf1():
    v = embeds(LKSpaceSpec(INF, INF, "1", 1), LKSpaceSpec(INF, 1, "1", 1))
    assert v.tag is Tag.INFINITE


def test_embeds_wrong_direction():
    assert embeds(LKSpaceSpec(1, 1, "1", 1), LKSpaceSpec(2, 2, "1", 1)).tag is Tag.INFINITE
    assert embeds(LKSpaceSpec(2, 2, "1", INF), LKSpaceSpec(1, 1, "1", INF)).tag is Tag.INFINITE


def test_embeds_p_infinite_r_le_s():
    # ||t^-1/2 l1^-1||_{2,(0,x)} ~ l1^-1/2 against ||t^-1 l1^-2||_{1,(0,x)} ~ l1^-1
    v = embeds(LKSpaceSpec(INF, 1, "l1^-2", 1), LKSpaceSpec(INF, 2, "l1^-1", 1))
    assert v.tag is Tag.INFINITE
    w = embeds(LKSpaceSpec(INF, 1, "l1^-2", 1), LKSpaceSpec(INF, 2, "l1^-2", 1))
    assert w.tag is Tag.FINITE


def test_embeds_requires_same_b():
    with pytest.raises(ValueError):
        embeds(LKSpaceSpec(1, 1, "1", 1), LKSpaceSpec(1, 1, "1", INF))


def _family(n, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        k = rng.randint(1, 8)
        hs = sorted((rng.uniform(0.1, 10) for _ in range(k)), reverse=True)
        ms = [rng.uniform(0.1, 1) for _ in range(k)]
        tot = sum(ms) * rng.uniform(1.0, 3.0)
        out.append(StepFunction(tuple((h, m / tot) for h, m in zip(hs, ms))))
    return out


@pytest.mark.parametrize("src,dst", [
    (LKSpaceSpec(2, 1, "1", 1), LKSpaceSpec(2, 2, "1", 1)),
    (LKSpaceSpec(1, 1, "l1", 1), LKSpaceSpec(1, 1, "1", 1)),
    (LKSpaceSpec(3, 2, "1", 1), LKSpaceSpec(2, 2, "l1^-1", 1)),
])
def test_embedding_constant_is_stable(src, dst):
    assert embeds(src, dst).finite

    def max_ratio(fs):
        return max(quasinorm(f, dst).value / quasinorm(f, src).value for f in fs)

    fam = _family(100, 7)
    c50, c100 = max_ratio(fam[:50]), max_ratio(fam)
    assert c100 <= 1.1 * c50
