"""Boundedness of joint weak type operators between Lorentz-Karamata spaces.

A query names an operator profile (interpolation segment and lower-bound
flags), a case and the two spaces.  ``decide`` reduces it to the
characterizing quantities of ``functionals``:

* interior point of the segment: ``N``;
* left endpoint: ``L``;
* right endpoint with ``p2 < inf``: ``R``;
* right endpoint with ``p2 = inf``: ``Rinf`` plus divergence of
  ``||t^(-1/r) a||_r`` at infinity (not needed on finite measure spaces);
* sums and intersections: ``L`` and ``R`` (or ``Rinf``) on the two halves.

All quantities use ``b_*(t) = b(t^(1/m))`` with ``m`` the slope of the
segment.  Without the lower-bound flags the conditions are sufficient only,
so the answer is then never ``no``.

``optimal_target`` and ``optimal_source`` build the sharp partner spaces,
and ``catalog`` lists the classical operators with their known results as
regression rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .asymcalc import EndpointSymbol, Side, Tag, integrate_to_endpoint, norm_power_symbol
from .functionals import (FinVerdict, FunctionalSpec, _symbol_witness, conjugate, evaluate)
from .lkspaces import LKSpaceSpec, SumSpaceSpec
from .opsim import CATALOG as PROFILES
from .opsim import OperatorProfile, riesz_potential_profile
from .quadnum import side_integral
from .svfunc import (ArgPower, Const, LogIntegral, LogTier, NotRepresentable, Power, Product,
                     RunningSup, as_expr, log_eval, substar, to_symbol, to_text)

CASES = ("interior", "left", "right", "sum", "intersection")
Space = Union[LKSpaceSpec, SumSpaceSpec]


class HypothesisError(ValueError):
    """A hypothesis of the applicable result fails.

    ``verdict`` carries the evaluation that failed, when there is one.
    """

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict


# ---------------------------------------------------------------------------
# exact exponent arithmetic


def rational(x):
    """``x`` as a ``Fraction`` (or ``math.inf``).

    Floats that sit within ``1e-12`` of a fraction with denominator at most
    ``10**6`` snap to it, so ``0.25`` and ``1/3`` given as floats stay exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        x = x.strip().lower()
        if x in ("inf", "infinity", "oo"):
            return math.inf
        return Fraction(x)
    x = float(x)
    if math.isinf(x):
        return math.inf
    guess = Fraction(x).limit_denominator(10 ** 6)
    if abs(float(guess) - x) <= 1e-12 * max(1.0, abs(x)):
        return guess
    return Fraction(x)


def _inv(x) -> Fraction:
    return Fraction(0) if x == math.inf else 1 / x


def _from_inv(y):
    return math.inf if y == 0 else 1 / y


def _fmt(x) -> str:
    return "inf" if x == math.inf else str(x)


def _slope(profile: OperatorProfile) -> Fraction:
    seg = profile.segment
    p1, q1, p2, q2 = (rational(getattr(seg, n)) for n in ("p1", "q1", "p2", "q2"))
    return (_inv(q1) - _inv(q2)) / (_inv(p1) - _inv(p2))


def _seg(profile: OperatorProfile):
    seg = profile.segment
    return tuple(rational(getattr(seg, n)) for n in ("p1", "q1", "p2", "q2"))


def interior_exponents(profile: OperatorProfile, theta) -> Tuple[object, object]:
    """``(p, q)`` with ``1/p = (1-theta)/p1 + theta/p2`` and likewise for ``q``."""
    theta = rational(theta)
    if not 0 < theta < 1:
        raise HypothesisError("interior case needs 0 < theta < 1")
    p1, q1, p2, q2 = _seg(profile)
    p = _from_inv((1 - theta) * _inv(p1) + theta * _inv(p2))
    q = _from_inv((1 - theta) * _inv(q1) + theta * _inv(q2))
    return p, q


def _theta_from(x, e1, e2) -> Fraction:
    """``theta`` with ``1/x = (1-theta)/e1 + theta/e2``."""
    return (_inv(e1) - _inv(x)) / (_inv(e1) - _inv(e2))


def b_star(b, m) -> object:
    """``b(t^(1/m))``; log-power weights keep their form (equivalent)."""
    b = as_expr(b)
    if m == 1:
        return b
    sub = substar(b, float(m))
    return sub.simplified if sub.simplified is not None else sub.exact


# ---------------------------------------------------------------------------
# queries and verdicts


@dataclass(frozen=True)
class InterpolationQuery:
    """Is ``T: source -> target`` bounded?

    ``case`` is one of ``interior``, ``left``, ``right``, ``sum`` or
    ``intersection``.  ``theta`` is only used in the interior case; when it
    is omitted it is read off the source exponent.  LK spaces over
    ``(0, 1)`` (``B = 1``) describe finite measure spaces; sums and
    intersections live over ``(0, inf)``.
    """

    profile: OperatorProfile
    case: str
    source: Space
    target: Space
    theta: Optional[object] = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}")
        split = self.case in ("sum", "intersection")
        for name in ("source", "target"):
            sp = getattr(self, name)
            if split and not isinstance(sp, SumSpaceSpec):
                raise HypothesisError(f"{self.case} case needs a sum/intersection {name}")
            if not split and not isinstance(sp, LKSpaceSpec):
                raise HypothesisError(f"{self.case} case needs a single LK space as {name}")
            if split and sp.mode != self.case:
                raise HypothesisError(f"{name} is a {sp.mode}, the case is {self.case}")
        if not split and self.source.B != self.target.B:
            raise HypothesisError("source and target must both live on finite or both "
                                  "on infinite measure spaces")
        p1, q1, p2, q2 = _seg(self.profile)
        if self.finite_measure and not q1 < q2:
            raise HypothesisError("finite measure spaces need q1 < q2")
        if self.case == "interior":
            theta = self.theta
            if theta is None:
                theta = _theta_from(rational(self.source.p), p1, p2)
            theta = rational(theta)
            if not 0 < theta < 1:
                raise HypothesisError(f"interior case needs 0 < theta < 1, got {theta}")
            object.__setattr__(self, "theta", theta)
            p, q = interior_exponents(self.profile, theta)
            self._check_exponents(p, q)
        elif self.case == "left":
            self._check_exponents(p1, q1)
        elif self.case == "right":
            self._check_exponents(p2, q2)
        else:
            if not q1 < q2:
                raise HypothesisError("sums and intersections need q1 < q2 so that the "
                                      "target pairing follows the source pairing")

    def _check_exponents(self, p, q) -> None:
        sp, tq = rational(self.source.p), rational(self.target.p)
        if sp != p:
            raise HypothesisError(f"{self.case} case needs source p = {_fmt(p)}, got {_fmt(sp)}")
        if tq != q:
            raise HypothesisError(f"{self.case} case needs target q = {_fmt(q)}, got {_fmt(tq)}")

    @property
    def finite_measure(self) -> bool:
        return isinstance(self.source, LKSpaceSpec) and self.source.B == 1.0

    @property
    def interval(self) -> Tuple[float, float]:
        return (0.0, 1.0) if self.finite_measure else (0.0, math.inf)

    @property
    def slope(self) -> Fraction:
        return _slope(self.profile)

    @property
    def exponents(self) -> Optional[Tuple[object, object]]:
        """``(p, q)`` of a single-space query, exact."""
        p1, q1, p2, q2 = _seg(self.profile)
        if self.case == "interior":
            return interior_exponents(self.profile, self.theta)
        if self.case == "left":
            return p1, q1
        if self.case == "right":
            return p2, q2
        return None


@dataclass(frozen=True)
class Condition:
    """One finiteness (or divergence) requirement and how it came out."""

    name: str
    requirement: str  # "finite" or "infinite"
    verdict: Optional[FinVerdict]
    status: str  # "holds", "fails", "unknown" or "dropped"

    def to_dict(self) -> dict:
        return {"name": self.name, "requirement": self.requirement, "status": self.status,
                "verdict": None if self.verdict is None else self.verdict.to_dict()}


def _condition(name: str, requirement: str, verdict: FinVerdict) -> Condition:
    if verdict.tag is Tag.INCONCLUSIVE:
        return Condition(name, requirement, verdict, "unknown")
    ok = verdict.finite == (requirement == "finite")
    return Condition(name, requirement, verdict, "holds" if ok else "fails")


@dataclass(frozen=True)
class BoundednessVerdict:
    """``bounded`` is ``yes``, ``no`` or ``inconclusive``.

    ``no`` is only returned when the lower-bound flags make the conditions
    necessary; its certificate holds the failing condition's witness.
    """

    bounded: str
    theorem: str
    conditions: Tuple[Condition, ...]
    certificate: dict
    notes: Tuple[str, ...] = ()
    sufficiency_only: bool = False

    @property
    def functionals(self) -> Dict[str, FinVerdict]:
        return {c.name: c.verdict for c in self.conditions if c.verdict is not None}

    @property
    def symbolic(self) -> bool:
        """All evaluated conditions were decided by the exact calculus."""
        return all(c.verdict.method == "symbolic" for c in self.conditions
                   if c.verdict is not None)

    def to_dict(self) -> dict:
        return {"bounded": self.bounded, "theorem": self.theorem,
                "conditions": [c.to_dict() for c in self.conditions],
                "certificate": self.certificate, "notes": list(self.notes),
                "sufficiency_only": self.sufficiency_only}


# ---------------------------------------------------------------------------
# helpers


def _functional(kind: str, r, s, a, b, interval, method: str) -> FinVerdict:
    return evaluate(FunctionalSpec(kind, float(r), float(s), a, b, interval), method)


def _right_kind(p2) -> str:
    return "Rinf" if p2 == math.inf else "R"


def weight_norm(a, r, side, method: str = "auto") -> FinVerdict:
    """``||t^(-1/r) a||_r`` toward one endpoint (Finite or Infinite)."""
    side = Side(side)
    a = as_expr(a)
    kind = f"||t^(-1/r) a||_r near {side.value}"
    sym = to_symbol(a, side)
    if method != "numeric" and not isinstance(sym, NotRepresentable):
        v = norm_power_symbol(0.0, sym, float(r), "inner")
        if v.finite:
            return FinVerdict(Tag.FINITE, "symbolic", kind, asymptotes={side: v.asymptote})
        return FinVerdict(Tag.INFINITE, "symbolic", kind, divergence=v.divergence,
                          witness=_symbol_witness(v.divergence))
    nv = side_integral(a, side, r=float(r), measure="dt/t")
    return FinVerdict(nv.tag, "numeric", kind, value=nv.value, notes=nv.notes)


def _both_sides(v0: FinVerdict, v1: FinVerdict, kind: str) -> FinVerdict:
    tags = (v0.tag, v1.tag)
    if Tag.INFINITE in tags:
        bad = v0 if v0.tag is Tag.INFINITE else v1
        return FinVerdict(Tag.INFINITE, bad.method, kind, divergence=bad.divergence,
                          witness=bad.witness, components={"zero": v0, "inf": v1})
    tag = Tag.INCONCLUSIVE if Tag.INCONCLUSIVE in tags else Tag.FINITE
    meth = "symbolic" if v0.method == v1.method == "symbolic" else "numeric"
    return FinVerdict(tag, meth, kind, components={"zero": v0, "inf": v1})


def _nondecreasing_on(a, interval) -> bool:
    """Whether ``a`` is non-decreasing in ``t`` on the interval (dense grid)."""
    if isinstance(a, Const):
        return True
    Y = np.logspace(-3, 6, 2000)
    lo, hi = interval
    parts = []
    if lo == 0:
        parts.append(log_eval(a, Y, Side.ZERO)[::-1])
    if math.isinf(hi):
        parts.append(log_eval(a, Y, Side.INF))
    seq = np.concatenate(parts)
    return bool(np.all(np.diff(seq) >= -1e-12 * np.maximum(1.0, np.abs(seq[1:]))))


def _monotone_weight(a, r, interval, notes: list):
    """Enforce the ``r = inf`` convention: ``a`` non-decreasing on its range."""
    if r != math.inf or _nondecreasing_on(a, interval):
        return a
    if interval[0] != 0:
        raise HypothesisError("r = inf needs a non-decreasing weight on (1, inf)")
    notes.append(f"r = inf: weight {to_text(a)} replaced by its running supremum "
                 "(same space)")
    return RunningSup(a)


def _trivial_near_zero(p, r, a, method: str) -> Optional[FinVerdict]:
    """The norm whose divergence makes ``L_{inf,r;a}`` trivial, if it does."""
    if p != math.inf:
        return None
    v = weight_norm(a, r, Side.ZERO, method)
    return v if v.tag is Tag.INFINITE else None


def _needs(profile: OperatorProfile, case: str) -> Tuple[bool, str]:
    if case == "interior":
        return profile.lb1 or profile.lb2, "a lower bound of either kind"
    if case == "left":
        return profile.lb1, "the first lower bound"
    if case == "right":
        return profile.lb2, "the second lower bound"
    return profile.lb1 and profile.lb2, "both lower bounds"


def _certificate(c: Condition) -> dict:
    v = c.verdict
    out = {"condition": c.name, "requirement": c.requirement}
    if v is None:
        return out
    if v.witness:
        out["witness"] = [{"side": w.side.value, "log_y": w.log_y, "log_value": w.log_value}
                          for w in v.witness]
    if v.divergence is not None:
        out["divergence"] = {"side": v.divergence.side.value,
                             "symbol": v.divergence.to_text()}
    if v.value is not None:
        out["value"] = v.value
    if v.asymptotes:
        out["asymptotes"] = {s.value: sym.to_text() for s, sym in v.asymptotes.items()}
    return out


def _assemble(query: InterpolationQuery, theorem: str, conds: List[Condition], notes: list,
              necessary: Optional[bool] = None) -> BoundednessVerdict:
    lb_ok, which = _needs(query.profile, query.case)
    if necessary is not None:
        lb_ok = lb_ok and necessary
    failing = [c for c in conds if c.status == "fails"]
    unknown = [c for c in conds if c.status == "unknown"]
    suff = not lb_ok
    if suff:
        notes.append(f"operator lacks {which}: the conditions are sufficient only, so a "
                     "failed condition does not disprove boundedness")
    if failing:
        bounded = "no" if lb_ok else "inconclusive"
        cert = _certificate(failing[0])
    elif unknown:
        bounded = "inconclusive"
        cert = _certificate(unknown[0])
    else:
        bounded = "yes"
        cert = {"values": {c.name: _certificate(c) for c in conds if c.verdict is not None}}
    return BoundednessVerdict(bounded, theorem, tuple(conds), cert, tuple(notes), suff)


def _vacuous(query, theorem: str, why: FinVerdict, label: str, notes: list):
    cond = Condition(f"source triviality ({label})", "infinite", why, "holds")
    notes.append("the source space is {0}: boundedness holds vacuously")
    return BoundednessVerdict("yes", theorem, (cond,), {"vacuous": True,
                              "condition": cond.name}, tuple(notes), False)


# ---------------------------------------------------------------------------
# decide


def decide(query: InterpolationQuery, method: str = "auto") -> BoundednessVerdict:
    """Decide boundedness of ``T: source -> target`` for the query's case."""
    if query.case in ("sum", "intersection"):
        return _decide_split(query, method)
    src, tgt = query.source, query.target
    m = query.slope
    a, r = src.a, rational(src.r)
    b, s = b_star(tgt.a, m), rational(tgt.r)
    iv = query.interval
    notes = [] if m == 1 else [f"b_* = b(t^(1/m)) with m = {m}"]
    p1, q1, p2, q2 = _seg(query.profile)
    p = rational(src.p)
    triv = _trivial_near_zero(p, r, a, method)

    if query.case == "interior":
        theorem = "interior point: bounded iff N(r, s, a, b_*) < inf"
        conds = [_condition("N", "finite", _functional("N", r, s, a, b, iv, method))]
        return _assemble(query, theorem, conds, notes)
    if query.case == "left":
        theorem = "left endpoint: bounded iff L(r, s, a, b_*) < inf"
        conds = [_condition("L", "finite", _functional("L", r, s, a, b, iv, method))]
        return _assemble(query, theorem, conds, notes)

    # right endpoint
    if query.profile.averaging_only:
        theorem = ("right endpoint, operator dominated by the averaging arm: "
                   "N(r, s, a, b_*) < inf suffices")
        conds = [_condition("N", "finite", _functional("N", r, s, a, b, iv, method))]
        notes.append("the averaging arm alone is bounded when N < inf for all non-negative "
                     "functions; N is not necessary for non-increasing ones")
        return _assemble(query, theorem, conds, notes, necessary=False)
    if p2 != math.inf:
        theorem = "right endpoint, p2 < inf: bounded iff R(r, s, a, b_*) < inf"
        conds = [_condition("R", "finite", _functional("R", r, s, a, b, iv, method))]
        return _assemble(query, theorem, conds, notes)
    theorem = ("right endpoint, p2 = inf: bounded iff ||t^(-1/r) a||_r = inf on (0, inf) "
               "and Rinf(r, s, a, b_*) < inf")
    if triv is not None:
        return _vacuous(query, theorem, triv, "||t^(-1/r) a||_r = inf near 0", notes)
    conds = []
    name = "||t^(-1/r) a||_r on (0, inf)"
    if query.finite_measure:
        theorem = "right endpoint, p2 = inf, finite measure: bounded iff Rinf(r, s, a, b_*) < inf"
        conds.append(Condition(name, "infinite", None, "dropped"))
        notes.append("finite measure: the divergence condition on ||t^(-1/r) a||_r is dropped")
    else:
        v = _both_sides(weight_norm(a, r, Side.ZERO, method),
                        weight_norm(a, r, Side.INF, method), name)
        conds.append(_condition(name, "infinite", v))
    a = _monotone_weight(a, r, iv, notes)
    conds.append(_condition("Rinf", "finite", _functional("Rinf", r, s, a, b, iv, method)))
    return _assemble(query, theorem, conds, notes)


def _split_pairs(query: InterpolationQuery):
    p1, q1, p2, q2 = _seg(query.profile)
    src, tgt = query.source, query.target
    sp = {rational(src.p1): (rational(src.r1), src.a), rational(src.p2): (rational(src.r2), src.a2)}
    tp = {rational(tgt.p1): (rational(tgt.r1), tgt.a), rational(tgt.p2): (rational(tgt.r2), tgt.a2)}
    if set(sp) != {p1, p2}:
        raise HypothesisError(f"source exponents must be p1 = {_fmt(p1)} and p2 = {_fmt(p2)}")
    if set(tp) != {q1, q2}:
        raise HypothesisError(f"target exponents must be q1 = {_fmt(q1)} and q2 = {_fmt(q2)}")
    return sp[p1], sp[p2], tp[q1], tp[q2]


def _decide_split(query: InterpolationQuery, method: str) -> BoundednessVerdict:
    (r1, a1), (r2, a2), (s1, b1), (s2, b2) = _split_pairs(query)
    m = query.slope
    b1, b2 = b_star(b1, m), b_star(b2, m)
    p1, q1, p2, q2 = _seg(query.profile)
    notes = [] if m == 1 else [f"b_* = b(t^(1/m)) with m = {m}"]
    rk = _right_kind(p2)
    near, far = (0.0, 1.0), (1.0, math.inf)
    conds = []
    if query.case == "sum":
        theorem = (f"sum: bounded iff L(r1, s1; 0, 1) + {rk}(r2, s2; 1, inf) < inf"
                   + (" and ||t^(-1/r2) a||_r2 = inf on (1, inf)" if rk == "Rinf" else ""))
        if rk == "Rinf":
            name = "||t^(-1/r2) a||_r2 on (1, inf)"
            conds.append(_condition(name, "infinite", weight_norm(a2, r2, Side.INF, method)))
            a2 = _monotone_weight(a2, r2, far, notes)
        conds.append(_condition("L on (0, 1)", "finite",
                                _functional("L", r1, s1, a1, b1, near, method)))
        conds.append(_condition(f"{rk} on (1, inf)", "finite",
                                _functional(rk, r2, s2, a2, b2, far, method)))
    else:
        theorem = f"intersection: bounded iff L(r1, s1; 1, inf) + {rk}(r2, s2; 0, 1) < inf"
        triv = _trivial_near_zero(p2, r2, a2, method)
        if triv is not None:
            return _vacuous(query, theorem, triv, "||t^(-1/r2) a||_r2 = inf near 0", notes)
        if rk == "Rinf":
            a2 = _monotone_weight(a2, r2, near, notes)
        conds.append(_condition("L on (1, inf)", "finite",
                                _functional("L", r1, s1, a1, b1, far, method)))
        conds.append(_condition(f"{rk} on (0, 1)", "finite",
                                _functional(rk, r2, s2, a2, b2, near, method)))
    return _assemble(query, theorem, conds, notes)


# ---------------------------------------------------------------------------
# sharp and optimal spaces


@dataclass(frozen=True)
class OptimalSpace:
    """A constructed partner space.

    ``weight`` is the exact construction (it may contain lazy integrals);
    ``space`` uses the log-power simplification when one exists.
    """

    space: LKSpaceSpec
    weight: object
    symbol: Optional[EndpointSymbol]
    theorem: str
    sharpness: str
    hypothesis: Optional[FinVerdict] = None
    notes: Tuple[str, ...] = ()

    @property
    def symbolic(self) -> bool:
        return self.symbol is not None

    def to_dict(self) -> dict:
        sp = self.space
        return {"space": {"p": sp.p, "r": sp.r, "a": to_text(sp.a), "B": sp.B},
                "weight": to_text(self.weight),
                "symbol": None if self.symbol is None else self.symbol.to_text(),
                "theorem": self.theorem, "sharpness": self.sharpness,
                "hypothesis": None if self.hypothesis is None else self.hypothesis.to_dict(),
                "notes": list(self.notes)}


def _expr_from_symbol(sym: EndpointSymbol):
    factors = [LogTier(i + 1, e) for i, e in enumerate(sym.exponents) if e != 0.0]
    if not factors:
        return Const(1.0)
    return factors[0] if len(factors) == 1 else Product(tuple(factors))


def _integral_verdict(w, q: float, method: str) -> FinVerdict:
    """``int_0^1 t^-1 w(t)^q dt``: Finite or Infinite."""
    kind = "int_0^1 t^-1 w^q dt"
    sym = to_symbol(w, Side.ZERO)
    if method != "numeric" and not isinstance(sym, NotRepresentable):
        v = integrate_to_endpoint(sym.power(q))
        if v.finite:
            return FinVerdict(Tag.FINITE, "symbolic", kind, asymptotes={Side.ZERO: v.asymptote})
        return FinVerdict(Tag.INFINITE, "symbolic", kind, divergence=v.divergence,
                          witness=_symbol_witness(v.divergence))
    nv = side_integral(Power(w, q), Side.ZERO, measure="dt/t")
    return FinVerdict(nv.tag, "numeric", kind, value=nv.value, notes=nv.notes)


def _require(v: FinVerdict, want: str, what: str) -> None:
    if v.tag is Tag.INCONCLUSIVE:
        raise HypothesisError(f"could not decide whether {what} is {want}", v)
    if v.finite != (want == "finite"):
        raise HypothesisError(f"hypothesis fails: {what} is {v.tag.value}, needs {want}", v)


def _prod(*factors):
    fs = [f for f in factors if f is not None]
    if not fs:
        return Const(1.0)
    return fs[0] if len(fs) == 1 else Product(tuple(fs))


def _pw(expr, e: float):
    if e == 0 or expr == Const(1.0):
        return None
    return expr if e == 1 else Power(expr, float(e))


def _at_power(expr, m):
    """``t -> expr(t^m)``."""
    return expr if m == 1 else ArgPower(expr, float(m))


def _finish(exact, p, r, theorem: str, sharp: str, hyp, notes) -> OptimalSpace:
    sym = to_symbol(exact, Side.ZERO)
    if isinstance(sym, NotRepresentable):
        notes = list(notes) + [f"no log-power form ({sym.reason}); the weight is evaluated "
                               "numerically"]
        return OptimalSpace(LKSpaceSpec(float(p), float(r), exact, 1.0), exact, None, theorem,
                            sharp, hyp, tuple(notes))
    simple = _expr_from_symbol(sym)
    notes = list(notes) + ["weight simplified to its log-power germ (equivalent near 0)"]
    return OptimalSpace(LKSpaceSpec(float(p), float(r), simple, 1.0), exact, sym, theorem,
                        sharp, hyp, tuple(notes))


_LIMIT_NOTE = ("sharp among LK spaces: a competitor weight lambda is dominated provided "
               "the limit of {ratio} as x -> 0 exists{when}; for log-power competitors "
               "it does, since ratios of log-power germs converge")


def optimal_target(case: str, source: LKSpaceSpec, profile: OperatorProfile,
                   s=None, method: str = "auto") -> OptimalSpace:
    """Smallest LK target for ``source`` in the given case.

    Parameters
    ----------
    case : {"interior", "left", "right"}
    source : LKSpaceSpec
        ``L_{p,r;a}`` with ``p`` matching the case.
    s : float, optional
        Second index of the target (defaults to ``r``).
    """
    p1, q1, p2, q2 = _seg(profile)
    m = _slope(profile)
    p, r, a = rational(source.p), rational(source.r), source.a
    s = r if s is None else rational(s)
    if case == "interior":
        theta = _theta_from(p, p1, p2)
        if not 0 < theta < 1:
            raise HypothesisError("source p is not an interior point of the segment")
        _, q = interior_exponents(profile, theta)
        b = substar(a, float(1 / m))
        weight = b.simplified if b.simplified is not None else b.exact
        sp = LKSpaceSpec(float(q), float(r), weight, source.B)
        sym = to_symbol(weight, Side.ZERO)
        return OptimalSpace(sp, b.exact, None if isinstance(sym, NotRepresentable) else sym,
                            "interior point: L_{p,s;b_*} -> L_{q,s;b} is optimal",
                            "optimal in the LK scale (both target and source)",
                            notes=(f"theta = {theta}, q = {_fmt(q)}",))
    if source.B != 1.0:
        raise HypothesisError("limiting-case sharp spaces are constructed on (0, 1)")
    notes = []
    if case == "left":
        if p != p1:
            raise HypothesisError(f"left case needs source p = p1 = {_fmt(p1)}")
        if not (1 < r <= s):
            raise HypothesisError("left-case target needs 1 < r <= s <= inf")
        rp = rational(conjugate(float(r))) if r != math.inf else Fraction(1)
        hyp = _integral_verdict(a, -float(rp), method)
        _require(hyp, "finite", "int_0^1 t^-1 a^(-r') dt")
        big = _at_power(LogIntegral(a, -float(rp), "inner"), m)
        exact = _prod(_pw(_at_power(a, m), -rp * _inv(s)), _pw(big, -_inv(rp) - _inv(s)))
        sharp = _LIMIT_NOTE.format(ratio="lambda_*/beta_*",
                                   when=" (needed when s < inf)" if s != math.inf else "")
        return _finish(exact, q1, s, "left endpoint sharp target beta", sharp, hyp, notes)
    if case != "right":
        raise HypothesisError("sharp spaces are constructed for interior, left and right cases")
    if p != p2:
        raise HypothesisError(f"right case needs source p = p2 = {_fmt(p2)}")
    if p2 == math.inf:
        if not (r == math.inf and s == math.inf):
            raise HypothesisError("p2 = inf: a sharp target is only available for r = s = inf")
        a = _monotone_weight(a, r, (0.0, 1.0), notes)
    elif not (1 < r <= s):
        raise HypothesisError("right-case target needs 1 < r <= s <= inf")
    rp = rational(conjugate(float(r))) if r != math.inf else Fraction(1)
    hyp = _integral_verdict(a, -float(rp), method)
    _require(hyp, "infinite", "int_0^1 t^-1 a^(-r') dt")
    big = _at_power(LogIntegral(a, -float(rp), "outer"), m)
    exact = _prod(_pw(_at_power(a, m), -rp * _inv(s)), _pw(big, -_inv(rp) - _inv(s)))
    sharp = _LIMIT_NOTE.format(ratio="lambda_*/beta_*",
                               when=" (needed when s < inf)" if s != math.inf else "")
    return _finish(exact, q2, s, "right endpoint sharp target beta", sharp, hyp, notes)


def optimal_source(case: str, target: LKSpaceSpec, profile: OperatorProfile,
                   r=None, method: str = "auto") -> OptimalSpace:
    """Largest LK source for ``target`` in the given case.

    ``r`` is the second index of the source (defaults to ``s``).
    """
    p1, q1, p2, q2 = _seg(profile)
    m = _slope(profile)
    q, s, b = rational(target.p), rational(target.r), target.a
    r = s if r is None else rational(r)
    if case == "interior":
        theta = _theta_from(q, q1, q2)
        if not 0 < theta < 1:
            raise HypothesisError("target q is not an interior point of the segment")
        p, _ = interior_exponents(profile, theta)
        bs = b_star(b, m)
        sym = to_symbol(bs, Side.ZERO)
        return OptimalSpace(LKSpaceSpec(float(p), float(s), bs, target.B), bs,
                            None if isinstance(sym, NotRepresentable) else sym,
                            "interior point: L_{p,s;b_*} -> L_{q,s;b} is optimal",
                            "optimal in the LK scale (both target and source)",
                            notes=(f"theta = {theta}, p = {_fmt(p)}",))
    if target.B != 1.0:
        raise HypothesisError("limiting-case sharp spaces are constructed on (0, 1)")
    bs = b_star(b, m)
    notes = []
    if case == "left":
        if q != q1:
            raise HypothesisError(f"left case needs target q = q1 = {_fmt(q1)}")
        if not (1 <= r <= s < math.inf):
            raise HypothesisError("left-case source needs 1 <= r <= s < inf")
        hyp = _integral_verdict(bs, float(s), method)
        _require(hyp, "infinite", "int_0^1 t^-1 b_*^s dt")
        rp = math.inf if r == 1 else rational(conjugate(float(r)))
        exact = _prod(_pw(bs, -s * _inv(rp)), _pw(LogIntegral(bs, float(s), "outer"),
                                                  _inv(rp) + _inv(s)))
        sharp = _LIMIT_NOTE.format(ratio="alpha/lambda",
                                   when=" (needed when r > 1)" if r > 1 else "")
        return _finish(exact, p1, r, "left endpoint sharp source alpha", sharp, hyp, notes)
    if case != "right":
        raise HypothesisError("sharp spaces are constructed for interior, left and right cases")
    if q != q2:
        raise HypothesisError(f"right case needs target q = q2 = {_fmt(q2)}")
    if p2 == math.inf:
        if not (r == 1 and s == 1):
            raise HypothesisError("p2 = inf: a sharp source is only available for r = s = 1")
    elif not (1 <= r <= s < math.inf):
        raise HypothesisError("right-case source needs 1 <= r <= s < inf")
    hyp = _integral_verdict(bs, float(s), method)
    _require(hyp, "finite", "int_0^1 t^-1 b_*^s dt")
    rp = math.inf if r == 1 else rational(conjugate(float(r)))
    exact = _prod(_pw(bs, -s * _inv(rp)), _pw(LogIntegral(bs, float(s), "inner"),
                                              _inv(rp) + _inv(s)))
    sharp = _LIMIT_NOTE.format(ratio="alpha/lambda", when=" (needed when r > 1)" if r > 1 else "")
    return _finish(exact, p2, r, "right endpoint sharp source alpha", sharp, hyp, notes)


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class CatalogRow:
    """One known boundedness result, as a machine-checkable query."""

    group: str
    label: str
    query: InterpolationQuery
    expected: str = "yes"
    note: str = ""


@dataclass(frozen=True)
class Catalog:
    profiles: Dict[str, OperatorProfile]
    rows: Tuple[CatalogRow, ...]
    errata: Tuple[CatalogRow, ...]


def ell(*exps) -> str:
    """``l1^e1 * l2^e2 * ...`` as grammar text (``"1"`` when all vanish)."""
    parts = [f"l{i + 1}^{float(e)!r}" for i, e in enumerate(exps) if e != 0]
    return " * ".join(parts) if parts else "1"


def _inv_f(x) -> float:
    return 0.0 if x == math.inf else 1.0 / x


def _conj_inv(r) -> float:
    """``1/r'``."""
    return 1.0 - _inv_f(r)


def _lk(p, r, a="1", B=1.0) -> LKSpaceSpec:
    return LKSpaceSpec(p, r, a, B)


def _pair(mode, p1, r1, a1, p2, r2, a2) -> SumSpaceSpec:
    return SumSpaceSpec(p1, r1, p2, r2, a1, mode, a2)


def _name(x) -> str:
    return "inf" if x == math.inf else f"{x:g}"


def _text(sp: Space) -> str:
    if isinstance(sp, LKSpaceSpec):
        return f"L_{{{_name(sp.p)},{_name(sp.r)};{to_text(sp.a)}}}"
    op = " + " if sp.mode == "sum" else " cap "
    return (f"L_{{{_name(sp.p1)},{_name(sp.r1)};{to_text(sp.a)}}}{op}"
            f"L_{{{_name(sp.p2)},{_name(sp.r2)};{to_text(sp.a2)}}}")


def _row(group, key, case, src, tgt, profile, expected="yes", note="", theta=None):
    q = InterpolationQuery(profile, case, src, tgt, theta)
    return CatalogRow(group, f"{key}: {_text(src)} -> {_text(tgt)}", q, expected, note)


def _finite_measure_rows(alpha: float = 0.5):
    rows, errata = [], []
    for key in ("M", "C"):
        prof = PROFILES[key]
        g = "maximal operator and conjugate function, finite measure"
        for p, s, b in ((2, 2, "1"), (3, 1, "l1^-1 * l2^2"), (1.5, math.inf, "l1^0.5")):
            rows.append(_row(g, key, "interior", _lk(p, s, b), _lk(p, s, b), prof))
        for b in ("1", "l1^0.5"):
            rows.append(_row(g, key, "left", _lk(1, 1, b), _lk(1, math.inf, b), prof))
        for r, s in ((1, 1), (2, 3), (1, math.inf), (math.inf, math.inf)):
            ir, js = _conj_inv(r), _inv_f(s)
            src = _lk(1, r, ell(ir, ir, ir + alpha))
            tgt = _lk(1, s, ell(-js, -js, -js + alpha))
            rows.append(_row(g, key, "left", src, tgt, prof))
        # corollary rows
        rows.append(_row(g, key, "left", _lk(1, 1, "l1"), _lk(1, 1, "1"), prof))
        rows.append(_row(g, key, "left", _lk(1, 1, "l3"), _lk(1, 1, ell(-1, -1)), prof))
        rows.append(_row(g, key, "left", _lk(1, math.inf, ell(1, 1, 1 + alpha)),
                         _lk(1, math.inf, ell(0, 0, alpha)), prof,
                         note="corrected: the printed target has second index 1"))
        errata.append(_row(g, key, "left", _lk(1, math.inf, ell(1, 1, 1 + alpha)),
                           _lk(1, 1, ell(0, 0, alpha)), prof, expected="no",
                           note="f* = 1/(t l1 l2 l3^(1+alpha)) lies in the source while "
                                "(Mf)* ~ t^-1 l3^-alpha has infinite target norm"))
    g = "maximal operator and conjugate function, finite measure"
    rows.append(_row(g, "M", "right", _lk(math.inf, math.inf), _lk(math.inf, math.inf),
                     PROFILES["M"]))
    C = PROFILES["C"]
    rows.append(_row(g, "C", "right", _lk(math.inf, math.inf),
                     _lk(math.inf, math.inf, "l1^-1"), C))
    rows.append(_row(g, "C", "right", _lk(math.inf, 1, ell(-1, -1, -1 - alpha)),
                     _lk(math.inf, 1, ell(-2, -1, -1 - alpha)), C,
                     note="corrected: the printed target l3^-alpha is replaced by the sharp "
                          "l1^-2 l2^-1 l3^(-1-alpha)"))
    rows.append(_row(g, "C", "right", _lk(math.inf, math.inf, "exp(-1*l1^0.5)"),
                     _lk(math.inf, math.inf, "exp(-1*l1^0.5) * l1^-0.5"), C,
                     note="exponential weight: decided on the numeric engine"))
    errata.append(_row(g, "C", "right", _lk(math.inf, 1, ell(-1, -1, -1 - alpha)),
                       _lk(math.inf, 1, ell(0, 0, -alpha)), C, expected="no",
                       note="f = indicator of a set lies in the source while (Cf)* ~ l1 "
                            "has infinite target norm"))
    return rows, errata


def _riesz_rows(n: int = 3, gamma: float = 1.0, alpha: float = 0.5, beta: float = 0.5):
    prof = riesz_potential_profile(n, gamma)
    key = f"I_{gamma:g} (n={n})"
    g = "Riesz potential"
    G = n / (n - gamma)  # Gamma
    Gp = n / gamma       # Gamma'
    inf = math.inf
    B = inf
    rows = []
    # interior: 1/p = 1/q + gamma/n
    for p, s, b in ((1.2, 2, "1"), (2, inf, "l1^-1 * l2")):
        q = 1.0 / (1.0 / p - gamma / n)
        rows.append(_row(g, key, "interior", _lk(p, s, b, B), _lk(q, s, b, B), prof))
    rows.append(_row(g, key, "sum", _pair("sum", 1, 1, "1", Gp, 1, "1"),
                     _pair("sum", G, inf, "1", inf, inf, "1"), prof))
    rows.append(_row(g, key, "intersection", _pair("intersection", 1, 1, "1", Gp, 1, "1"),
                     _pair("intersection", G, inf, "1", inf, inf, "1"), prof))
    for r1, s1, r2, s2 in ((1, 1, 1, 1), (2, 3, 1, inf), (1, inf, 2, 2)):
        i1, i2, j1, j2 = _conj_inv(r1), _conj_inv(r2), _inv_f(s1), _inv_f(s2)
        rows.append(_row(g, key, "sum",
                         _pair("sum", 1, r1, ell(i1, i1 + alpha), Gp, r2, ell(i2, i2 + beta)),
                         _pair("sum", G, s1, ell(-j1, -j1 + alpha), inf, s2, ell(-j2, -j2 + beta)),
                         prof))
        rows.append(_row(g, key, "intersection",
                         _pair("intersection", 1, r1, ell(i1, i1 - alpha), Gp, r2,
                               ell(i2, i2 - beta)),
                         _pair("intersection", G, s1, ell(-j1, -j1 - alpha), inf, s2,
                               ell(-j2, -j2 - beta)), prof))
    iG, iGp = 1.0 / G, 1.0 / Gp
    cor = (
        ("sum", (1, 1, ell(1, 0), Gp, Gp, ell(1, 0)), (G, G, ell(iGp, 0), inf, inf, ell(iGp, 0))),
        ("sum", (1, 1, ell(iG, 0), Gp, Gp, ell(1, 0)), (G, G, "1", inf, Gp, "1")),
        ("intersection", (1, 1, ell(-1, 0), Gp, Gp, ell(iG, 0)),
         (G, inf, ell(-1, 0), inf, inf, ell(0, -iG))),
        ("sum", (1, 1, ell(0, iG), Gp, Gp, ell(iG, 1)),
         (G, G, ell(-iG, 0), inf, inf, ell(0, iGp))),
        ("intersection", (1, 1, ell(0, -iGp), Gp, Gp, ell(iG, 0)),
         (G, G, ell(-iG, -1), inf, inf, ell(0, -iG))),
    )
    for mode, sa, ta in cor:
        rows.append(_row(g, key, mode, _pair(mode, *sa), _pair(mode, *ta), prof))
    return rows


def _hilbert_rows(alpha: float = 0.5):
    inf = math.inf
    rows = []
    for key in ("H", "R"):
        prof = PROFILES[key]
        g = "Hilbert transform and Riesz transforms"
        for p, s, b in ((2, 2, "1"), (4, 1, "l1 * l2^-1")):
            rows.append(_row(g, key, "interior", _lk(p, s, b, inf), _lk(p, s, b, inf), prof))
        table = (
            ("sum", (1, 1, "1", inf, 1, "1"), (1, inf, "1", inf, inf, "1"), ""),
            ("sum", (1, 1, ell(1, 0), inf, 1, "1"), (1, 1, "1", inf, inf, "1"), ""),
            ("sum", (1, 1, ell(1, 0), inf, 1, ell(1, 0)), (1, 1, "1", inf, 1, "1"), ""),
            ("sum", (1, 1, ell(0, 1), inf, 1, ell(0, 1)),
             (1, 1, ell(-1, 0), inf, 1, ell(-1, 0)), ""),
            ("intersection", (1, 1, ell(1, 0), inf, 1, ell(0, -alpha)),
             (1, 1, "1", inf, 1, ell(-1, -1 - alpha)),
             "vacuous: the L_{inf,1} component sits near 0 with a weight that makes it {0}"),
            ("sum", (1, 1, ell(1, 0), inf, inf, ell(1, 1 + alpha)),
             (1, 1, "1", inf, inf, ell(0, alpha)), ""),
            ("intersection", (1, 1, "1", inf, inf, "1"),
             (1, inf, "1", inf, inf, ell(-1, 0)), ""),
            ("intersection", (1, 1, "1", inf, inf, ell(1, 0)),
             (1, inf, "1", inf, inf, ell(0, -1)),
             "vacuous: the L_{inf,inf} component sits near 0 with a weight that makes it {0}"),
        )
        for mode, sa, ta, note in table:
            rows.append(_row(g, key, mode, _pair(mode, *sa), _pair(mode, *ta), prof, note=note))
    return rows


def catalog() -> Catalog:
    """Operator profiles plus every known boundedness row as a query.

    ``rows`` are expected to come out bounded.  ``errata`` holds printed
    variants of two rows that are false as stated; they are expected to
    come out ``no`` and carry the counterexample in their note.
    """
    fm_rows, errata = _finite_measure_rows()
    rows = fm_rows + _riesz_rows() + _hilbert_rows()
    profiles = dict(PROFILES)
    profiles["I"] = riesz_potential_profile(3, 1.0)
    return Catalog(profiles, tuple(rows), tuple(errata))
