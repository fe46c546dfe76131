"""Empirical checks of the weighted Hardy inequalities behind the criteria.

Every inequality handled here has the form

    || t^alpha b(t) H g(t) ||_{s, dt/t}  <=  C || t^beta a(t) g(t) ||_{r, dt/t}

where ``H g(t)`` integrates ``u^kappa g(u) du/u`` over ``(A, t)`` (lower)
or ``(t, B)`` (upper), possibly restricted to non-increasing ``g``.
Inequalities are grouped by the functional that characterizes them:

* ``N``: power-tilted inequalities, tilt ``mu``, monotone exponent ``nu``;
* ``L``: the lower inequality without tilt;
* ``R``: the upper inequality without tilt;
* ``Rinf``: the upper inequality on non-increasing functions, together
  with divergence of ``||t^(-1/r) a||_r`` at infinity when ``B = inf``.

``estimate_best_constant`` sweeps a test family over growing support
depths and records the largest ratio at each depth.  Functions live on a
midpoint mesh in ``y = |log t|`` and every quantity is kept as a
logarithm, so supports may reach ``y`` around ``1e300``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from .asymcalc import Side, Tag, ell, ell_log
from .functionals import FinVerdict, FunctionalSpec, conjugate, evaluate
from .interpengine import weight_norm
from .quadnum import parse_interval
from .svfunc import NotRepresentable, RunningSup, as_expr, log_eval, to_symbol, to_text

LEMMAS = ("N", "L", "R", "Rinf")
CONDITIONS = {
    "N": ("lower-general", "lower-monotone", "upper-general", "upper-monotone"),
    "L": ("lower-general", "lower-monotone"),
    "R": ("upper-general", "upper-monotone"),
    "Rinf": ("upper-monotone",),
}
FAMILIES = ("hardy-extremal", "monotone-steps", "tilted-symbol", "bump", "zero")
DEFAULT_SIZES = tuple(2 ** k for k in range(6, 15))

STABLE_STEP = 1.05
GROWTH_FACTOR = 2.0

_PER_OCTAVE = 16
_TOP = 996  # log2 of the last mesh edge in y
_FAR_TOP = 1e9  # log y where the tail beyond the mesh is cut
_LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# inequality specs


@dataclass(frozen=True)
class HardySpec:
    """One inequality: a condition of one lemma with its parameters."""

    lemma: str
    condition: str
    r: float
    s: float
    a: object = 1.0
    b: object = 1.0
    interval: Tuple[float, float] = (0.0, 1.0)
    mu: float = 0.0
    nu: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.lemma not in LEMMAS:
            raise ValueError(f"lemma must be one of {LEMMAS}")
        if self.condition not in CONDITIONS[self.lemma]:
            raise ValueError(f"condition of {self.lemma} must be one of "
                             f"{CONDITIONS[self.lemma]}")
        for name in ("r", "s"):
            v = float(getattr(self, name))
            if not v >= 1:
                raise ValueError(f"{name} must lie in [1, inf]")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "a", as_expr(self.a))
        object.__setattr__(self, "b", as_expr(self.b))
        iv = parse_interval(self.interval)
        if iv not in ((0.0, 1.0), (1.0, math.inf)):
            raise ValueError("interval must be (0,1) or (1,inf)")
        object.__setattr__(self, "interval", iv)
        mu, nu, kappa = (float(v) for v in (self.mu, self.nu, self.kappa))
        if self.lemma == "N" and not nu > mu > 0:
            raise ValueError("N-type inequalities need nu > mu > 0")
        if self.lemma in ("L", "R"):
            if mu != 0:
                raise ValueError(f"{self.lemma}-type inequalities have no tilt (mu = 0)")
            if not nu > 0:
                raise ValueError(f"{self.lemma}-type inequalities need nu > 0")
        if self.lemma == "Rinf":
            mu, nu, kappa = 0.0, 0.0, 0.0
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "kappa", kappa)

    @property
    def side(self) -> Side:
        return Side.ZERO if self.interval[0] == 0 else Side.INF

    @property
    def direction(self) -> str:
        return self.condition.split("-")[0]

    @property
    def monotone(self) -> bool:
        return self.condition.endswith("monotone")

    @property
    def exponents(self) -> Tuple[float, float, float]:
        """``(alpha, beta, kappa)`` of the inequality."""
        if self.lemma == "Rinf":
            return 0.0, 0.0, 0.0
        tilt = -self.mu if self.direction == "lower" else self.mu
        k = self.nu if self.monotone else self.kappa
        return tilt, tilt + k, k

    @property
    def toward(self) -> bool:
        """The inner integral runs from ``y`` toward the far end of the mesh."""
        return (self.direction == "lower") == (self.side is Side.ZERO)

    def to_dict(self) -> dict:
        return {"lemma": self.lemma, "condition": self.condition, "r": _num(self.r),
                "s": _num(self.s), "a": to_text(self.a), "b": to_text(self.b),
                "interval": [_num(v) for v in self.interval], "mu": self.mu,
                "nu": self.nu, "kappa": self.kappa}


@dataclass(frozen=True)
class TestFamily:
    """Test functions for ``estimate_best_constant``.

    ``size`` is the number of random members per depth (random kinds
    only) and ``scale`` multiplies every member.
    """

    __test__ = False  # not a pytest class

    kind: str
    seed: int = 0
    size: int = 8
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValueError(f"family kind must be one of {FAMILIES}")
        if self.size < 1:
            raise ValueError("family size must be positive")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("scale must be positive and finite")


def _num(v):
    return "inf" if math.isinf(v) else v


# ---------------------------------------------------------------------------
# mesh in y


class _Line:
    """Midpoint mesh in ``y`` with weights and the weights ``a``, ``b``."""

    def __init__(self, spec: HardySpec, depth: float):
        rates = [abs(v) for v in spec.exponents if v != 0]
        if rates:
            step = 2.0 ** -math.ceil(math.log2(4 * max(rates)))
            top = depth + 64.0 / min(rates)
            n = int(math.ceil(top / step))
            uni = np.arange(n + 1) * step
            k0 = int(math.floor(math.log2(uni[-1]) * _PER_OCTAVE)) + 1
            geo = 2.0 ** (np.arange(k0, _TOP * _PER_OCTAVE + 1) / _PER_OCTAVE)
            edges = np.concatenate([uni, geo])
        else:
            step = None
            lo = np.arange(0, _PER_OCTAVE) / _PER_OCTAVE
            geo = 2.0 ** (np.arange(0, _TOP * _PER_OCTAVE + 1) / _PER_OCTAVE)
            edges = np.concatenate([lo, geo])
        self.step = step
        self.edges = edges
        self.y = 0.5 * (edges[1:] + edges[:-1])
        self.logw = np.log(np.diff(edges))
        self.sig = -1.0 if spec.side is Side.ZERO else 1.0
        with np.errstate(all="ignore"):
            self.loga = np.asarray(log_eval(spec.a, self.y, spec.side), dtype=float)
            self.logb = np.asarray(log_eval(spec.b, self.y, spec.side), dtype=float)
            # outer factor t^alpha b and its norm over every prefix and suffix
            self.outer = _clean(self.sig * spec.exponents[0] * self.y + self.logb)
            if math.isinf(spec.s):
                c = self.outer
                self.prefix = np.concatenate([[-np.inf], np.maximum.accumulate(c)])
                self.suffix = np.concatenate([np.maximum.accumulate(c[::-1])[::-1], [-np.inf]])
            else:
                c = _clean(spec.s * self.outer + self.logw)
                self.prefix = np.concatenate([[-np.inf], np.logaddexp.accumulate(c)])
                self.suffix = np.concatenate([np.logaddexp.accumulate(c[::-1])[::-1],
                                              [-np.inf]])

        # beyond the mesh: cells in u = log y, with the weights' germs
        u_edges = math.log(edges[-1]) * 2.0 ** (np.arange(
            0, int(math.log2(_FAR_TOP / math.log(edges[-1])) * _PER_OCTAVE) + 2) / _PER_OCTAVE)
        self.far_u = 0.5 * (u_edges[1:] + u_edges[:-1])
        self.far_logdy = self.far_u + np.log(np.diff(u_edges))
        self.far_loga = _far_log(spec.a, spec.side, self.far_u)
        self.far_logb = _far_log(spec.b, spec.side, self.far_u)

    def snap(self, y: float) -> float:
        i = int(np.argmin(np.abs(self.edges - y)))
        return float(self.edges[i])

    def shift(self, y: float, k: int) -> float:
        """The edge ``k`` places away from the edge nearest ``y``."""
        i = int(np.argmin(np.abs(self.edges - y))) + k
        return float(self.edges[min(max(i, 0), len(self.edges) - 1)])

    def between(self, lo: float, hi: float) -> np.ndarray:
        return (self.y > lo) & (self.y < hi)


def _far_log(expr, side: Side, u: np.ndarray) -> Optional[np.ndarray]:
    """``log expr`` at ``y = exp(u)`` from its log-power germ (None without one)."""
    sym = to_symbol(expr, side)
    if isinstance(sym, NotRepresentable) or sym.tilt:
        return None
    out = np.full(u.shape, math.log(sym.coeff))
    level = u.copy()  # log l_1 = log(1 + y) = u once y is beyond 1e300
    for e in sym.exponents:
        out = out + e * level
        level = np.log1p(level)
    return out


def _cumulate(logc: np.ndarray, forward: bool) -> np.ndarray:
    """Midpoint primitive: sum over earlier cells plus half of the own cell."""
    c = logc if forward else logc[::-1]
    with np.errstate(all="ignore"):
        acc = np.logaddexp.accumulate(c)
        excl = np.concatenate([[-np.inf], acc[:-1]])
        out = np.logaddexp(excl, c - _LOG2)
    return out if forward else out[::-1]


def _lognorm(v: np.ndarray, p: float, logw: np.ndarray) -> float:
    if math.isinf(p):
        return float(np.max(v))
    return float(logsumexp(p * v + logw) / p)


def _clean(v: np.ndarray) -> np.ndarray:
    return np.where(np.isnan(v), -np.inf, v)


def _log_sides(spec: HardySpec, line: _Line, logg: np.ndarray) -> Tuple[float, float]:
    """``(log LHS, log RHS)`` for one member given by its log-values on the mesh.

    Work is confined to the support of ``g``: outside it ``H g`` is either
    zero or the full integral, and the outer norm of ``b`` there comes from
    the prefix and suffix tables of the mesh.
    """
    live = np.flatnonzero(logg > -np.inf)
    if live.size == 0:
        return -math.inf, -math.inf
    i0, i1 = int(live[0]), int(live[-1]) + 1
    sl = slice(i0, i1)
    _, beta, kappa = spec.exponents
    y, sig, logw = line.y[sl], line.sig, line.logw[sl]
    forward = not spec.toward
    with np.errstate(all="ignore"):
        inner = _clean(sig * kappa * y + logg[sl] + logw)
        logH = _cumulate(inner, forward)
        total = float(logsumexp(inner))
        lhs = _lognorm(_clean(line.outer[sl] + logH), spec.s, logw)
        rest = line.suffix[i1] if forward else line.prefix[i0]
        if math.isinf(spec.s):
            lhs = max(lhs, rest + total)
        else:
            lhs = float(np.logaddexp(spec.s * lhs, rest + spec.s * total)) / spec.s
        rhs = _lognorm(_clean(sig * beta * y + line.loga[sl] + logg[sl]), spec.r, logw)
        if i1 == len(line.y) and line.far_loga is not None and line.far_logb is not None:
            lhs, rhs = _with_tail(spec, line, float(logg[-1]), total, lhs, rhs)
    return lhs, rhs


def _log_ratio(spec: HardySpec, line: _Line, logg: np.ndarray) -> float:
    """``log(LHS / RHS)`` with 0/0 read as 0 and x/0 as infinity."""
    lhs, rhs = _log_sides(spec, line, logg)
    if rhs == -math.inf:
        return -math.inf if lhs == -math.inf else math.inf
    if math.isinf(rhs):
        # the member lies outside the space on the right: no information
        return -math.inf
    return lhs - rhs


def _exp_rate(c: float, sig: float, u: np.ndarray) -> np.ndarray:
    """``log t^c`` at ``y = exp(u)``."""
    if c == 0:
        return np.zeros(u.shape)
    return sig * c * np.exp(u)


def _with_tail(spec: HardySpec, line: _Line, logc: float, total: float,
               lhs: float, rhs: float) -> Tuple[float, float]:
    """Add the part beyond the mesh, where the member keeps its last value.

    On ``(0,1)`` a non-increasing function cannot vanish near 0, so cutting
    it at the mesh end would leave the class being tested.
    """
    alpha, beta, kappa = spec.exponents
    sig, u = line.sig, line.far_u
    with np.errstate(all="ignore"):
        far = _clean(_exp_rate(beta, sig, u) + line.far_loga + logc)
        if math.isinf(spec.r):
            rhs = max(rhs, float(np.max(far)))
        else:
            rhs = float(np.logaddexp(spec.r * rhs, logsumexp(spec.r * far + line.far_logdy))
                        ) / spec.r
        if spec.toward:
            # H integrates over (y, far end): infinite unless t^kappa decays
            if sig * kappa >= 0:
                return math.inf, rhs
            return lhs, rhs
        if kappa == 0:
            # H(y) = H(mesh end) + c (y - mesh end)
            u0 = math.log(line.edges[-1])
            logH = np.logaddexp(total, logc + u + np.log1p(-np.exp(u0 - u)))
        elif sig * kappa < 0:
            logH = np.full(u.shape, total)
        else:
            logH = np.full(u.shape, np.inf)
        out = _clean(_exp_rate(alpha, sig, u) + line.far_logb + logH)
        if math.isinf(spec.s):
            lhs = max(lhs, float(np.max(out)))
        else:
            lhs = float(np.logaddexp(spec.s * lhs, logsumexp(spec.s * out + line.far_logdy))
                        ) / spec.s
    return lhs, rhs


def _certify_monotone(spec: HardySpec, logg: np.ndarray) -> None:
    """Non-increasing in ``t`` means non-decreasing in ``y`` on ``(0,1)``."""
    v = logg if spec.side is Side.ZERO else logg[::-1]
    with np.errstate(invalid="ignore"):
        tol = 1e-9 * np.maximum(1.0, np.abs(v[:-1]))
        ok = not np.any(np.isnan(v)) and bool(np.all(v[1:] >= v[:-1] - tol))
    if not ok:
        raise AssertionError("monotone family produced a non-monotone member")


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class _Member:
    label: str
    first: int  # index of the first size the member counts for
    last: int  # index of the last one
    logg: np.ndarray


def _breakpoints(sizes: Sequence[float]) -> np.ndarray:
    """Quarter octaves in ``y`` up to ``2^16``, then quarter octaves in ``log y``."""
    top = math.log2(max(sizes))
    near = np.arange(-12, int(math.floor(4 * min(top, 16.0))) + 1) / 4
    far = 16.0 * 2.0 ** (np.arange(1, int(math.floor(8 * math.log2(max(top, 16.0) / 16))) + 1)
                         / 8)
    logs = np.union1d(np.concatenate([near, far]), np.log2(np.asarray(sizes, dtype=float)))
    return 2.0 ** logs[logs <= top]


def _first_size(sizes: Sequence[float], depth: float) -> Optional[int]:
    for i, D in enumerate(sizes):
        if depth <= D * (1 + 1e-12):
            return i
    return None


def _extremal_density(spec: HardySpec, line: _Line, lo: float, hi: float,
                      kappa: float) -> np.ndarray:
    """``u^-kappa U^-r'`` on ``(lo, hi)`` with ``U = t^(beta-kappa) a``."""
    alpha, beta, _ = spec.exponents
    logU = line.sig * (beta - spec.exponents[2]) * line.y + line.loga
    rp = conjugate(spec.r)
    power = 1.0 if spec.r == 1 else (1.0 if math.isinf(spec.r) else rp)
    out = np.full(line.y.shape, -np.inf)
    m = line.between(lo, hi)
    out[m] = -power * logU[m] - line.sig * kappa * line.y[m]
    return _clean(out)


def _regions(spec: HardySpec, line: _Line, x: float) -> Tuple[float, float, float]:
    """Support ``(lo, hi)`` of the extremal at breakpoint ``x`` and its depth."""
    if spec.r == 1:
        # a unit cell in y, but never thinner than one mesh cell
        if spec.toward:
            lo, hi = x, max(line.snap(x + 1.0), line.shift(x, 1))
        else:
            lo, hi = min(line.snap(x - 1.0), line.shift(x, -1)), x
    elif spec.toward:
        lo, hi = x, line.snap(2 * x + 1.0)
    else:
        lo, hi = 0.0, x
    return lo, hi, hi


def _general_extremals(spec, line, sizes) -> Iterator[_Member]:
    kappa = spec.exponents[2]
    for x in _breakpoints(sizes):
        x = line.snap(x)
        lo, hi, depth = _regions(spec, line, x)
        i = _first_size(sizes, depth)
        if i is None or hi <= lo:
            continue
        yield _Member(f"extremal@{x:.6g}", i, len(sizes) - 1,
                      _extremal_density(spec, line, lo, hi, kappa))


def _from_b(spec: HardySpec, line: _Line, logh: np.ndarray) -> np.ndarray:
    """``f(t) = int_t^B h(u) du/u``, a non-increasing function."""
    return _cumulate(_clean(logh + line.logw), forward=spec.side is Side.ZERO)


def _monotone_extremals(spec, line, sizes) -> Iterator[_Member]:
    kappa = spec.exponents[2]
    last = len(sizes) - 1
    zero = spec.side is Side.ZERO
    for x in _breakpoints(sizes):
        x = line.snap(x)
        lo, hi, depth = _regions(spec, line, x)
        i = _first_size(sizes, depth)
        if i is not None and hi > lo:
            # transform of a general extremal with one more power of u
            psi = _extremal_density(spec, line, lo, hi, kappa + 1)
            h = _clean(psi + line.sig * line.y)
            yield _Member(f"transform@{x:.6g}", i, last, _from_b(spec, line, h))
        i = _first_size(sizes, x)
        if i is None:
            continue
        level = np.where(line.y > x if zero else line.y < x, 0.0, -np.inf)
        yield _Member(f"level@{x:.6g}", i, last, level)
        # on (1,inf) this member reaches the end of the mesh, so only (0,1)
        if zero and spec.direction == "upper" and kappa == 0 and 1 < spec.r < math.inf:
            yield _Member(f"potential@{x:.6g}", i, last, _potential_member(spec, line, x))
    if math.isinf(spec.r):
        env = log_eval(RunningSup(spec.a), line.y, spec.side) if zero else None
        if env is None:
            # sup of a over (1, t): running max from y = 0 upward
            env = np.maximum.accumulate(line.loga)
        yield _Member("inverse-sup", 0, last, _clean(-np.asarray(env, dtype=float)))


def _potential_member(spec: HardySpec, line: _Line, x: float) -> np.ndarray:
    """``int_{max(t,x)}^B a^r V^-r' |log(u/x)|^(r'-1) du/u``, V the potential of a^r."""
    r, rp = spec.r, conjugate(spec.r)
    zero = spec.side is Side.ZERO
    ar = r * line.loga
    # V(u) = int_A^u a^r: A is the far end on (0,1), the near end on (1,inf)
    logV = _cumulate(_clean(ar + line.logw), forward=not zero)
    with np.errstate(all="ignore"):
        dens = ar - rp * logV + (rp - 1) * np.log(np.abs(line.y - x))
    mask = line.y < x if zero else line.y > x
    dens = np.where(mask, _clean(dens), -np.inf)
    return _from_b(spec, line, dens)


def _bumps(spec, line, sizes) -> Iterator[_Member]:
    zero = spec.side is Side.ZERO
    for x in _breakpoints(sizes):
        x = line.snap(x)
        if zero:
            lo, hi = min(line.snap(x - _LOG2), line.shift(x, -1)), x
        else:
            lo, hi = x, max(line.snap(x + _LOG2), line.shift(x, 1))
        i = _first_size(sizes, hi)
        if i is None or hi <= lo:
            continue
        yield _Member(f"bump@{x:.6g}", i, len(sizes) - 1,
                      np.where(line.between(lo, hi), 0.0, -np.inf))


def _random_members(spec, line, sizes, family) -> Iterator[_Member]:
    zero = spec.side is Side.ZERO
    for k, D in enumerate(sizes):
        for j in range(family.size):
            rng = np.random.default_rng([family.seed, k * family.size + j])
            if family.kind == "monotone-steps":
                yield _Member(f"steps#{k}.{j}", k, k, _steps(line, D, rng, zero))
            else:
                yield _Member(f"tilted#{k}.{j}", k, k,
                              _tilted(spec, line, D, rng, zero))


def _steps(line: _Line, D: float, rng, zero: bool) -> np.ndarray:
    n = int(rng.integers(1, 9))
    cuts = np.sort(np.exp(rng.uniform(math.log(0.125), math.log(D), n)))
    heights = np.sort(rng.normal(0.0, 2.0, n + 1))  # increasing log heights
    idx = np.searchsorted(cuts, line.y)
    if zero:
        # non-decreasing in y, constant beyond the last cut
        return heights[idx]
    # non-increasing in y, zero beyond D
    out = heights[::-1][idx]
    return np.where(line.y < D, out, -np.inf)


def _tilted(spec: HardySpec, line: _Line, D: float, rng, zero: bool) -> np.ndarray:
    eps = rng.uniform(-0.1, 0.1)
    c1, c2 = rng.uniform(-2.0, 2.0, 2)
    lg = ell_log(line.y, 2)
    v = -line.sig * eps * line.y + c1 * lg[0] + c2 * lg[1]
    inside = line.y < D
    if not spec.monotone:
        return np.where(inside, v, -np.inf)
    if zero:
        v = np.maximum.accumulate(np.where(inside, v, -np.inf))
        return v
    v = np.where(inside, v, -np.inf)
    return np.maximum.accumulate(v[::-1])[::-1]


def _members(spec: HardySpec, line: _Line, family: TestFamily,
             sizes: Sequence[float]) -> Iterator[_Member]:
    if family.kind == "zero":
        yield _Member("zero", 0, len(sizes) - 1, np.full(line.y.shape, -np.inf))
    elif family.kind == "bump":
        if spec.monotone:
            raise ValueError("bump families are not monotone; use them for general conditions")
        yield from _bumps(spec, line, sizes)
    elif family.kind == "hardy-extremal":
        if spec.monotone:
            yield from _monotone_extremals(spec, line, sizes)
        else:
            yield from _general_extremals(spec, line, sizes)
    else:
        yield from _random_members(spec, line, sizes, family)


# ---------------------------------------------------------------------------
# best constants


def classify(values: Sequence[float]) -> str:
    """``stable``, ``growing`` or ``inconclusive`` for a constant sequence.

    Growing: some constant is at least twice an earlier one, or one is
    infinite.  Stable: otherwise, when every consecutive ratio stays
    below 1.05.
    """
    v = np.asarray(values, dtype=float)
    if np.any(np.isinf(v)):
        return "growing"
    if np.all(v == 0):
        return "stable"
    floor = np.minimum.accumulate(np.where(v > 0, v, np.inf))
    if np.any(v[1:] >= GROWTH_FACTOR * floor[:-1]):
        return "growing"
    prev, nxt = v[:-1], v[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        steps = np.where(prev > 0, nxt / prev, np.where(nxt > 0, np.inf, 1.0))
    return "stable" if np.all(steps < STABLE_STEP) else "inconclusive"


@dataclass(frozen=True)
class ConstantSequence:
    """Largest ratio over the family at each support depth."""

    spec: HardySpec
    family: TestFamily
    sizes: Tuple[float, ...]
    log_values: Tuple[float, ...]
    members: Tuple[str, ...]

    @property
    def values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(np.asarray(self.log_values, dtype=float))

    @property
    def classification(self) -> str:
        return classify(self.values)

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "family": self.family.kind,
                "seed": self.family.seed, "scale": self.family.scale,
                "classification": self.classification,
                "sizes": list(self.sizes),
                "log_constants": [_num(v) if math.isinf(v) else v for v in self.log_values],
                "members": list(self.members)}

    def rows(self) -> List[list]:
        return [[D, math.log2(D), float(c), lc, m]
                for D, c, lc, m in zip(self.sizes, self.values, self.log_values, self.members)]


def estimate_best_constant(spec: HardySpec, family: TestFamily,
                           sizes: Optional[Sequence[float]] = None) -> ConstantSequence:
    """``C_k = max LHS/RHS`` over family members supported within depth ``sizes[k]``.

    Parameters
    ----------
    spec : HardySpec
    family : TestFamily
    sizes : sequence of float, optional
        Increasing support depths in ``y = |log t|`` (default ``2^6 .. 2^14``).
    """
    sizes = tuple(float(v) for v in (sizes or DEFAULT_SIZES))
    if any(b <= a for a, b in zip(sizes, sizes[1:])) or sizes[0] <= 0:
        raise ValueError("sizes must be positive and increasing")
    if spec.monotone and family.kind == "bump":
        raise ValueError("bump families are not monotone; use them for general conditions")
    line = _Line(spec, sizes[-1])
    shift = math.log(family.scale)
    best = [-math.inf] * len(sizes)
    who = ["none"] * len(sizes)
    for m in _members(spec, line, family, sizes):
        if spec.monotone:
            _certify_monotone(spec, m.logg)
        lr = _log_ratio(spec, line, m.logg + shift)
        for k in range(m.first, m.last + 1):
            if lr > best[k]:
                best[k], who[k] = lr, m.label
    # a member allowed at one depth is allowed at every larger depth
    for k in range(1, len(sizes)):
        if family.kind in ("monotone-steps", "tilted-symbol"):
            break
        if best[k - 1] > best[k]:
            best[k], who[k] = best[k - 1], who[k - 1]
    return ConstantSequence(spec, family, sizes, tuple(best), tuple(who))


# ---------------------------------------------------------------------------
# equivalence reports


@dataclass(frozen=True)
class ConditionRow:
    condition: str
    expected: str  # bounded / unbounded / inconclusive
    observed: str  # stable / growing / inconclusive
    agreement: Optional[bool]
    sequence: Optional[ConstantSequence]

    def to_dict(self) -> dict:
        return {"condition": self.condition, "expected": self.expected,
                "observed": self.observed, "agreement": self.agreement,
                "log_constants": (None if self.sequence is None else
                                  self.sequence.to_dict()["log_constants"])}


@dataclass(frozen=True)
class EquivalenceReport:
    lemma: str
    params: dict
    seed: int
    functional: FinVerdict
    divergence_condition: Optional[FinVerdict]
    rows: Tuple[ConditionRow, ...]
    notes: Tuple[str, ...] = ()

    @property
    def expected(self) -> str:
        return self.rows[0].expected if self.rows else "inconclusive"

    @property
    def agree(self) -> bool:
        return all(r.agreement is True for r in self.rows)

    def to_dict(self) -> dict:
        d = {"lemma": self.lemma, "params": self.params, "seed": self.seed,
             "functional": self.functional.to_dict(),
             "rows": [r.to_dict() for r in self.rows], "agree": self.agree,
             "notes": list(self.notes)}
        if self.divergence_condition is not None:
            d["divergence_condition"] = self.divergence_condition.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["condition", "size", "log2_size", "constant", "log_constant", "member"])
        for row in self.rows:
            if row.sequence is not None:
                for rec in row.sequence.rows():
                    w.writerow([row.condition] + [repr(v) if isinstance(v, float) else v
                                                  for v in rec])
        return buf.getvalue()


def _params(lemma: str, params: dict) -> dict:
    p = dict(params)
    p.setdefault("a", 1.0)
    p.setdefault("b", 1.0)
    p.setdefault("interval", (0.0, 1.0))
    if lemma != "Rinf":
        p.setdefault("nu", 1.0)
        p.setdefault("kappa", 1.0)
    unknown = set(p) - {"r", "s", "a", "b", "interval", "mu", "nu", "kappa"}
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)}")
    if "r" not in p or "s" not in p:
        raise ValueError("parameters r and s are required")
    return p


def governing_verdict(lemma: str, params: dict,
                      method: str = "auto") -> Tuple[FinVerdict, Optional[FinVerdict]]:
    """The characterizing functional and, for ``Rinf`` on ``(1,inf)``, the
    divergence condition on ``||t^(-1/r) a||_r``."""
    p = _params(lemma, params)
    spec = FunctionalSpec(lemma, p["r"], p["s"], p["a"], p["b"], p["interval"])
    v = evaluate(spec, method)
    extra = None
    if lemma == "Rinf" and math.isinf(spec.interval[1]):
        extra = weight_norm(spec.a, spec.r, Side.INF, method)
    return v, extra


def verify_equivalence(lemma: str, params: dict, seed: int = 0,
                       sizes: Optional[Sequence[float]] = None,
                       method: str = "auto") -> EquivalenceReport:
    """Classify every condition of ``lemma`` empirically and compare.

    The expected answer is ``bounded`` when the governing functional is
    Finite (and, for ``Rinf`` with ``B = inf``, ``||t^(-1/r) a||_r`` is
    infinite), ``unbounded`` when either fails, and ``inconclusive`` when
    a verdict is.  Constants come from the ``hardy-extremal`` family.
    """
    if lemma not in LEMMAS:
        raise ValueError(f"lemma must be one of {LEMMAS}")
    p = _params(lemma, params)
    v, extra = governing_verdict(lemma, p, method)
    tags = [v.tag] + ([] if extra is None else [Tag.FINITE if extra.tag is Tag.INFINITE
                                                  else Tag.INFINITE if extra.tag is Tag.FINITE
                                                  else Tag.INCONCLUSIVE])
    if Tag.INCONCLUSIVE in tags:
        expected = "inconclusive"
    elif Tag.INFINITE in tags:
        expected = "unbounded"
    else:
        expected = "bounded"
    notes = []
    if extra is not None and extra.tag is Tag.FINITE:
        notes.append("||t^(-1/r) a||_r is finite at infinity, so the inequality fails")
    rows = []
    family = TestFamily("hardy-extremal", seed)
    for cond in CONDITIONS[lemma]:
        spec = HardySpec(lemma, cond, **p)
        seq = estimate_best_constant(spec, family, sizes)
        obs = seq.classification
        if expected == "inconclusive":
            agreement = None
        elif obs == "inconclusive":
            agreement = False
        else:
            agreement = (obs == "stable") == (expected == "bounded")
        rows.append(ConditionRow(cond, expected, obs, agreement, seq))
    pub = {k: (to_text(as_expr(val)) if k in ("a", "b") else
               [_num(x) for x in parse_interval(val)] if k == "interval" else _num(float(val)))
           for k, val in p.items()}
    return EquivalenceReport(lemma, pub, seed, v, extra, tuple(rows), tuple(notes))


# ---------------------------------------------------------------------------
# curated instances


def _lp(*exps) -> str:
    parts = [f"l{i + 1}^{_exact(e)}" for i, e in enumerate(exps) if e != 0]
    return "*".join(parts) if parts else "1"


def curated_instances(lemma: str) -> List[Tuple[dict, str]]:
    """Twelve parameter sets (six bounded, six unbounded) with clean gaps.

    Each entry is ``(params, expected)``; the weights are powers of
    ``l_1`` whose decisive exponent sits 1/4 away from the critical value.
    """
    g = 0.25
    out = []
    if lemma == "N":
        base = [(2, 2, (0, 1), 0.5, 1.0), (2, 3, (0, 1), 0.25, 0.75),
                (3, 3, (1, math.inf), 0.5, 1.5), (1, 2, (1, math.inf), 0.5, 1.0),
                (2, math.inf, (0, 1), 0.5, 1.0), (math.inf, math.inf, (1, math.inf), 0.5, 1.0)]
        for r, s, iv, mu, nu in base:
            for sign, exp in ((-1, "bounded"), (1, "unbounded")):
                out.append(({"r": r, "s": s, "interval": iv, "mu": mu, "nu": nu, "kappa": nu,
                             "a": "l1^0.5", "b": _lp(0.5 + sign * g)}, exp))
        return out
    if lemma == "L":
        # exponent of b is c - 1/s - 1/r' + gap, with c r' > 1
        base = [(2, 2, 1.0), (2, 3, 1.0), (3, 4, 0.75), (1, 1, 1.0), (1, 2, 0.5),
                (2, math.inf, 1.0)]
        for r, s, c in base:
            rp = conjugate(r)
            e0 = c - _inv(s) - _inv(rp)
            for sign, exp in ((-1, "bounded"), (1, "unbounded")):
                out.append(({"r": r, "s": s, "interval": (0, 1), "a": _lp(c),
                             "b": _lp(e0 + sign * g), "nu": 1.0, "kappa": 1.0}, exp))
        return out
    if lemma == "R":
        # exponent of b is c - 1/s - 1/r' + gap, with e < -1/s and c < 1/r'
        base = [(2, 2, 0.0), (2, 3, -0.5), (3, 3, 0.25), (1, 1, -1.0), (1, 2, -0.5),
                (2, 4, 0.0)]
        for r, s, c in base:
            rp = conjugate(r)
            e0 = c - _inv(s) - _inv(rp)
            for sign, exp in ((-1, "bounded"), (1, "unbounded")):
                out.append(({"r": r, "s": s, "interval": (0, 1), "a": _lp(c),
                             "b": _lp(e0 + sign * g), "nu": 1.0, "kappa": 0.0}, exp))
        return out
    if lemma == "Rinf":
        # on (0,1): a = l1^c with c r < -1, b exponent c - 1 - 1/s + 1/r + gap
        base = [(2, 2, -1.0), (2, 3, -1.0), (3, 3, -0.5), (1, 2, -1.5)]
        for r, s, c in base:
            e0 = c - 1 - _inv(s) + _inv(r)
            for sign, exp in ((-1, "bounded"), (1, "unbounded")):
                out.append(({"r": r, "s": s, "interval": (0, 1), "a": _lp(c),
                             "b": _lp(e0 + sign * g)}, exp))
        # on (1,inf): a = l1^c with divergent ||t^(-1/r) a||_r, b exponent c - 1 + gap,
        # and one instance where that norm converges
        inf = (1, math.inf)
        out.append(({"r": 2, "s": 2, "interval": inf, "a": "l1^0.75", "b": "l1^-0.5"}, "bounded"))
        out.append(({"r": 2, "s": 3, "interval": inf, "a": "l1", "b": "l1^-0.25"}, "bounded"))
        out.append(({"r": 2, "s": 2, "interval": inf, "a": "l1^0.75", "b": "1"}, "unbounded"))
        out.append(({"r": 2, "s": 2, "interval": inf, "a": "l1^-1", "b": "l1^-3"}, "unbounded"))
        return out
    raise ValueError(f"lemma must be one of {LEMMAS}")


def _exact(x: float) -> str:
    short = f"{x:.12g}"
    return short if float(short) == x else repr(float(x))


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


# ---------------------------------------------------------------------------
# monotone restriction gap


GAP_SIZES = tuple(2.0 ** k for k in (3, 4, 6, 8, 16, 32, 64, 128, 256, 512, 930))
TRACK_POINTS = (10.0, 1e280)


@dataclass(frozen=True)
class GapWitness:
    """A general family whose constants grow beside a monotone one that stays put."""

    params: dict
    verdicts: Dict[str, FinVerdict]
    monotone: ConstantSequence
    general: ConstantSequence
    predicted: str
    predicted_ratio: float
    direct_ratio: float
    general_ratio: float
    monotone_drift: float
    bound_drift: float
    ok: bool
    notes: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"params": self.params, "verdicts": {k: v.to_dict()
                                                    for k, v in self.verdicts.items()},
                "monotone": self.monotone.to_dict(), "general": self.general.to_dict(),
                "predicted": self.predicted, "predicted_ratio": self.predicted_ratio,
                "direct_ratio": self.direct_ratio, "general_ratio": self.general_ratio,
                "monotone_drift": self.monotone_drift, "bound_drift": self.bound_drift,
                "ok": self.ok, "notes": list(self.notes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)


def gap_weights(r: float, s: float, theta: float, gamma: float) -> Tuple[str, str]:
    """Weights with ``R1 + R2`` finite and ``R`` infinite on ``(0,1)``.

    ``a = l1^(-1/r) l2^theta`` and ``b = l1^(-1 - 1/s) l2^(theta + gamma)``:
    in ``y`` the profile of ``R`` is ``||b||_{s,(Y,inf)} ||1/a||_{r',(0,Y)}``,
    about ``(Y^-1 l2^(theta+gamma)) (Y l2^-theta) = l2^gamma``.
    """
    return _lp(-1.0 / r, theta), _lp(-1.0 - 1.0 / s, theta + gamma)


def monotone_gap_witness(r: float = 2, s: float = 3, theta: float = -1, gamma: float = 0.1,
                         sizes: Optional[Sequence[float]] = None,
                         track: Tuple[float, float] = TRACK_POINTS) -> GapWitness:
    """Separate the monotone and the general upper inequality on ``(0,1)``.

    Requires ``Rinf`` (through ``R1`` and ``R2``) Finite and ``R`` Infinite;
    otherwise there is no gap and ``ValueError`` is raised.  The growth of
    the general constants is compared with the divergence symbol of ``R``
    evaluated between the ``track`` depths.
    """
    if not (1 < r < math.inf and 1 <= s < math.inf):
        raise ValueError("the gap witness needs 1 < r < inf and s < inf")
    a, b = gap_weights(r, s, theta, gamma)
    verdicts = {k: evaluate(FunctionalSpec(k, r, s, a, b, (0, 1)))
                for k in ("R", "R1", "R2", "Rinf")}
    if verdicts["R"].tag is not Tag.INFINITE:
        raise ValueError(f"no gap to witness: R is {verdicts['R'].tag.value}")
    if verdicts["Rinf"].tag is not Tag.FINITE:
        raise ValueError(f"no gap to witness: Rinf is {verdicts['Rinf'].tag.value}")
    sizes = tuple(sizes or GAP_SIZES)
    mono = estimate_best_constant(HardySpec("Rinf", "upper-monotone", r, s, a, b),
                                  TestFamily("hardy-extremal"), sizes)
    gen = estimate_best_constant(HardySpec("R", "upper-general", r, s, a, b, kappa=0.0),
                                 TestFamily("hardy-extremal"), sizes)
    sym = verdicts["R"].divergence
    y0, y1 = (float(v) for v in track)
    pred = math.exp(sym.log_value(y1) - sym.log_value(y0))
    direct = float((ell(y1, 2) / ell(y0, 2)) ** gamma)
    # the general constants over the same depths
    gv = gen.values
    k0 = int(np.argmin(np.abs(np.log(np.asarray(sizes)) - math.log(y0))))
    k1 = int(np.argmin(np.abs(np.log(np.asarray(sizes)) - math.log(y1))))
    gratio = float(gv[k1] / gv[k0])
    mv = mono.values
    mdrift = float(np.max(mv[k0:k1 + 1]) / np.min(mv[k0:k1 + 1]))
    # symbolic profile of the monotone bound: running max of R1 + R2 asymptotes
    ys = np.geomspace(y0, y1, 64)
    prof = np.zeros_like(ys)
    for k in ("R1", "R2"):
        for asym in verdicts[k].asymptotes.values():
            prof = prof + np.exp(np.asarray(asym.log_value(ys), dtype=float))
    prof = np.maximum.accumulate(prof)
    bdrift = float(prof[-1] / prof[0])
    notes = []
    ok = True
    if pred < 1.5 or abs(pred / direct - 1) > 0.2:
        ok = False
        notes.append(f"symbolic growth {pred:.4g} disagrees with direct {direct:.4g}")
    if not 0.5 * pred <= gratio <= 2.0 * pred or gratio < 1.25:
        ok = False
        notes.append(f"general constants grow by {gratio:.4g}, outside the envelope of {pred:.4g}")
    if mdrift >= 1.5 or bdrift >= 1.5:
        ok = False
        notes.append(f"monotone constants drift by {mdrift:.4g} (symbol bound {bdrift:.4g})")
    params = {"r": r, "s": s, "theta": theta, "gamma": gamma, "a": a, "b": b}
    return GapWitness(params, verdicts, mono, gen, sym.to_text(), pred, direct, gratio,
                      mdrift, bdrift, ok, tuple(notes))
