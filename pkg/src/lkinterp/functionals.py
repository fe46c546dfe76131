"""The characterizing quantities N, L, R, R1, R2, R3 and Rinf.

Every quantity has the shape ``sup_x F(x)`` or ``||x**(-1/rho) F(x)||_rho``
where ``F`` multiplies pointwise powers of ``a`` and ``b`` with powers of
inner norms over ``(A, x)`` or ``(x, B)``.  ``evaluate`` builds that shape
from the kind and ``(r, s)`` and then runs one of two engines:

* symbolic: each inner norm becomes an endpoint germ (a symbol, or the
  flags "identically infinite" / "identically zero") and the outer sup or
  norm is classified with the exact calculus;
* numeric: inner norms are cumulative quadratures on a fixed log mesh and
  the outer operation is classified by the doubling protocol.

The factor ``log(x/t)`` in R1 and R2 is handled symbolically through

    int_Y^inf (u - Y)**p f(u) du  ~  int_Y^inf u**p f(u) du
    int_0^Y (Y - u)**p f(u) du   ~  Y**p int_0^Y f(u) du

which hold for log-power ``f`` (restrict to ``u >= 2Y`` or ``u <= Y/2``
for the lower bounds).  Intervals ``(0, inf)`` are split at ``t = 1``;
inner norms that reach across combine the far side's full norm, which is
a constant (or ``l_1(x)`` times a constant under ``log(x/t)``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import logsumexp

from .asymcalc import (EndpointSymbol, Growth, Side, Tag, TierOverflowError,
                       integrate_to_endpoint, lex_growth_compare, norm_power_symbol,
                       sup_toward_endpoint)
from .quadnum import (DEEP_LAST, FIRST_DOUBLING, NormSpec, _classify, log_node_rule,
                      parse_interval, weighted_norm)
from .svfunc import NotRepresentable, Power, Product, as_expr, log_eval, to_symbol

KINDS = ("N", "L", "R", "R1", "R2", "R3", "Rinf")
INTERVALS = ((0.0, 1.0), (1.0, math.inf), (0.0, math.inf))

# numeric mesh: Y in [1e-3, 1e300], 32 panels per decade
_MESH_DECADES = (-3, 300)
_PER_DECADE = 32
_NUM_TOL = 1e-5
_LAST_X = 600  # x-points stop at 2**600; inner tails need room beyond
_DENSE_X = 40


def conjugate(p: float) -> float:
    """Hoelder conjugate ``p'`` with ``1' = inf`` and ``inf' = 1``."""
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _recip(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def rinf_dispatch(r: float, s: float) -> Tuple[str, ...]:
    """Sub-quantities whose finiteness makes up ``Rinf(r, s)``."""
    _check_exponent(r, "r")
    _check_exponent(s, "s")
    if math.isinf(r):
        return ("R3",)
    if r == 1 or (s == 1 and r > 1):
        return ("R1",)
    if math.isinf(s):
        return ("R2",)
    return ("R1", "R2")


def _check_exponent(p: float, name: str) -> None:
    if not (isinstance(p, (int, float)) and p >= 1):
        raise ValueError(f"{name} must lie in [1, inf]")


# ---------------------------------------------------------------------------
# spec and verdict


@dataclass(frozen=True)
class FunctionalSpec:
    """One characterizing quantity ``kind(r, s, a, b; A, B)``."""

    kind: str
    r: float
    s: float
    a: object
    b: object
    interval: Tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        _check_exponent(self.r, "r")
        _check_exponent(self.s, "s")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "a", as_expr(self.a))
        object.__setattr__(self, "b", as_expr(self.b))
        iv = parse_interval(self.interval)
        if iv not in INTERVALS:
            raise ValueError("interval must be (0,1), (1,inf) or (0,inf)")
        object.__setattr__(self, "interval", iv)
        r = self.r
        if self.kind == "R3" and not math.isinf(r):
            raise ValueError("R3 is defined for r = inf only")
        if self.kind in ("R1", "R2") and math.isinf(r):
            raise ValueError(f"{self.kind} is not defined for r = inf; use R3")
        if self.kind == "R2" and r == 1:
            # the case table sends r = 1 to R1 alone; r/r' would be 0
            raise ValueError("R2 is unreachable for r = 1")

    @property
    def rho(self) -> Optional[float]:
        """``1/rho = 1/s - 1/r`` when ``r > s``, else None."""
        if self.r > self.s:
            return 1.0 / (_recip(self.s) - _recip(self.r))
        return None

    @property
    def sides(self) -> Tuple[Side, ...]:
        lo, hi = self.interval
        return tuple(s for s, ok in ((Side.ZERO, lo == 0), (Side.INF, math.isinf(hi))) if ok)

    @property
    def left_end(self) -> float:
        """``A``: 0 or 1."""
        return self.interval[0]


@dataclass(frozen=True)
class WitnessPoint:
    """One point ``x_k`` of a divergence witness, in log coordinates.

    ``log_y`` is ``log |log x_k|`` so that points beyond the double range
    (needed for iterated-log growth) stay representable.
    """

    side: Side
    log_y: float
    log_value: float

    @property
    def y(self) -> float:
        return math.exp(self.log_y) if self.log_y < 709 else math.inf

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value < 709 else math.inf


@dataclass(frozen=True)
class FinVerdict:
    """Verdict on one quantity.

    Finite verdicts carry asymptotes of ``F`` near each endpoint (symbolic)
    and/or a numeric value; Infinite verdicts carry a witness sequence.
    """

    tag: Tag
    method: str
    kind: str
    value: Optional[float] = None
    asymptotes: Dict[Side, EndpointSymbol] = field(default_factory=dict)
    divergence: Optional[EndpointSymbol] = None
    witness: Tuple[WitnessPoint, ...] = ()
    notes: Tuple[str, ...] = ()
    components: Dict[str, "FinVerdict"] = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.tag is Tag.FINITE

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "tag": self.tag.value, "method": self.method,
               "value": self.value,
               "asymptotes": {s.value: sym.to_text() for s, sym in self.asymptotes.items()},
               "divergence": None if self.divergence is None else
               {"side": self.divergence.side.value, "symbol": self.divergence.to_text()},
               "witness": [{"side": w.side.value, "log_y": w.log_y, "log_value": w.log_value}
                           for w in self.witness],
               "notes": list(self.notes)}
        if self.components:
            out["components"] = {k: v.to_dict() for k, v in self.components.items()}
        return out


# ---------------------------------------------------------------------------
# the shape of each quantity


@dataclass(frozen=True)
class NormTerm:
    """``||t**(-1/p) prod(w**e) [log factor]||_{p, seg}`` raised to ``q``.

    Weight names are ``a``, ``b``, ``V`` and ``dinv`` (the reciprocal of the
    running supremum of ``a``).
    """

    p: float
    weights: Tuple[Tuple[str, float], ...]
    seg: str  # "left" is (A, x), "right" is (x, B)
    log: bool
    q: float


@dataclass(frozen=True)
class Shape:
    """``sup_x F`` or ``||x**(-1/rho) F||_rho`` with ``F`` = factors x terms."""

    outer: str  # "sup" or "rho"
    rho: Optional[float]
    factors: Tuple[Tuple[str, float], ...]
    terms: Tuple[NormTerm, ...]

    def uses(self, name: str) -> bool:
        return any(n == name for t in self.terms for n, _ in t.weights)


def _form(spec: FunctionalSpec) -> Shape:
    r, s, kind = spec.r, spec.s, spec.kind
    rp, sp = conjugate(r), conjugate(s)
    rho = spec.rho
    big = rho is not None
    outer = "rho" if big else "sup"
    if kind == "N":
        return Shape(outer, rho, (("b", 1.0), ("a", -1.0)), ())
    if kind in ("L", "R"):
        b_seg, a_seg = ("right", "left") if kind == "L" else ("left", "right")
        q = rp / sp if big else 1.0
        factors = (("a", -rp / rho),) if big else ()
        return Shape(outer, rho, factors,
                     (NormTerm(s, (("b", 1.0),), b_seg, False, 1.0),
                      NormTerm(rp, (("a", -1.0),), a_seg, False, q)))
    if kind == "R1":
        factors = (("a", r / rho),) if big else ()
        q = -r / s if big else -1.0
        return Shape(outer, rho, factors,
                     (NormTerm(s, (("b", 1.0),), "left", True, 1.0),
                      NormTerm(r, (("a", 1.0),), "left", False, q)))
    if kind == "R2":
        factors = (("b", s / rho),) if big else ()
        q = s / r if big else 1.0
        return Shape(outer, rho, factors,
                     (NormTerm(s, (("b", 1.0),), "left", False, q),
                      NormTerm(rp, (("a", r / rp), ("V", -1.0)), "right", True, 1.0)))
    if kind == "R3":
        return Shape("sup" if math.isinf(s) else "rho", None if math.isinf(s) else s,
                     (("b", 1.0),), (NormTerm(1.0, (("dinv", 1.0),), "right", False, 1.0),))
    raise ValueError(kind)


def _inner(side: Side, seg: str) -> bool:
    """Whether the segment lies between ``x`` and this side's endpoint."""
    return (side is Side.ZERO) == (seg == "left")


# ---------------------------------------------------------------------------
# symbolic engine


class _Indeterminate(Exception):
    pass


class _Unavailable(Exception):
    pass


@dataclass(frozen=True)
class _Germ:
    kind: str  # "sym", "inf" (identically infinite), "zero" (identically zero)
    side: Side
    sym: Optional[EndpointSymbol] = None  # for "inf": divergence of a culprit partial


def _ell1(side: Side) -> EndpointSymbol:
    return EndpointSymbol(side, 1.0, (1.0,))


def _one(side: Side) -> _Germ:
    return _Germ("sym", side, EndpointSymbol.constant(side))


def _gpow(g: _Germ, q: float) -> _Germ:
    if q == 0:
        return _one(g.side)
    if g.kind == "sym":
        return _Germ("sym", g.side, g.sym.power(q))
    flip = {"inf": "zero", "zero": "inf"}
    return g if q > 0 else _Germ(flip[g.kind], g.side, g.sym)


def _gmul(g: _Germ, h: _Germ) -> _Germ:
    kinds = {g.kind, h.kind}
    if kinds == {"inf", "zero"}:
        raise _Indeterminate("product of an identically infinite and an identically zero norm")
    if "inf" in kinds:
        return g if g.kind == "inf" else h
    if "zero" in kinds:
        return g if g.kind == "zero" else h
    return _Germ("sym", g.side, g.sym * h.sym)


def _sym_max(u: EndpointSymbol, v: EndpointSymbol) -> EndpointSymbol:
    c = lex_growth_compare(u, v)
    if c is Growth.GREATER:
        return u
    if c is Growth.LESS:
        return v
    return u.scale((u.coeff + v.coeff) / u.coeff)


def _endpoint_total(sym: EndpointSymbol, p: float):
    """Norm over a whole neighbourhood of the endpoint: (finite?, divergence)."""
    v = norm_power_symbol(0.0, sym, p, "inner")
    return v.finite, (None if v.finite else v.divergence)


def _symbolic_weights(spec: FunctionalSpec, form: Shape) -> Dict[Tuple[str, Side], _Germ]:
    sides = spec.sides
    out: Dict[Tuple[str, Side], _Germ] = {}
    for name, expr in (("a", spec.a), ("b", spec.b)):
        for side in sides:
            sym = to_symbol(expr, side)
            if isinstance(sym, NotRepresentable):
                raise _Unavailable(f"{name}: {sym.reason}")
            out[name, side] = _Germ("sym", side, sym)
    if form.uses("V"):
        for side, g in _v_germs(spec, {sd: out["a", sd].sym for sd in sides}, spec.r).items():
            out["V", side] = g
    if form.uses("dinv"):
        for side, g in _d_germs(spec, {sd: out["a", sd].sym for sd in sides}).items():
            out["dinv", side] = _gpow(g, -1.0)
    return out


def _v_germs(spec: FunctionalSpec, a_sym: Dict[Side, EndpointSymbol], r: float):
    """Germs of ``V(t) = int_A^t u**-1 a**r du`` near each endpoint."""
    sides = spec.sides
    out = {}
    zero_total_inf = None
    if Side.ZERO in sides:
        v = integrate_to_endpoint(a_sym[Side.ZERO].power(r))
        if v.finite:
            out[Side.ZERO] = _Germ("sym", Side.ZERO, v.asymptote)
        else:
            zero_total_inf = v.divergence
            out[Side.ZERO] = _Germ("inf", Side.ZERO, v.divergence)
    if Side.INF in sides:
        if zero_total_inf is not None:
            out[Side.INF] = _Germ("inf", Side.ZERO, zero_total_inf)
        else:
            v = integrate_to_endpoint(a_sym[Side.INF].power(r))
            own = v.divergence if not v.finite else EndpointSymbol.constant(Side.INF)
            out[Side.INF] = _Germ("sym", Side.INF, own)
    return out


def _d_germs(spec: FunctionalSpec, a_sym: Dict[Side, EndpointSymbol]):
    """Germs of ``d(t) = ||a||_{inf, (A, t)}`` near each endpoint."""
    sides = spec.sides
    out = {}
    unbounded = None
    if Side.ZERO in sides:
        sym = a_sym[Side.ZERO]
        v = sup_toward_endpoint(sym)
        if not v.finite:
            unbounded = v.divergence
            out[Side.ZERO] = _Germ("inf", Side.ZERO, sym)
        else:
            out[Side.ZERO] = _Germ("sym", Side.ZERO, sym)
    if Side.INF in sides:
        if unbounded is not None:
            out[Side.INF] = _Germ("inf", Side.ZERO, unbounded)
        else:
            sym = a_sym[Side.INF]
            grows = not sup_toward_endpoint(sym).finite
            out[Side.INF] = _Germ("sym", Side.INF, sym if grows else EndpointSymbol.constant(Side.INF))
    return out


def _weight_germ(weights, side: Side, W: Dict[Tuple[str, Side], _Germ]) -> _Germ:
    g = _one(side)
    for name, e in weights:
        g = _gmul(g, _gpow(W[name, side], e))
    return g


def _norm_germ(term: NormTerm, side: Side, sides, W) -> _Germ:
    w = _weight_germ(term.weights, side, W)
    if w.kind != "sym":
        return w
    p = term.p
    if _inner(side, term.seg):
        base = w.sym * _ell1(side) if term.log else w.sym
        v = norm_power_symbol(0.0, base, p, "inner")
        return _Germ("sym", side, v.asymptote) if v.finite else _Germ("inf", side, v.divergence)
    own = norm_power_symbol(0.0, w.sym, p, "outer").asymptote
    if term.log:
        own = own * _ell1(side)
    if len(sides) == 2:
        other = side.other
        wo = _weight_germ(term.weights, other, W)
        if wo.kind == "inf":
            return wo
        if wo.kind == "sym":
            base = wo.sym * _ell1(other) if term.log else wo.sym
            ok, div = _endpoint_total(base, p)
            if not ok:
                return _Germ("inf", other, div)
            cross = _ell1(side) if term.log else EndpointSymbol.constant(side)
            own = _sym_max(own, cross)
    return _Germ("sym", side, own)


def _symbolic(spec: FunctionalSpec, form: Shape) -> FinVerdict:
    W = _symbolic_weights(spec, form)
    sides = spec.sides
    asym: Dict[Side, EndpointSymbol] = {}
    notes = []
    for side in sides:
        F = _one(side)
        for name, e in form.factors:
            F = _gmul(F, _gpow(W[name, side], e))
        for term in form.terms:
            if term.q == 0:
                continue
            F = _gmul(F, _gpow(_norm_germ(term, side, sides, W), term.q))
        if F.kind == "inf":
            notes.append("an inner norm is infinite for every x")
            return FinVerdict(Tag.INFINITE, "symbolic", spec.kind, divergence=F.sym,
                              witness=_symbol_witness(F.sym), notes=tuple(notes))
        if F.kind == "zero":
            notes.append(f"F vanishes identically near the {side.value} endpoint")
            continue
        if form.outer == "sup":
            v = sup_toward_endpoint(F.sym)
            div = None if v.finite else v.divergence
        else:
            v = integrate_to_endpoint(F.sym.power(form.rho))
            div = None if v.finite else v.divergence.power(1.0 / form.rho)
        if div is not None:
            return FinVerdict(Tag.INFINITE, "symbolic", spec.kind, divergence=div,
                              witness=_symbol_witness(div), notes=tuple(notes))
        asym[side] = F.sym
    return FinVerdict(Tag.FINITE, "symbolic", spec.kind, asymptotes=asym, notes=tuple(notes))


def _symbol_log_value_loglog(sym: EndpointSymbol, log_y: np.ndarray) -> np.ndarray:
    """``log sym`` at ``Y = exp(log_y)`` without forming ``Y``."""
    log_y = np.asarray(log_y, dtype=float)
    out = np.full(log_y.shape, math.log(sym.coeff))
    if sym.tilt:
        with np.errstate(over="ignore"):
            out = out + sym.side.sign * sym.tilt * np.exp(log_y)
    lg = np.logaddexp(0.0, log_y)  # log l_1
    for alpha in sym.exponents:
        out = out + alpha * lg
        lg = np.log1p(lg)
    return out


def _symbol_witness(div: Optional[EndpointSymbol], ratio: float = 2.5, count: int = 6):
    """Points toward the endpoint where ``div`` grows by ``ratio`` per step."""
    if div is None:
        return ()
    grid = np.linspace(math.log(8.0), 700.0, 20000)
    grid = np.concatenate([grid, np.exp(np.linspace(math.log(700.0), math.log(1e300), 20000))])
    vals = _symbol_log_value_loglog(div, grid)
    pts = [WitnessPoint(div.side, float(grid[0]), float(vals[0]))]
    step = math.log(ratio)
    i = 0
    while len(pts) < count:
        nxt = np.flatnonzero(vals[i + 1:] >= vals[i] + step)
        if not len(nxt):
            break
        i = i + 1 + int(nxt[0])
        pts.append(WitnessPoint(div.side, float(grid[i]), float(vals[i])))
    return tuple(pts)


# ---------------------------------------------------------------------------
# numeric engine


class _Mesh:
    """Shared panels on one side: edges, Gauss nodes, log weights."""

    def __init__(self, side: Side):
        self.side = side
        lo, hi = _MESH_DECADES
        x = np.logspace(lo, hi, (hi - lo) * _PER_DECADE + 1)
        self.edges = np.concatenate([[0.0], x])
        self.nodes, self.lw = log_node_rule(self.edges, 8)
        self.x = x  # x-points: right edge of each panel
        k = np.arange(FIRST_DOUBLING, DEEP_LAST + 1)
        self.doublings = 2.0 ** k
        self.dbl_idx = np.minimum(np.searchsorted(x, self.doublings), len(x) - 1)

    def field(self, expr):
        return log_eval(expr, self.nodes, self.side), log_eval(expr, self.x, self.side)


@lru_cache(maxsize=2)
def _mesh(side: Side) -> _Mesh:
    return _Mesh(side)


def _fwd(panel: np.ndarray, sup: bool) -> np.ndarray:
    return np.maximum.accumulate(panel) if sup else np.logaddexp.accumulate(panel)


def _tail(panel: np.ndarray, sup: bool) -> np.ndarray:
    """Value over panels ``j+1 ..`` for each ``j``."""
    acc = _fwd(panel[::-1], sup)[::-1]
    return np.concatenate([acc[1:], [-np.inf]])


def _total_tag(m: _Mesh, fwd: np.ndarray) -> Tag:
    Ys = m.doublings
    logP = fwd[m.dbl_idx]
    if np.all(np.isneginf(logP)):
        return Tag.FINITE
    return _classify(Ys, logP, _NUM_TOL)[0]


def _panel_values(m: _Mesh, nodes_log: np.ndarray, x_log: np.ndarray, p: float):
    if math.isinf(p):
        return np.maximum(np.max(nodes_log, axis=1), x_log)
    return logsumexp(p * nodes_log + m.lw, axis=1)


class _NumField:
    """A weight on one side: log values at nodes and x-points, or a flag."""

    def __init__(self, nodes=None, x=None, flag: Optional[str] = None):
        self.nodes, self.x, self.flag = nodes, x, flag

    def power(self, e: float) -> "_NumField":
        if self.flag:
            if e == 0:
                return _NumField(0.0, 0.0)
            flip = {"inf": "zero", "zero": "inf"}
            return self if e > 0 else _NumField(flag=flip[self.flag])
        return _NumField(e * self.nodes, e * self.x)

    def __mul__(self, other: "_NumField") -> "_NumField":
        flags = {self.flag, other.flag} - {None}
        if flags == {"inf", "zero"}:
            raise _Indeterminate("product of an identically infinite and an identically zero norm")
        if flags:
            return _NumField(flag=flags.pop())
        return _NumField(self.nodes + other.nodes, self.x + other.x)


def _interp_nodes(m: _Mesh, x_log: np.ndarray) -> np.ndarray:
    """Node values from x-point values, log-log linear with end extrapolation."""
    lx = np.log(m.x)
    ln = np.log(np.maximum(m.nodes, 1e-300))
    out = np.interp(ln, lx, x_log)
    lo = ln < lx[0]
    if lo.any():
        slope = (x_log[1] - x_log[0]) / (lx[1] - lx[0])
        out = np.where(lo, x_log[0] + slope * (ln - lx[0]), out)
    return out


def _numeric_weights(spec: FunctionalSpec, form: Shape):
    sides = spec.sides
    W: Dict[Tuple[str, Side], _NumField] = {}
    for side in sides:
        m = _mesh(side)
        for name, expr in (("a", spec.a), ("b", spec.b)):
            W[name, side] = _NumField(*m.field(expr))
    A0 = spec.left_end == 0
    if form.uses("V"):
        r = spec.r
        tot_zero = None
        if Side.ZERO in sides:
            m = _mesh(Side.ZERO)
            a = W["a", Side.ZERO]
            panel = _panel_values(m, r * a.nodes, r * a.x, 1.0)
            tag = _total_tag(m, _fwd(panel, False))
            if tag is Tag.INCONCLUSIVE:
                raise _Indeterminate("V: inconclusive total")
            if tag is Tag.INFINITE:
                W["V", Side.ZERO] = _NumField(flag="inf")
            else:
                tot_zero = float(logsumexp(panel))
                vx = _tail(panel, False)
                vx[-1] = vx[-2] - 1e3
                W["V", Side.ZERO] = _NumField(_interp_nodes(m, vx), vx)
        if Side.INF in sides:
            m = _mesh(Side.INF)
            if A0 and tot_zero is None:
                W["V", Side.INF] = _NumField(flag="inf")
            else:
                a = W["a", Side.INF]
                vx = _fwd(_panel_values(m, r * a.nodes, r * a.x, 1.0), False)
                if A0:
                    vx = np.logaddexp(vx, tot_zero)
                W["V", Side.INF] = _NumField(_interp_nodes(m, vx), vx)
    if form.uses("dinv"):
        sup_zero = None
        if Side.ZERO in sides:
            m = _mesh(Side.ZERO)
            a = W["a", Side.ZERO]
            panel = _panel_values(m, a.nodes, a.x, math.inf)
            tag = _total_tag(m, _fwd(panel, True))
            if tag is Tag.INCONCLUSIVE:
                raise _Indeterminate("running sup: inconclusive boundedness")
            if tag is Tag.INFINITE:
                W["dinv", Side.ZERO] = _NumField(flag="zero")
            else:
                sup_zero = float(np.max(panel))
                dx = np.maximum(_tail(panel, True), a.x)
                W["dinv", Side.ZERO] = _NumField(-_interp_nodes(m, dx), -dx)
        if Side.INF in sides:
            m = _mesh(Side.INF)
            if A0 and sup_zero is None:
                W["dinv", Side.INF] = _NumField(flag="zero")
            else:
                a = W["a", Side.INF]
                dx = _fwd(_panel_values(m, a.nodes, a.x, math.inf), True)
                if A0:
                    dx = np.maximum(dx, sup_zero)
                W["dinv", Side.INF] = _NumField(-_interp_nodes(m, dx), -dx)
    return W


def _num_weight(weights, side, W) -> _NumField:
    out = _NumField(0.0, 0.0)
    for name, e in weights:
        out = out * W[name, side].power(e)
    return out


def _x_index(m: _Mesh, has_log: bool) -> np.ndarray:
    last = int(np.searchsorted(m.x, 2.0 ** _LAST_X))
    dbl = m.dbl_idx[m.doublings <= 2.0 ** _LAST_X]
    if not has_log:
        return np.arange(last + 1)
    dense_end = int(np.searchsorted(m.x, 2.0 ** _DENSE_X))
    return np.unique(np.concatenate([np.arange(0, dense_end, 4), dbl]))


def _log_norm_at(m: _Mesh, w: _NumField, p: float, J: np.ndarray, inner: bool) -> np.ndarray:
    """``log ||w(t) |Y_t - Y_x|||_p`` over the inner or outer segment, per x."""
    out = np.empty(len(J))
    for k, j in enumerate(J):
        xj = m.x[j]
        sl = slice(j + 1, None) if inner else slice(0, j + 1)
        Y, wn, lw = m.nodes[sl], w.nodes[sl], m.lw[sl]
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(np.abs(Y - xj))
        if math.isinf(p):
            out[k] = np.max(wn + lg)
        else:
            out[k] = logsumexp(p * (wn + lg) + lw) / p
    return out


def _log_cross_at(m: _Mesh, other: _Mesh, w: _NumField, p: float, J: np.ndarray) -> np.ndarray:
    """``log ||w(t) (Y_x + Y_t)||_p`` over the whole other side, per x."""
    out = np.empty(len(J))
    for k, j in enumerate(J):
        lg = np.log(other.nodes + m.x[j])
        if math.isinf(p):
            out[k] = np.max(w.nodes + lg)
        else:
            out[k] = logsumexp(p * (w.nodes + lg) + other.lw) / p
    return out


def _numeric_norm(term: NormTerm, side: Side, sides, W, J) -> _NumField:
    """Inner norm as a function of x on the x-points ``J`` (log values)."""
    m = _mesh(side)
    w = _num_weight(term.weights, side, W)
    if w.flag:
        return _NumField(None, None, w.flag)
    p = term.p
    sup = math.isinf(p)
    scale = 1.0 if sup else 1.0 / p
    inner = _inner(side, term.seg)
    if term.log:
        lw_log = np.log1p(m.nodes)
        probe = _panel_values(m, w.nodes + lw_log, w.x + np.log1p(m.x), p)
    else:
        probe = _panel_values(m, w.nodes, w.x, p)
    if inner:
        tag = _total_tag(m, _fwd(probe, sup))
        if tag is Tag.INCONCLUSIVE:
            raise _Indeterminate(f"inner norm total is inconclusive on the {side.value} side")
        if tag is Tag.INFINITE:
            return _NumField(flag="inf")
        if term.log:
            return _NumField(None, _log_norm_at(m, w, p, J, True))
        plain = _panel_values(m, w.nodes, w.x, p)
        return _NumField(None, _tail(plain, sup)[J] * scale)
    if term.log:
        vals = _log_norm_at(m, w, p, J, False)
    else:
        vals = _fwd(_panel_values(m, w.nodes, w.x, p), sup)[J] * scale
    if len(sides) == 2:
        other = _mesh(side.other)
        wo = _num_weight(term.weights, side.other, W)
        if wo.flag == "inf":
            return _NumField(flag="inf")
        if wo.flag is None:
            extra = np.log1p(other.nodes) if term.log else 0.0
            extra_x = np.log1p(other.x) if term.log else 0.0
            probe = _panel_values(other, wo.nodes + extra, wo.x + extra_x, p)
            tag = _total_tag(other, _fwd(probe, sup))
            if tag is Tag.INCONCLUSIVE:
                raise _Indeterminate("cross-side norm is inconclusive")
            if tag is Tag.INFINITE:
                return _NumField(flag="inf")
            if term.log:
                cross = _log_cross_at(m, other, wo, p, J)
            else:
                tot = _panel_values(other, wo.nodes, wo.x, p)
                cross = np.full(len(J), (np.max(tot) if sup else logsumexp(tot)) * scale)
            if sup:
                vals = np.maximum(vals, cross)
            else:
                vals = np.logaddexp(p * vals, p * cross) / p
    return _NumField(None, vals)


def _numeric(spec: FunctionalSpec, form: Shape) -> FinVerdict:
    W = _numeric_weights(spec, form)
    sides = spec.sides
    has_log = any(t.log for t in form.terms)
    total_val = []
    notes = ["inner tails beyond Y = 1e300 are neglected"]
    for side in sides:
        m = _mesh(side)
        J = _x_index(m, has_log)
        logF = np.zeros(len(J))
        flag = None
        for name, e in form.factors:
            logF = logF + e * W[name, side].x[J] if not W[name, side].flag else logF
            if W[name, side].flag:
                flag = _combine_flag(flag, W[name, side].power(e).flag)
        for term in form.terms:
            if term.q == 0:
                continue
            g = _numeric_norm(term, side, sides, W, J)
            if g.flag:
                flag = _combine_flag(flag, g.power(term.q).flag)
            else:
                logF = logF + term.q * g.x
        if flag == "inf":
            return FinVerdict(Tag.INFINITE, "numeric", spec.kind,
                              notes=tuple(notes + ["an inner norm is infinite for every x"]))
        if flag == "zero":
            continue
        xs = m.x[J]
        dbl = np.array([y for y in m.doublings if y <= xs[-1]])
        pos = np.minimum(np.searchsorted(xs, dbl), len(xs) - 1)
        if form.outer == "sup":
            run = np.maximum.accumulate(logF)
            seq = run[pos]
            side_val = float(run[-1])
            expr_at = logF
        else:
            g = form.rho * logF
            z = np.log(xs)
            # trapezoid in z = log Y of F**rho * Y, plus the piece [0, x_0]
            seg = np.logaddexp(g[:-1] + z[:-1], g[1:] + z[1:]) + np.log(np.diff(z) / 2)
            cum = np.logaddexp.accumulate(np.concatenate([[g[0] + z[0]], seg]))
            seq = cum[pos]
            side_val = float(cum[-1])
            expr_at = cum / form.rho
        tag, growth, slope = _classify(dbl, seq, _NUM_TOL)
        if tag is Tag.INFINITE:
            return FinVerdict(Tag.INFINITE, "numeric", spec.kind,
                              witness=_grid_witness(side, xs, expr_at), notes=tuple(notes))
        if tag is Tag.INCONCLUSIVE:
            return FinVerdict(Tag.INCONCLUSIVE, "numeric", spec.kind,
                              notes=tuple(notes + [f"{side.value} side: slope {slope}"]))
        total_val.append(side_val)
    if not total_val:
        value = 0.0
    elif form.outer == "sup":
        value = math.exp(min(max(total_val), 709.0))
    else:
        value = math.exp(min(float(logsumexp(total_val)) / form.rho, 709.0))
    return FinVerdict(Tag.FINITE, "numeric", spec.kind, value=value, notes=tuple(notes))


def _combine_flag(a: Optional[str], b: Optional[str]) -> Optional[str]:
    if {a, b} == {"inf", "zero"}:
        raise _Indeterminate("product of an identically infinite and an identically zero norm")
    return a or b


def _grid_witness(side: Side, xs: np.ndarray, log_vals: np.ndarray, ratio: float = 2.0):
    start = int(np.searchsorted(xs, 1.0))
    i = min(start, len(xs) - 1)
    pts = [WitnessPoint(side, float(math.log(xs[i])), float(log_vals[i]))]
    while True:
        nxt = np.flatnonzero(log_vals[i + 1:] >= log_vals[i] + math.log(ratio))
        if not len(nxt):
            break
        i = i + 1 + int(nxt[0])
        pts.append(WitnessPoint(side, float(math.log(xs[i])), float(log_vals[i])))
        if len(pts) >= 8:
            break
    return tuple(pts)


# ---------------------------------------------------------------------------
# public entry points


def _n_value(spec: FunctionalSpec, form: Shape) -> Optional[float]:
    """N is a plain weighted norm, so its value comes straight from quadnum."""
    w = Product((spec.b, Power(spec.a, -1.0)))
    if form.outer == "sup":
        v = weighted_norm(NormSpec(math.inf, spec.interval, w), tol=1e-8)
    else:
        v = weighted_norm(NormSpec(form.rho, spec.interval, w, measure="dt/t"), tol=1e-8)
    return v.value if v.finite else None


def evaluate(spec: FunctionalSpec, method: str = "auto", value: bool = False) -> FinVerdict:
    """Decide finiteness of one quantity.

    Parameters
    ----------
    spec : FunctionalSpec
    method : {"auto", "symbolic", "numeric"}
        ``auto`` uses the exact engine whenever ``a`` and ``b`` are
        log-power germs at every endpoint involved, else the numeric one.
    value : bool
        Also estimate the value of a Finite quantity on the numeric mesh
        (N always gets its value).
    """
    if method not in ("auto", "symbolic", "numeric"):
        raise ValueError("method must be auto, symbolic or numeric")
    if spec.kind == "Rinf":
        parts = {}
        for kind in rinf_dispatch(spec.r, spec.s):
            sub = FunctionalSpec(kind, spec.r, spec.s, spec.a, spec.b, spec.interval)
            parts[kind] = evaluate(sub, method, value)
        tags = [v.tag for v in parts.values()]
        tag = (Tag.INFINITE if Tag.INFINITE in tags else
               Tag.INCONCLUSIVE if Tag.INCONCLUSIVE in tags else Tag.FINITE)
        meth = "symbolic" if all(v.method == "symbolic" for v in parts.values()) else "numeric"
        bad = next((v for v in parts.values() if v.tag is Tag.INFINITE), None)
        return FinVerdict(tag, meth, "Rinf",
                          divergence=bad.divergence if bad else None,
                          witness=bad.witness if bad else (), components=parts)
    form = _form(spec)
    result = None
    notes = []
    if method in ("auto", "symbolic"):
        try:
            result = _symbolic(spec, form)
        except (_Unavailable, TierOverflowError) as exc:
            if method == "symbolic":
                raise ValueError(f"symbolic path unavailable: {exc}") from exc
            notes.append(f"symbolic path unavailable: {exc}")
        except _Indeterminate as exc:
            result = FinVerdict(Tag.INCONCLUSIVE, "symbolic", spec.kind, notes=(str(exc),))
    if result is None:
        try:
            result = _numeric(spec, form)
        except _Indeterminate as exc:
            result = FinVerdict(Tag.INCONCLUSIVE, "numeric", spec.kind, notes=(str(exc),))
    if result.finite and result.value is None:
        val = None
        if spec.kind == "N":
            val = _n_value(spec, form)
        elif value:
            try:
                num = _numeric(spec, form)
                val = num.value
                if not num.finite:
                    notes.append(f"numeric mesh says {num.tag.value}")
            except _Indeterminate as exc:
                notes.append(str(exc))
        if val is not None:
            result = FinVerdict(result.tag, result.method, result.kind, value=val,
                                asymptotes=result.asymptotes, notes=result.notes)
    if notes:
        result = FinVerdict(result.tag, result.method, result.kind, value=result.value,
                            asymptotes=result.asymptotes, divergence=result.divergence,
                            witness=result.witness, notes=result.notes + tuple(notes),
                            components=result.components)
    return result


# ---------------------------------------------------------------------------
# V potential


@dataclass(frozen=True)
class VPotential:
    """``V(t) = int_A^t u**-1 a(u)**r du`` as an evaluable.

    ``log_eval(Y, side)`` interpolates a cached cumulative quadrature;
    ``symbols`` holds exact asymptotes where ``a`` is a log-power germ;
    ``infinite`` is set when the integral diverges at ``A`` for every ``t``.
    """

    interval: Tuple[float, float]
    r: float
    infinite: bool
    symbols: Dict[Side, EndpointSymbol]
    _tables: Dict[Side, Tuple[np.ndarray, np.ndarray]]

    def log_eval(self, Y, side) -> np.ndarray:
        side = Side(side) if not isinstance(side, Side) else side
        if self.infinite:
            return np.full(np.shape(Y), np.inf)
        lx, lv, spline = self._tables[side]
        ly = np.log(np.maximum(np.asarray(Y, dtype=float), 1e-300))
        out = spline(np.clip(ly, lx[0], lx[-1]))
        below = ly < lx[0]
        if np.any(below):
            slope = (lv[1] - lv[0]) / (lx[1] - lx[0])
            out = np.where(below, lv[0] + slope * (ly - lx[0]), out)
        return out

    def __call__(self, t: float) -> float:
        if self.infinite:
            return math.inf
        side = Side.ZERO if t < 1 else Side.INF
        return float(np.exp(self.log_eval(abs(math.log(t)), side)))


def v_potential(a, r: float, interval=(0.0, 1.0)) -> VPotential:
    """Build ``V`` for weight ``a`` and exponent ``r < inf`` on the interval."""
    if not (1 <= r < math.inf):
        raise ValueError("v_potential needs 1 <= r < inf")
    a = as_expr(a)
    dummy = FunctionalSpec("R2", max(r, 1.5), 2.0, a, 1.0, interval)
    dummy_form = Shape("sup", None, (), (NormTerm(1.0, (("V", 1.0),), "left", False, 1.0),))
    spec = _VSpec(dummy, r)
    W = _numeric_weights(spec, dummy_form)
    infinite = any(W["V", s].flag == "inf" for s in dummy.sides)
    tables = {}
    if not infinite:
        for side in dummy.sides:
            m = _mesh(side)
            lx, lv = np.log(m.x), W["V", side].x
            tables[side] = (lx, lv, CubicSpline(lx, lv))
    symbols = {}
    a_sym = {s: to_symbol(a, s) for s in dummy.sides}
    if not any(isinstance(v, NotRepresentable) for v in a_sym.values()):
        for side, g in _v_germs(dummy, a_sym, r).items():
            if g.kind == "sym":
                symbols[side] = g.sym
    return VPotential(dummy.interval, float(r), infinite, symbols, tables)


class _VSpec:
    """Spec view that carries an arbitrary ``r`` (R2 rejects ``r = 1``)."""

    def __init__(self, spec: FunctionalSpec, r: float):
        self._spec = spec
        self.r = float(r)

    def __getattr__(self, name):
        return getattr(self._spec, name)


# ---------------------------------------------------------------------------
# custom shapes


@dataclass(frozen=True)
class _ShapeContext:
    kind: str
    a: object
    b: object
    interval: Tuple[float, float]
    r: float = 2.0

    @property
    def sides(self) -> Tuple[Side, ...]:
        lo, hi = self.interval
        return tuple(s for s, ok in ((Side.ZERO, lo == 0), (Side.INF, math.isinf(hi))) if ok)

    @property
    def left_end(self) -> float:
        return self.interval[0]


def evaluate_shape(shape: Shape, a, b, interval=(0.0, 1.0), label: str = "custom",
                   method: str = "auto", r: float = 2.0) -> FinVerdict:
    """Run either engine on a hand-built shape (exponents may be below 1).

    ``r`` is only used when the shape mentions ``V``.
    """
    iv = parse_interval(interval)
    if iv not in INTERVALS:
        raise ValueError("interval must be (0,1), (1,inf) or (0,inf)")
    ctx = _ShapeContext(label, as_expr(a), as_expr(b), iv, float(r))
    if method in ("auto", "symbolic"):
        try:
            return _symbolic(ctx, shape)
        except (_Unavailable, TierOverflowError) as exc:
            if method == "symbolic":
                raise ValueError(f"symbolic path unavailable: {exc}") from exc
        except _Indeterminate as exc:
            return FinVerdict(Tag.INCONCLUSIVE, "symbolic", label, notes=(str(exc),))
    try:
        return _numeric(ctx, shape)
    except _Indeterminate as exc:
        return FinVerdict(Tag.INCONCLUSIVE, "numeric", label, notes=(str(exc),))
