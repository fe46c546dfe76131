"""Slowly varying functions and power-times-SV weights as expression trees.

Expressions are evaluated in log coordinates: a point ``t`` is described by
its side (``t < 1`` or ``t > 1``) and ``Y = |log t|``, which lets the
iterated logarithms be sampled at ``Y`` up to ``1e300``.

Text grammar (case and whitespace insensitive)::

    l1^-0.5 * l2^0.25        iterated-log powers
    exp(0.5*l1^0.5)          exp(c * l1^beta)
    exp(l1^(1/3)*cos(l1^(1/3)))
    broken(2,-1)             l1^2 below t=1, l1^-1 above
    t^0.1                    raw power, never slowly varying
    argpow(l1^2, 0.5)        t -> a(t^0.5)
    sup(l1^-1)               running supremum over (0, t)
    cum(l1^-1, 1)            1 + integral of u^-1 a(u)^q between t and 1
    tail(l1^-2, 1)           integral of u^-1 a(u)^q from the endpoint to t
"""
from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .asymcalc import (EndpointSymbol, MAX_TIERS, Side, ell_log, integrate_to_endpoint,
                       parse_side, sup_toward_endpoint)

__all__ = [
    "Const", "LogTier", "BrokenLog", "ExpPowLog", "ExpOscLog", "Product",
    "Power", "ArgPower", "RawPower", "RunningSup", "LogIntegral", "SvExpr", "LogCoord",
    "SvValue", "Certificate", "NotRepresentable", "parse", "to_text",
    "log_eval", "evaluate", "substar", "certify_sv", "to_symbol",
    "running_sup", "is_log_power", "contains_raw_power", "default_grid",
]

_LOG_MAX = math.log(sys.float_info.max)
_LOG_MIN = math.log(sys.float_info.min)


# ---------------------------------------------------------------------------
# nodes


@dataclass(frozen=True)
class Const:
    c: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError("Const needs a positive finite value")


@dataclass(frozen=True)
class LogTier:
    """``l_i(t)**alpha``."""

    i: int
    alpha: float = 1.0

    def __post_init__(self):
        if not 1 <= self.i <= MAX_TIERS:
            raise ValueError(f"log tier must be in 1..{MAX_TIERS}")


@dataclass(frozen=True)
class BrokenLog:
    """``l_1**a0`` on ``(0, 1)`` and ``l_1**ainf`` on ``(1, inf)``."""

    a0: float
    ainf: float


@dataclass(frozen=True)
class ExpPowLog:
    """``exp(c * l_1**beta)`` with ``0 < beta < 1``."""

    c: float
    beta: float

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise ValueError("ExpPowLog needs 0 < beta < 1")


@dataclass(frozen=True)
class ExpOscLog:
    """``exp(c * l_1**beta * cos(l_1**beta))`` with ``0 < beta < 1/2``.

    Oscillates with unbounded amplitude at both endpoints yet stays slowly
    varying because the phase moves slower than ``log t``.
    """

    c: float
    beta: float

    def __post_init__(self):
        if not 0 < self.beta < 0.5:
            raise ValueError("ExpOscLog needs 0 < beta < 1/2")


@dataclass(frozen=True)
class Product:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Power:
    child: "SvExpr"
    rho: float


@dataclass(frozen=True)
class ArgPower:
    """``t -> child(t**rho)``; a negative ``rho`` swaps the two endpoints."""

    child: "SvExpr"
    rho: float


@dataclass(frozen=True)
class RawPower:
    """``t**delta``; allowed in weights, never certified slowly varying."""

    delta: float


@dataclass(frozen=True)
class RunningSup:
    """``t -> sup of child over (0, t)``."""

    child: "SvExpr"


@dataclass(frozen=True)
class LogIntegral:
    """Primitive of ``u**-1 child(u)**q`` in the log variable.

    ``mode="outer"`` is ``1 + int`` between ``t`` and 1 (it grows toward
    the endpoint when the integral diverges there); ``mode="inner"`` is the
    integral from the endpoint to ``t`` and is infinite when it diverges.
    """

    child: "SvExpr"
    q: float
    mode: str = "outer"

    def __post_init__(self):
        if self.mode not in ("inner", "outer"):
            raise ValueError("mode must be 'inner' or 'outer'")
        object.__setattr__(self, "q", float(self.q))


SvExpr = Union[Const, LogTier, BrokenLog, ExpPowLog, ExpOscLog, Product, Power,
               ArgPower, RawPower, RunningSup, LogIntegral]


@dataclass(frozen=True)
class LogCoord:
    side: Side
    Y: float

    def __post_init__(self):
        object.__setattr__(self, "side", parse_side(self.side))
        if not self.Y >= 0:
            raise ValueError("Y = |log t| must be non-negative")

    @classmethod
    def from_t(cls, t: float) -> "LogCoord":
        return cls(Side.ZERO if t < 1 else Side.INF, abs(math.log(t)))

    @property
    def log_t(self) -> float:
        return self.side.sign * self.Y


@dataclass(frozen=True)
class SvValue:
    value: float
    log_value: float
    saturated: bool


@dataclass(frozen=True)
class Certificate:
    passed: bool
    worst_ratio: float
    bound: float
    reason: str = ""


@dataclass(frozen=True)
class NotRepresentable:
    reason: str

    def __bool__(self):
        return False


def _walk(expr) -> Iterable:
    yield expr
    if isinstance(expr, Product):
        for ch in expr.children:
            yield from _walk(ch)
    elif isinstance(expr, (Power, ArgPower, RunningSup, LogIntegral)):
        yield from _walk(expr.child)


def contains_raw_power(expr) -> bool:
    return any(isinstance(n, RawPower) and n.delta != 0 for n in _walk(expr))


def is_log_power(expr) -> bool:
    """True when the expression is a product of iterated-log powers."""
    allowed = (Const, LogTier, BrokenLog, Product, Power, ArgPower)
    return all(isinstance(n, allowed) for n in _walk(expr))


# ---------------------------------------------------------------------------
# evaluation


def _signed(Y, side: Side) -> np.ndarray:
    return side.sign * np.asarray(Y, dtype=float)


def log_eval(expr, Y, side) -> np.ndarray:
    """Natural log of ``expr`` at ``t = exp(+-Y)``, vectorised over ``Y``."""
    side = parse_side(side)
    Y = np.asarray(Y, dtype=float)
    if isinstance(expr, Const):
        return np.full(Y.shape, math.log(expr.c))
    if isinstance(expr, LogTier):
        return expr.alpha * ell_log(Y, expr.i)[expr.i - 1]
    if isinstance(expr, BrokenLog):
        a = expr.a0 if side is Side.ZERO else expr.ainf
        return a * np.log1p(Y)
    if isinstance(expr, ExpPowLog):
        return expr.c * np.exp(expr.beta * np.log1p(Y))
    if isinstance(expr, ExpOscLog):
        phase = np.exp(expr.beta * np.log1p(Y))
        return expr.c * phase * np.cos(phase)
    if isinstance(expr, Product):
        out = np.zeros(Y.shape)
        for ch in expr.children:
            out = out + log_eval(ch, Y, side)
        return out
    if isinstance(expr, Power):
        return expr.rho * log_eval(expr.child, Y, side)
    if isinstance(expr, ArgPower):
        rho = expr.rho
        if rho == 0:
            return np.full(Y.shape, float(log_eval(expr.child, 0.0, side)))
        inner_side = side if rho > 0 else side.other
        return log_eval(expr.child, abs(rho) * Y, inner_side)
    if isinstance(expr, RawPower):
        return expr.delta * _signed(Y, side)
    if isinstance(expr, RunningSup):
        return _running_sup_log(expr.child, _signed(Y, side))
    if isinstance(expr, LogIntegral):
        return _log_integral_log(expr, Y, side)
    raise TypeError(f"not an expression node: {expr!r}")


def _log_eval_signed(expr, u: np.ndarray) -> np.ndarray:
    """Evaluate at signed ``log t`` values (mixed sides)."""
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape)
    neg = u < 0
    if neg.any():
        out[neg] = log_eval(expr, -u[neg], Side.ZERO)
    if (~neg).any():
        out[~neg] = log_eval(expr, u[~neg], Side.INF)
    return out


@lru_cache(maxsize=64)
def _sup_table(child) -> tuple:
    y = np.logspace(-3, 300, 303 * 64)
    u = np.concatenate([-y[::-1], [0.0], y])
    vals = _log_eval_signed(child, u)
    if not np.all(np.isfinite(vals)):
        vals = np.where(np.isfinite(vals), vals, np.inf)
    return u, np.maximum.accumulate(vals)


def _running_sup_log(child, u: np.ndarray) -> np.ndarray:
    grid, cummax = _sup_table(child)
    idx = np.searchsorted(grid, u, side="right") - 1
    here = _log_eval_signed(child, u)
    prior = np.where(idx >= 0, cummax[np.clip(idx, 0, None)], -np.inf)
    return np.maximum(prior, here)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def _panel_logs(child, q: float, side: Side, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """``log int_lo^hi child(y)**q dy`` per panel (8-point Gauss rule)."""
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_X[None, :]
    vals = q * log_eval(child, nodes, side)
    with np.errstate(divide="ignore"):
        lw = np.log(_GL_W)[None, :] + np.log(half)[:, None]
    return _logsumexp_rows(vals + lw)


def _logsumexp_rows(x: np.ndarray) -> np.ndarray:
    top = np.max(x, axis=1)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        return safe + np.log(np.sum(np.exp(x - safe[:, None]), axis=1))


@lru_cache(maxsize=64)
def _integral_table(child, q: float, side: Side) -> tuple:
    """Cumulative ``log int_0^y`` on a log grid and the total (inf if divergent)."""
    edges = np.concatenate([[0.0], np.logspace(-3, 300, 303 * 64 + 1)])
    panels = _panel_logs(child, q, side, edges[:-1], edges[1:])
    cum = np.concatenate([[-np.inf], np.logaddexp.accumulate(panels)])
    from .quadnum import side_integral  # local import: quadnum builds on this module
    total = side_integral(Power(child, q), side)
    log_total = math.log(total.value) if total.finite and total.value > 0 else math.inf
    if total.tag.value == "Inconclusive":
        log_total = math.nan
    return edges, cum, log_total


def _log_integral_log(expr: LogIntegral, Y: np.ndarray, side: Side) -> np.ndarray:
    edges, cum, log_total = _integral_table(expr.child, expr.q, side)
    Yf = np.atleast_1d(Y).astype(float)
    k = np.clip(np.searchsorted(edges, Yf, side="right") - 1, 0, len(edges) - 2)
    part = _panel_logs(expr.child, expr.q, side, edges[k], np.maximum(Yf, edges[k]))
    part = np.where(Yf > edges[k], part, -np.inf)
    below = np.logaddexp(cum[k], part)
    if expr.mode == "outer":
        out = np.logaddexp(0.0, below)
    elif math.isnan(log_total):
        raise ValueError("could not decide convergence of the tail integral")
    elif math.isinf(log_total):
        out = np.full(Yf.shape, np.inf)
    else:
        # total minus the part below Y, without cancellation where possible
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.exp(below - log_total)
            out = log_total + np.log1p(-np.minimum(frac, 1.0))
        above = _tail_above(expr.child, expr.q, side, Yf, frac)
        out = np.where(frac > 0.5, above, out)
    return out.reshape(np.shape(Y))


def _tail_above(child, q: float, side: Side, Yf: np.ndarray, frac: np.ndarray) -> np.ndarray:
    """``log int_Y^inf`` summed panel by panel for points deep in the tail."""
    out = np.full(Yf.shape, -np.inf)
    for j in np.flatnonzero(frac > 0.5):
        y = Yf[j]
        edges = y * np.logspace(0, 300 - math.log10(max(y, 1e-3)), 4096)
        if len(edges) < 2 or edges[-1] <= y:
            continue
        panels = _panel_logs(child, q, side, edges[:-1], edges[1:])
        out[j] = _logsumexp_rows(panels[None, :])[0]
    return out


def evaluate(expr, at: LogCoord) -> SvValue:
    """Value at a log coordinate, flagging overflow instead of returning inf."""
    lv = float(log_eval(expr, at.Y, at.side))
    if lv > _LOG_MAX:
        return SvValue(sys.float_info.max, lv, True)
    if lv < _LOG_MIN:
        return SvValue(sys.float_info.min, lv, True)
    return SvValue(math.exp(lv), lv, False)


def running_sup(expr) -> RunningSup:
    """Running supremum ``d(t) = sup of expr over (0, t)``."""
    return RunningSup(expr)


# ---------------------------------------------------------------------------
# transformations


@dataclass(frozen=True)
class Substar:
    exact: SvExpr
    simplified: Optional[SvExpr]


def _strip_argpower(expr):
    if isinstance(expr, ArgPower) and expr.rho > 0:
        return _strip_argpower(expr.child)
    if isinstance(expr, Product):
        return Product(tuple(_strip_argpower(c) for c in expr.children))
    if isinstance(expr, Power):
        return Power(_strip_argpower(expr.child), expr.rho)
    return expr


def substar(expr, m: float) -> Substar:
    """``t -> expr(t**(1/m))`` plus a log-power equivalent when one exists."""
    if m == 0 or not math.isfinite(m):
        raise ValueError("slope m must be a nonzero finite real")
    exact = expr if m == 1 else ArgPower(expr, 1.0 / m)
    simplified = None
    if is_log_power(expr) and m > 0:
        simplified = _strip_argpower(expr)
    return Substar(exact, simplified)


def default_grid(lo_decade: float = 1.0, hi_decade: float = 6.0,
                 per_decade: int = 40) -> list:
    n = int((hi_decade - lo_decade) * per_decade) + 1
    ys = np.logspace(lo_decade, hi_decade, n)
    return [LogCoord(Side.ZERO, y) for y in ys] + [LogCoord(Side.INF, y) for y in ys]


def certify_sv(expr, eps: float, grid: Optional[Sequence[LogCoord]] = None,
               bound: float = 4.0) -> Certificate:
    """Quasi-monotonicity check of ``t**eps * expr`` and ``t**-eps * expr``.

    Along each side of the grid (ordered by ``t``) the first product must
    stay within ``bound`` of its running maximum and the second within
    ``bound`` of its running minimum.  The compact middle of ``(0, inf)``
    only ever contributes a bounded factor, so the grid is meant to sample
    the two tails.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    raws = [n.delta for n in _walk(expr) if isinstance(n, RawPower) and n.delta != 0]
    if raws:
        worst = math.exp(max(abs(d) for d in raws))
        return Certificate(False, worst, bound, "raw power factor is not slowly varying")
    grid = default_grid() if grid is None else list(grid)
    if not grid:
        raise ValueError("grid must be nonempty")
    u = np.array(sorted(c.log_t for c in grid))
    worst_log = 0.0
    for mask in (u < 0, u >= 0):
        if not mask.any():
            continue
        us = u[mask]
        lv = _log_eval_signed(expr, us)
        if not np.all(np.isfinite(lv)):
            return Certificate(False, math.inf, bound, "non-finite value on grid")
        up = eps * us + lv
        down = -eps * us + lv
        worst_log = max(worst_log,
                        float(np.max(np.maximum.accumulate(up) - up)),
                        float(np.max(down - np.minimum.accumulate(down))))
    worst = math.exp(min(worst_log, _LOG_MAX))
    ok = worst <= bound
    return Certificate(ok, worst, bound, "" if ok else "monotonicity defect exceeds bound")


def to_symbol(expr, side, allow_tilt: bool = False):
    """Exact exponent-vector germ at ``side`` or ``NotRepresentable``.

    With ``allow_tilt`` raw powers are folded into the symbol's tilt.
    """
    side = parse_side(side)
    if isinstance(expr, Const):
        return EndpointSymbol(side, expr.c)
    if isinstance(expr, LogTier):
        exps = [0.0] * (expr.i - 1) + [expr.alpha]
        return EndpointSymbol(side, 1.0, exps)
    if isinstance(expr, BrokenLog):
        return EndpointSymbol(side, 1.0, [expr.a0 if side is Side.ZERO else expr.ainf])
    if isinstance(expr, (ExpPowLog, ExpOscLog)):
        return NotRepresentable("exponential of a log power is not a log-power germ")
    if isinstance(expr, RawPower):
        if allow_tilt:
            return EndpointSymbol(side, 1.0, (), expr.delta)
        return NotRepresentable("raw power is not slowly varying")
    if isinstance(expr, Product):
        out = EndpointSymbol(side)
        for ch in expr.children:
            s = to_symbol(ch, side, allow_tilt)
            if isinstance(s, NotRepresentable):
                return s
            out = out * s
        return out
    if isinstance(expr, Power):
        s = to_symbol(expr.child, side, allow_tilt)
        return s if isinstance(s, NotRepresentable) else s.power(expr.rho)
    if isinstance(expr, ArgPower):
        rho = expr.rho
        if rho == 0:
            return EndpointSymbol(side, evaluate(expr.child, LogCoord(side, 0.0)).value)
        inner_side = side if rho > 0 else side.other
        s = to_symbol(expr.child, inner_side, allow_tilt)
        if isinstance(s, NotRepresentable):
            return s
        # l_1(t^rho) ~ |rho| l_1(t); deeper tiers are asymptotically unchanged
        coeff = s.coeff * abs(rho) ** s.exponent(1)
        return EndpointSymbol(side, coeff, s.exponents, s.tilt * rho)
    if isinstance(expr, RunningSup):
        return _running_sup_symbol(expr.child, side)
    if isinstance(expr, LogIntegral):
        return _log_integral_symbol(expr, side)
    raise TypeError(f"not an expression node: {expr!r}")


def _log_integral_symbol(expr: LogIntegral, side: Side):
    s = to_symbol(expr.child, side)
    if isinstance(s, NotRepresentable):
        return s
    v = integrate_to_endpoint(s.power(expr.q))
    if expr.mode == "inner":
        if not v.finite:
            return NotRepresentable("integral diverges at the endpoint")
        return v.asymptote
    if not v.finite:
        return v.divergence
    # bounded: 1 + total, read off the cumulative table
    return EndpointSymbol(side, math.exp(float(log_eval(expr, 1e300, side))))


def _running_sup_symbol(child, side: Side):
    near0 = to_symbol(child, Side.ZERO)
    if isinstance(near0, NotRepresentable):
        return near0
    if not sup_toward_endpoint(near0).finite:
        return NotRepresentable("running supremum is infinite near zero")
    if side is Side.ZERO:
        return near0
    s = to_symbol(child, Side.INF)
    if isinstance(s, NotRepresentable):
        return s
    if not sup_toward_endpoint(s).finite:
        return s
    level = float(np.max(_sup_table(child)[1]))
    return EndpointSymbol(Side.INF, math.exp(level))


# ---------------------------------------------------------------------------
# text grammar

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:e[+-]?\d+)?|\.\d+(?:e[+-]?\d+)?)|([a-z_][a-z0-9_]*)|(.))")


class _Parser:
    def __init__(self, text: str):
        self.toks = []
        for m in _TOKEN.finditer(text.lower()):
            num, name, op = m.groups()
            if num is not None:
                self.toks.append(("num", float(num)))
            elif name is not None:
                self.toks.append(("name", name))
            elif op is not None and not op.isspace():
                self.toks.append(("op", op))
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val is not None and tok[1] != val):
            raise ValueError(f"unexpected token {tok[1]!r} at position {self.pos}")
        self.pos += 1
        return tok[1]

    def at(self, kind, val=None) -> bool:
        tok = self.peek()
        return tok[0] == kind and (val is None or tok[1] == val)

    def number(self) -> float:
        sign = 1.0
        while self.at("op", "-") or self.at("op", "+"):
            if self.take("op") == "-":
                sign = -sign
        if self.at("op", "("):
            self.take("op", "(")
            val = self.number()
            self.take("op", ")")
        else:
            val = self.take("num")
        if self.at("op", "/"):
            save = self.pos
            self.take("op", "/")
            if self.at("num") or self.at("op", "(") or self.at("op", "-"):
                val /= self.number()
            else:
                self.pos = save
        return sign * val

    def expr(self):
        factors = [self.factor()]
        while self.at("op", "*") or self.at("op", "/"):
            op = self.take("op")
            f = self.factor()
            factors.append(f if op == "*" else Power(f, -1.0))
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self):
        base = self.atom()
        if self.at("op", "^"):
            self.take("op", "^")
            rho = self.number()
            return _apply_power(base, rho)
        return base

    def atom(self):
        if self.at("op", "("):
            self.take("op", "(")
            e = self.expr()
            self.take("op", ")")
            return e
        if self.at("num"):
            return Const(self.take("num"))
        name = self.take("name")
        if re.fullmatch(r"l\d", name):
            return LogTier(int(name[1:]), 1.0)
        if name == "t":
            return RawPower(1.0)
        if name == "broken":
            self.take("op", "(")
            a0 = self.number()
            self.take("op", ",")
            ainf = self.number()
            self.take("op", ")")
            return BrokenLog(a0, ainf)
        if name == "sup":
            self.take("op", "(")
            e = self.expr()
            self.take("op", ")")
            return RunningSup(e)
        if name in ("cum", "tail"):
            self.take("op", "(")
            e = self.expr()
            self.take("op", ",")
            q = self.number()
            self.take("op", ")")
            return LogIntegral(e, q, "outer" if name == "cum" else "inner")
        if name == "argpow":
            self.take("op", "(")
            e = self.expr()
            self.take("op", ",")
            rho = self.number()
            self.take("op", ")")
            return ArgPower(e, rho)
        if name == "exp":
            self.take("op", "(")
            node = self.exp_body()
            self.take("op", ")")
            return node
        raise ValueError(f"unknown name {name!r}")

    def exp_body(self):
        c, beta, osc = 1.0, None, None
        while True:
            if self.at("op", "-") and self.pos + 1 < len(self.toks) \
                    and self.toks[self.pos + 1][0] == "name":
                self.take("op", "-")
                c = -c
                continue
            if self.at("num") or self.at("op", "-"):
                c *= self.number()
            elif self.at("name", "l1"):
                self.take("name")
                self.take("op", "^")
                beta = self.number()
            elif self.at("name", "cos"):
                self.take("name")
                self.take("op", "(")
                self.take("name", "l1")
                self.take("op", "^")
                osc = self.number()
                self.take("op", ")")
            else:
                raise ValueError("exp() accepts c*l1^beta or c*l1^beta*cos(l1^beta)")
            if not self.at("op", "*"):
                break
            self.take("op", "*")
        if beta is None:
            raise ValueError("exp() needs an l1^beta factor")
        if osc is None:
            return ExpPowLog(c, beta)
        if not math.isclose(osc, beta):
            raise ValueError("cos phase must use the same power as the amplitude")
        return ExpOscLog(c, beta)


def _apply_power(base, rho: float):
    if isinstance(base, LogTier) and base.alpha == 1.0:
        return LogTier(base.i, rho)
    if isinstance(base, RawPower) and base.delta == 1.0:
        return RawPower(rho)
    if isinstance(base, Const):
        return Const(base.c ** rho)
    return Power(base, rho)


def parse(text: str) -> SvExpr:
    """Parse the expression grammar described in the module docstring."""
    p = _Parser(text)
    if not p.toks:
        raise ValueError("empty expression")
    e = p.expr()
    if p.pos != len(p.toks):
        raise ValueError(f"trailing input at token {p.pos}: {p.toks[p.pos][1]!r}")
    return e


def _fmt(x: float) -> str:
    # 15 digits when that reads back exactly, else the shortest exact form
    short = f"{x:.15g}"
    return short if float(short) == x else repr(float(x))


def to_text(expr) -> str:
    """Render an expression back into the text grammar."""
    f = _fmt
    if isinstance(expr, Const):
        return f(expr.c)
    if isinstance(expr, LogTier):
        return f"l{expr.i}" if expr.alpha == 1 else f"l{expr.i}^{f(expr.alpha)}"
    if isinstance(expr, BrokenLog):
        return f"broken({f(expr.a0)},{f(expr.ainf)})"
    if isinstance(expr, ExpPowLog):
        return f"exp({f(expr.c)}*l1^{f(expr.beta)})"
    if isinstance(expr, ExpOscLog):
        return f"exp({f(expr.c)}*l1^{f(expr.beta)}*cos(l1^{f(expr.beta)}))"
    if isinstance(expr, Product):
        return " * ".join(_wrap(ch) for ch in expr.children)
    if isinstance(expr, Power):
        return f"({to_text(expr.child)})^{f(expr.rho)}"
    if isinstance(expr, ArgPower):
        return f"argpow({to_text(expr.child)},{f(expr.rho)})"
    if isinstance(expr, RawPower):
        return f"t^{f(expr.delta)}"
    if isinstance(expr, RunningSup):
        return f"sup({to_text(expr.child)})"
    if isinstance(expr, LogIntegral):
        name = "cum" if expr.mode == "outer" else "tail"
        return f"{name}({to_text(expr.child)},{f(expr.q)})"
    raise TypeError(f"not an expression node: {expr!r}")


def _wrap(expr) -> str:
    s = to_text(expr)
    return f"({s})" if isinstance(expr, Product) else s


def as_expr(value) -> SvExpr:
    """Accept an expression node, a grammar string, or a positive number."""
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, (int, float)):
        return Const(float(value))
    return value


def split_raw_power(expr) -> tuple:
    """Factor ``expr`` as ``t**delta * rest`` and return ``(delta, rest)``.

    Keeping the power separate lets callers combine it exactly with
    Jacobians in log coordinates instead of cancelling huge numbers.
    """
    if isinstance(expr, RawPower):
        return expr.delta, Const(1.0)
    if isinstance(expr, Product):
        delta, rest = 0.0, []
        for ch in expr.children:
            d, r = split_raw_power(ch)
            delta += d
            if not (isinstance(r, Const) and r.c == 1.0):
                rest.append(r)
        if not rest:
            return delta, Const(1.0)
        return delta, rest[0] if len(rest) == 1 else Product(tuple(rest))
    if isinstance(expr, Power):
        d, r = split_raw_power(expr.child)
        return d * expr.rho, Power(r, expr.rho)
    if isinstance(expr, ArgPower):
        d, r = split_raw_power(expr.child)
        return d * expr.rho, ArgPower(r, expr.rho)
    return 0.0, expr
