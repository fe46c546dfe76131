"""Calderon operator, Hardy and Volterra operators, and 1-D simulations.

Every operator here acts on step data (or on pieces ``c t**alpha``) and is
evaluated in closed form piece by piece.  The Hilbert transform and the
maximal operator are simulated only where such closed forms exist; their
rearrangements are taken from dense log-spaced samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from .asymcalc import Side, Tag
from .functionals import FinVerdict, conjugate, v_potential
from .lkspaces import StepFunction, rearrange
from .quadnum import NumVerdict, _classify, _Piece, _piece_verdict, log_node_rule, split_weight
from .svfunc import LogCoord


def _recip(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


# ---------------------------------------------------------------------------
# segments and the operator catalog


@dataclass(frozen=True)
class InterpolationSegment:
    """The segment from ``(1/p1, 1/q1)`` to ``(1/p2, 1/q2)``."""

    p1: float
    q1: float
    p2: float
    q2: float

    def __post_init__(self):
        for name in ("p1", "q1", "p2", "q2"):
            v = float(getattr(self, name))
            if not v >= 1:
                raise ValueError(f"{name} must lie in [1, inf]")
            object.__setattr__(self, name, v)
        if not self.p1 < self.p2:
            raise ValueError("need p1 < p2")
        if self.q1 == self.q2:
            raise ValueError("need q1 != q2")

    @property
    def m(self) -> float:
        """Slope ``(1/q1 - 1/q2) / (1/p1 - 1/p2)``."""
        return (_recip(self.q1) - _recip(self.q2)) / (_recip(self.p1) - _recip(self.p2))


@dataclass(frozen=True)
class OperatorProfile:
    """Joint weak type segment and lower-bound classes of an operator.

    ``averaging_only`` marks operators whose rearrangement is dominated by
    the first (averaging) arm of the Calderon operator alone.
    """

    name: str
    segment: InterpolationSegment
    lb1: bool
    lb2: bool
    simulable: bool
    averaging_only: bool = False


def riesz_potential_profile(n: int, gamma: float) -> OperatorProfile:
    """``I_gamma`` on ``R^n``: JW(1, n/(n-gamma); n/gamma, inf)."""
    if not 0 < gamma < n:
        raise ValueError("need 0 < gamma < n")
    seg = InterpolationSegment(1.0, n / (n - gamma), n / gamma, math.inf)
    return OperatorProfile(f"I_{gamma:g} (n={n})", seg, True, True, False)


_UNIT = InterpolationSegment(1.0, 1.0, math.inf, math.inf)

CATALOG: Dict[str, OperatorProfile] = {
    "M": OperatorProfile("maximal operator", _UNIT, True, False, True, averaging_only=True),
    "C": OperatorProfile("conjugate function", _UNIT, True, True, False),
    "H": OperatorProfile("Hilbert transform", _UNIT, True, True, True),
    "R": OperatorProfile("Riesz transforms", _UNIT, True, True, False),
}


def operator_profile(name: str) -> OperatorProfile:
    """Look up ``M``, ``C``, ``H``, ``R`` or ``I:n,gamma``."""
    key = name.strip()
    if key.upper().startswith("I:"):
        n, gamma = key[2:].split(",")
        return riesz_potential_profile(int(n), float(gamma))
    try:
        return CATALOG[key.upper()]
    except KeyError:
        raise ValueError(f"unknown operator {name!r}") from None


# ---------------------------------------------------------------------------
# piecewise data


@dataclass(frozen=True)
class PowerPiece:
    """``c * t**alpha`` on ``(lo, hi)``; the analytic counterpart of a step."""

    c: float
    alpha: float
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.c >= 0 and 0 <= self.lo < self.hi):
            raise ValueError("need c >= 0 and 0 <= lo < hi")


Pieces = Union[StepFunction, Sequence[PowerPiece]]


def _as_power_pieces(g: Pieces) -> Tuple[PowerPiece, ...]:
    if isinstance(g, StepFunction):
        if g.support is not None:
            if any(a < 0 for a, _ in g.support):
                raise ValueError("support must lie in [0, inf)")
            return tuple(PowerPiece(float(h), 0.0, a, b)
                         for (h, _), (a, b) in zip(g.pieces, g.support) if h > 0)
        edges = [float(c) for c in g.breakpoints()]
        return tuple(PowerPiece(float(h), 0.0, a, b)
                     for (h, _), a, b in zip(g.pieces, edges[:-1], edges[1:]) if h > 0)
    return tuple(g)


def _power_integral(c: float, beta: float, lo: float, hi: float) -> float:
    """``int_lo^hi c t**(beta-1) dt`` in closed form (``inf`` if divergent)."""
    if c == 0 or not hi > lo:
        return 0.0
    if beta == 0:
        if lo == 0 or math.isinf(hi):
            return math.inf
        return c * math.log(hi / lo)
    if (lo == 0 and beta < 0) or (math.isinf(hi) and beta > 0):
        return math.inf
    up = 0.0 if math.isinf(hi) else hi ** beta
    down = 0.0 if lo == 0 else lo ** beta
    return c * (up - down) / beta


def _clipped_integral(pieces, kappa: float, lo: float, hi: float) -> float:
    """``int_lo^hi t**(kappa-1) g(t) dt`` over power pieces."""
    total = 0.0
    for pc in pieces:
        a, b = max(pc.lo, lo), min(pc.hi, hi)
        if b > a:
            total += _power_integral(pc.c, pc.alpha + kappa, a, b)
    return total


def _as_x(x) -> float:
    if isinstance(x, LogCoord):
        return math.exp(x.log_t)
    return float(x)


# ---------------------------------------------------------------------------
# Calderon and Hardy operators


def calderon_values(sigma: InterpolationSegment, g: Pieces, xs) -> np.ndarray:
    """``S_sigma g`` at every ``x`` in ``xs`` (``inf`` where it diverges)."""
    pcs = _as_power_pieces(g)
    xs = np.atleast_1d(np.asarray([_as_x(x) for x in np.atleast_1d(xs)], dtype=float))
    if np.any(xs <= 0):
        raise ValueError("x must be positive")
    k1, k2 = _recip(sigma.p1), _recip(sigma.p2)
    e1, e2 = _recip(sigma.q1), _recip(sigma.q2)
    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        xm = x ** sigma.m
        lower = _clipped_integral(pcs, k1, 0.0, xm)
        upper = _clipped_integral(pcs, k2, xm, math.inf)
        out[i] = (x ** -e1 * lower if lower else 0.0) + (x ** -e2 * upper if upper else 0.0)
    return out


def calderon_apply(sigma: InterpolationSegment, g: Pieces, x) -> NumVerdict:
    """``x**(-1/q1) int_0^{x^m} t**(1/p1-1) g + x**(-1/q2) int_{x^m}^inf t**(1/p2-1) g``.

    Infinite means ``g`` is outside the domain of ``S_sigma`` at this ``x``.
    """
    v = float(calderon_values(sigma, g, [x])[0])
    if math.isinf(v):
        return NumVerdict(Tag.INFINITE, notes=("an integral of S_sigma g diverges",))
    return NumVerdict(Tag.FINITE, value=v, abs_err=0.0, rel_err=0.0)


def hardy_apply(variant: str, kappa: float, g: Pieces, t: float, A: float = 0.0,
                B: float = math.inf) -> NumVerdict:
    """``int_A^t u**(kappa-1) g(u) du`` (lower) or ``int_t^B`` (upper)."""
    pcs = _as_power_pieces(g)
    t = _as_x(t)
    if variant == "lower":
        v = _clipped_integral(pcs, kappa, A, t)
    elif variant == "upper":
        v = _clipped_integral(pcs, kappa, t, B)
    else:
        raise ValueError("variant must be 'lower' or 'upper'")
    if math.isinf(v):
        return NumVerdict(Tag.INFINITE, notes=(f"{variant} Hardy integral diverges",))
    return NumVerdict(Tag.FINITE, value=v, abs_err=0.0, rel_err=0.0)


def running_average(fstar: StepFunction, xs) -> np.ndarray:
    """``x**-1 int_0^x f*`` (exact on steps)."""
    edges = np.array([float(c) for c in fstar.breakpoints()])
    heights = np.array([float(h) for h, _ in fstar.pieces])
    cum = np.concatenate([[0.0], np.cumsum(heights * np.diff(edges))])
    xs = np.asarray(xs, dtype=float)
    return _primitive(edges, heights, cum, xs) / xs


def _primitive(edges, heights, cum, xs):
    k = np.clip(np.searchsorted(edges, xs, side="right") - 1, 0, len(heights))
    base = cum[np.minimum(k, len(cum) - 1)]
    h = np.where(k < len(heights), heights[np.minimum(k, len(heights) - 1)], 0.0)
    start = edges[np.minimum(k, len(edges) - 1)]
    return base + np.where(k < len(heights), h * (xs - start), 0.0)


# ---------------------------------------------------------------------------
# Hilbert transform and maximal operator


def _intervals(f: StepFunction) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if f.support is not None:
        a = np.array([s[0] for s in f.support])
        b = np.array([s[1] for s in f.support])
    else:
        edges = np.array([float(c) for c in f.breakpoints()])
        a, b = edges[:-1], edges[1:]
    h = np.array([float(p[0]) for p in f.pieces])
    return a, b, h


def hilbert_values(f: StepFunction, xs, signs: Optional[Sequence[float]] = None) -> np.ndarray:
    """``(1/pi) sum_i h_i log|x - a_i| / |x - b_i|`` at each ``x``.

    ``signs`` (one per piece, default all +1) allows real-valued data such
    as odd functions.  Endpoints give ``+-inf``; use ``hilbert_apply`` for
    the shifted evaluation.
    """
    a, b, h = _intervals(f)
    if signs is not None:
        h = h * np.asarray(signs, dtype=float)
    xs = np.asarray(xs, dtype=float)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = h * (np.log(np.abs(xs - a)) - np.log(np.abs(xs - b)))
    terms = np.where(h == 0, 0.0, terms)
    return terms.sum(axis=1) / math.pi


def hilbert_apply(f: StepFunction, x: float, signs=None) -> NumVerdict:
    """Principal value of the Hilbert transform of step data at ``x``."""
    a, b, _ = _intervals(f)
    notes = ()
    if np.any(np.isclose(x, np.concatenate([a, b]), rtol=0, atol=1e-15)):
        delta = 1e-9 * max(1.0, abs(x))
        x = x + delta
        notes = (f"x is an endpoint; evaluated at x + {delta:.1e}",)
    v = float(hilbert_values(f, [x], signs)[0])
    return NumVerdict(Tag.FINITE, value=v, abs_err=0.0, rel_err=0.0, notes=notes)


def maximal_values(f: StepFunction, xs) -> np.ndarray:
    """Uncentred maximal function on ``Omega = (0, 1)`` by endpoint enumeration.

    For fixed ``x`` the average over ``[u, v]`` is monotone in each
    endpoint while it stays inside one piece, so the supremum is attained
    with ``u`` and ``v`` at piece boundaries or shrinking to ``x``.
    """
    a, b, h = _intervals(f)
    if np.any(a < 0) or np.any(b > 1 + 1e-12):
        raise ValueError("the maximal operator is modelled on Omega = (0, 1)")
    edges = np.unique(np.concatenate([[0.0, 1.0], a, b]))
    mids = 0.5 * (edges[:-1] + edges[1:])
    vals = np.zeros(len(mids))
    for ai, bi, hi in zip(a, b, h):
        vals += np.where((mids > ai) & (mids < bi), hi, 0.0)
    cum = np.concatenate([[0.0], np.cumsum(vals * np.diff(edges))])
    out = np.empty(len(np.atleast_1d(xs)))
    for i, x in enumerate(np.atleast_1d(np.asarray(xs, dtype=float))):
        if not 0 < x < 1:
            raise ValueError("x must lie in (0, 1)")
        us = np.concatenate([edges[edges <= x], [x]])
        vs = np.concatenate([edges[edges >= x], [x]])
        Fu = _primitive(edges, vals, cum, us)
        Fv = _primitive(edges, vals, cum, vs)
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = (Fv[None, :] - Fu[:, None]) / (vs[None, :] - us[:, None])
        avg = np.where(vs[None, :] > us[:, None], avg, -np.inf)
        k = np.searchsorted(edges, x, side="right") - 1
        local = [vals[min(k, len(vals) - 1)]]
        if edges[k] == x and k > 0:
            local.append(vals[k - 1])
        out[i] = max(float(np.max(avg)), max(local))
    return out


def maximal_apply(f: StepFunction, x: float) -> float:
    return float(maximal_values(f, [x])[0])


# ---------------------------------------------------------------------------
# sampling and joint weak type


@dataclass(frozen=True)
class SampledRearrangement:
    """``|Tf|`` sampled on cells and rearranged; ``density`` is per decade."""

    fstar: StepFunction
    density: int
    span: Tuple[float, float]
    notes: Tuple[str, ...] = ()


def sample_grid(breakpoints: Sequence[float], lo: float = 1e-6, hi: float = 1e6,
                per_decade: int = 64, domain: Tuple[float, float] = (-math.inf, math.inf)):
    """Cell edges log-refined toward every breakpoint and toward infinity."""
    offs = np.logspace(math.log10(lo), math.log10(hi), int(round(per_decade * math.log10(hi / lo))) + 1)
    pts = [np.asarray(breakpoints, dtype=float)]
    for c in breakpoints:
        pts += [c - offs, c + offs]
    pts += [-offs, offs]
    x = np.unique(np.concatenate(pts))
    x = x[(x >= domain[0]) & (x <= domain[1])]
    span = float(np.max(np.abs(breakpoints))) if len(breakpoints) else 0.0
    x = x[np.abs(x) <= hi + span]
    return x


def sample_rearrangement(fn: Callable[[np.ndarray], np.ndarray], edges: np.ndarray,
                         density: int = 64) -> SampledRearrangement:
    """Rearrange ``|fn|`` sampled at cell midpoints of ``edges``."""
    edges = np.asarray(edges, dtype=float)
    mids = 0.5 * (edges[:-1] + edges[1:])
    vals = np.abs(np.asarray(fn(mids), dtype=float))
    keep = np.isfinite(vals) & (vals > 0)
    pieces = tuple(zip(vals[keep].tolist(), np.diff(edges)[keep].tolist()))
    f = rearrange(StepFunction(pieces)) if pieces else StepFunction(((0.0, 1.0),))
    return SampledRearrangement(f, density, (float(edges[0]), float(edges[-1])),
                                (f"sampled at {density} points per decade",))


def hilbert_rearrangement(f: StepFunction, lo: float = 1e-6, hi: float = 1e6,
                          per_decade: int = 64, signs=None) -> SampledRearrangement:
    a, b, _ = _intervals(f)
    edges = sample_grid(np.unique(np.concatenate([a, b])), lo, hi, per_decade)
    return sample_rearrangement(lambda x: hilbert_values(f, x, signs), edges, per_decade)


def maximal_rearrangement(f: StepFunction, per_decade: int = 64) -> SampledRearrangement:
    a, b, _ = _intervals(f)
    edges = sample_grid(np.unique(np.concatenate([a, b, [0.0, 1.0]])), 1e-9, 1.0,
                        per_decade, domain=(0.0, 1.0))
    return sample_rearrangement(lambda x: maximal_values(f, x), edges, per_decade)


@dataclass(frozen=True)
class JWReport:
    """``max_x (Tf)*(x) / S_sigma f*(x)`` over a grid."""

    sup_ratio: float
    argmax: Optional[float]
    ratios: Tuple[float, ...]
    in_domain: bool
    notes: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"sup_ratio": self.sup_ratio, "argmax": self.argmax,
                "in_domain": self.in_domain, "notes": list(self.notes)}


def joint_weak_check(Tf: Union[StepFunction, SampledRearrangement], sigma: InterpolationSegment,
                     f: StepFunction, grid) -> JWReport:
    """Compare ``(Tf)*`` with ``S_sigma f*`` on ``grid`` (``0/0 := 0``)."""
    notes = []
    if isinstance(Tf, SampledRearrangement):
        notes.extend(Tf.notes)
        Tf = Tf.fstar
    fstar = rearrange(f)
    if all(h == 0 for h, _ in fstar.pieces) or not fstar.pieces:
        grid = np.asarray(grid, dtype=float)
        return JWReport(0.0, None, tuple(np.zeros(len(grid))), True, ("f = 0",))
    at_one = calderon_values(sigma, fstar, [1.0])[0]
    if not math.isfinite(at_one):
        return JWReport(math.nan, None, (), False,
                        tuple(notes) + ("S_sigma f*(1) = inf: f is outside the domain",))
    grid = np.asarray(grid, dtype=float)
    tstar = Tf.values(grid)
    s = calderon_values(sigma, fstar, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(tstar == 0, 0.0, tstar / s)
    k = int(np.argmax(ratios))
    return JWReport(float(ratios[k]), float(grid[k]), tuple(ratios.tolist()), True,
                    tuple(notes))


# ---------------------------------------------------------------------------
# Volterra operators with log-type kernels


@dataclass(frozen=True)
class LogWeight:
    """``t**delta * exp(rest(Y, side))`` with ``Y = |log t|``."""

    delta: float
    rest: Callable

    @classmethod
    def of(cls, obj) -> "LogWeight":
        if isinstance(obj, LogWeight):
            return obj
        d, rest = split_weight(obj)
        return cls(float(d), rest)

    def log_at_u(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = np.empty(u.shape)
        neg = u < 0
        if neg.any():
            out[neg] = self.rest(-u[neg], Side.ZERO)
        if (~neg).any():
            out[~neg] = self.rest(u[~neg], Side.INF)
        return out + self.delta * u

    def power(self, e: float) -> "LogWeight":
        rest = self.rest
        return LogWeight(self.delta * e, lambda Y, s: e * rest(Y, s))


@dataclass(frozen=True)
class VolterraKernel:
    """``log-ratio``: ``k(t,u) = log(t/u)`` for ``u < t``.

    ``indicator-power``: ``k(t,u) = u**-1`` for ``u > t``, i.e. the operator
    ``g -> int_t^B u**-1 g(u) du``; it is reduced to a Volterra operator with
    kernel 1 by duality.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in ("log-ratio", "indicator-power", "hardy"):
            raise ValueError("kernel kind must be 'log-ratio', 'indicator-power' or 'hardy'")

    def value(self, log_t, log_u):
        """``k(t, u)`` from ``log t`` and ``log u``; exact for rational inputs."""
        if self.kind == "log-ratio":
            return log_t - log_u
        if self.kind == "hardy":
            return 1
        return math.exp(-log_u)

    def log_k(self, t_u: np.ndarray, u_u: np.ndarray) -> np.ndarray:
        """``log k`` at signed log coordinates with ``t > u``."""
        if self.kind == "log-ratio":
            with np.errstate(divide="ignore"):
                return np.log(t_u - u_u)
        return np.zeros(np.broadcast(t_u, u_u).shape)


_VOLT_YMAX = 2.0 ** 46
_VOLT_XMAX = 2.0 ** 40
_VOLT_PER_DECADE = 16


class _LineMesh:
    """Gauss nodes on the signed log line ``u = log t`` over ``(0, B)``."""

    def __init__(self, B: float):
        n_dec = int(math.ceil(math.log10(_VOLT_YMAX) + 3))
        e = np.concatenate([[0.0], np.logspace(-3, math.log10(_VOLT_YMAX),
                                                n_dec * _VOLT_PER_DECADE)])
        Y, lw = log_node_rule(e, 8)
        zero_u = (-Y)[::-1]
        zero_lw = lw[::-1]
        zero_edges = (-e)[::-1]
        if math.isinf(B):
            self.u = np.concatenate([zero_u[:, ::-1], Y])
            self.lw = np.concatenate([zero_lw[:, ::-1], lw])
            self.edges = np.concatenate([zero_edges, e[1:]])
        else:
            self.u = zero_u[:, ::-1]
            self.lw = zero_lw[:, ::-1]
            self.edges = zero_edges
        # interior panel boundaries are the x-points
        self.x = self.edges[1:-1]


def _cum_log(vals: np.ndarray, reverse: bool) -> np.ndarray:
    """Log of the sums over all panels below (or above) each boundary."""
    per = logsumexp(vals, axis=1)
    if reverse:
        acc = np.logaddexp.accumulate(per[::-1])[::-1]
        return acc[1:]  # panels from boundary k onwards
    acc = np.logaddexp.accumulate(per)
    return acc[:-1]  # panels below boundary k


def _kernel_log_norm(mesh: _LineMesh, logw: np.ndarray, p: float, kernel: VolterraKernel,
                     above: bool) -> np.ndarray:
    """``p log ||w k||_p`` over ``(x, B)`` (above) or ``(0, x)`` for each x-point."""
    u = mesh.u.ravel()
    base = (p * logw + mesh.u + mesh.lw).ravel()
    out = np.empty(len(mesh.x))
    n = mesh.u.shape[1]
    for k, x in enumerate(mesh.x):
        sl = slice((k + 1) * n, None) if above else slice(0, (k + 1) * n)
        uu = u[sl]
        lk = kernel.log_k(uu, x) if above else kernel.log_k(x, uu)
        out[k] = logsumexp(base[sl] + p * lk)
    return out


def _gate(weight: LogWeight, side: Side, p: float, with_log: bool) -> Tag:
    """Convergence of ``||weight [* l1]||_p`` at one endpoint (measure dt)."""
    rest = weight.rest
    if with_log:
        fn = lambda Y, s: rest(Y, s) + np.log1p(Y)  # noqa: E731
    else:
        fn = rest
    res = _piece_verdict(fn, weight.delta, 1.0, _Piece(side, 1.0, math.inf), p, 1e-6)
    return res[0]


def _classify_side(mesh: _LineMesh, logF: np.ndarray, side: Side, rho: Optional[float]) -> Tag:
    x = mesh.x
    on = x < 0 if side is Side.ZERO else x > 0
    Yx = np.abs(x)
    Ys = 2.0 ** np.arange(0, int(math.log2(_VOLT_XMAX)) + 1)
    logP = np.empty(len(Ys))
    if rho is None:
        for i, Yk in enumerate(Ys):
            sel = (~on) | (Yx <= Yk)
            logP[i] = np.max(logF[sel])
    else:
        # trapezoid in u of F**rho dx = F**rho e^u du
        du = np.gradient(x)
        vals = rho * logF + x + np.log(np.abs(du))
        for i, Yk in enumerate(Ys):
            sel = (~on) | (Yx <= Yk)
            logP[i] = logsumexp(vals[sel])
    if np.any(np.isnan(logP)):
        return Tag.INCONCLUSIVE
    if logP[-1] == np.inf:
        return Tag.INFINITE
    return _classify(Ys, logP, 1e-6)[0]


def _condition(mesh, logF, sides, rho, label, notes) -> FinVerdict:
    tags = [_classify_side(mesh, logF, s, rho) for s in sides]
    if Tag.INFINITE in tags:
        tag = Tag.INFINITE
    elif Tag.INCONCLUSIVE in tags:
        tag = Tag.INCONCLUSIVE
    else:
        tag = Tag.FINITE
    value = None
    if tag is Tag.FINITE:
        lv = float(np.max(logF)) if rho is None else float(
            logsumexp(rho * logF + mesh.x + np.log(np.abs(np.gradient(mesh.x))))) / rho
        value = math.exp(lv) if lv < 709 else None
    return FinVerdict(tag, "numeric", label, value=value, notes=tuple(notes))


def volterra_conditions(kernel: Union[VolterraKernel, str], v, w, r: float, s: float,
                        B: float = 1.0) -> FinVerdict:
    """Decide ``||w Vg||_{s,(0,B)} <~ ||v g||_{r,(0,B)}`` for ``1 < r, s < inf``.

    ``v`` and ``w`` are expressions (raw powers of ``t`` allowed), numbers,
    callables ``(Y, side) -> log weight`` or ``LogWeight`` values.  For
    ``r <= s`` the two suprema are evaluated, for ``s < r`` the two
    ``rho``-norms; Finite iff both conditions hold.  Inner norms are
    computed on a Gauss mesh in ``log t`` and the outer supremum or norm is
    judged by the doubling protocol as ``x`` approaches each endpoint.
    """
    if isinstance(kernel, str):
        kernel = VolterraKernel(kernel)
    r, s = float(r), float(s)
    if not (1 < r < math.inf and 1 < s < math.inf):
        raise ValueError("Volterra conditions need 1 < r, s < inf")
    if B not in (1, 1.0, math.inf):
        raise ValueError("B must be 1 or inf")
    v, w = LogWeight.of(v), LogWeight.of(w)
    if kernel.kind == "indicator-power":
        # || w int_t^B u^-1 g ||_s <~ || v g ||_r  is dual to a Volterra
        # operator with kernel 1 and weights ((t v)^-1, w^-1), exponents (s', r')
        tv = LogWeight(v.delta + 1.0, v.rest)
        res = volterra_conditions(VolterraKernel("hardy"), w.power(-1.0), tv.power(-1.0),
                                  conjugate(s), conjugate(r), B)
        return FinVerdict(res.tag, res.method, "volterra", value=res.value,
                          notes=res.notes + ("reduced by duality to a kernel-1 operator",),
                          components=res.components)
    rp = conjugate(r)
    log_kernel = kernel.kind == "log-ratio"
    sides = (Side.ZERO, Side.INF) if math.isinf(B) else (Side.ZERO,)
    vinv = v.power(-1.0)
    # the inner norms must converge at the far endpoints
    gates = {"first": [(vinv, Side.ZERO, rp, False)], "second": [(vinv, Side.ZERO, rp, log_kernel)]}
    if math.isinf(B):
        gates["first"].append((w, Side.INF, s, log_kernel))
        gates["second"].append((w, Side.INF, s, False))
    mesh = _LineMesh(B)
    lw_w = w.log_at_u(mesh.u)
    lw_vinv = vinv.log_at_u(mesh.u)
    rho = None if r <= s else 1.0 / (1.0 / s - 1.0 / r)
    comps = {}
    for name in ("first", "second"):
        bad = [g for g in gates[name] if _gate(*g) is not Tag.FINITE]
        if bad:
            comps[name] = FinVerdict(Tag.INFINITE, "numeric", name,
                                     notes=("an inner norm diverges for every x",))
            continue
        if name == "first":
            A = _kernel_log_norm(mesh, lw_w, s, kernel, above=True) / s      # ||w k(.,x)||
            C = _cum_log(rp * lw_vinv + mesh.u + mesh.lw, reverse=False) / rp  # ||v^-1||_(0,x)
            if rho is None:
                logF = A + C
            else:
                lvx = -vinv.log_at_u(mesh.x)  # log v(x)
                logF = -(rp / rho) * lvx + A + (rp / conjugate(s)) * C
        else:
            A = _cum_log(s * lw_w + mesh.u + mesh.lw, reverse=True) / s       # ||w||_(x,B)
            C = _kernel_log_norm(mesh, lw_vinv, rp, kernel, above=False) / rp  # ||v^-1 k(x,.)||
            if rho is None:
                logF = A + C
            else:
                lwx = w.log_at_u(mesh.x)
                logF = (s / rho) * lwx + (s / r) * A + C
        notes = [f"mesh to |log t| = 2^46, x up to 2^40, {_VOLT_PER_DECADE} panels per decade"]
        comps[name] = _condition(mesh, logF, sides, rho, name, notes)
    tags = [c.tag for c in comps.values()]
    if Tag.INFINITE in tags:
        tag = Tag.INFINITE
    elif Tag.INCONCLUSIVE in tags:
        tag = Tag.INCONCLUSIVE
    else:
        tag = Tag.FINITE
    return FinVerdict(tag, "numeric", "volterra", components=comps,
                      notes=("case r <= s: two suprema" if rho is None
                             else "case s < r: two rho-norms",))


def dual_hardy_weights(a, b, r: float, s: float, interval=(0.0, 1.0)):
    """Weights and exponents of the dual log-kernel inequality for given ``a, b, r, s``.

    Returns ``(v, w, r_new, s_new)`` with ``w = t^(-1/r') a^(r/r') / V`` and
    ``v = t^(1/s) / b`` and exponents ``(s', r')``; ``V(t) = int_0^t u^-1 a^r``.
    """
    rp = conjugate(r)
    V = v_potential(a, r, interval)
    if V.infinite:
        raise ValueError("V is infinite: a^r is not integrable near 0")
    la = LogWeight.of(a)
    lb = LogWeight.of(b)
    w = LogWeight(-1.0 / rp + la.delta * r / rp,
                  lambda Y, sd: (r / rp) * la.rest(Y, sd) - V.log_eval(Y, sd))
    v = LogWeight(1.0 / s - lb.delta, lambda Y, sd: -lb.rest(Y, sd))
    return v, w, conjugate(s), rp
