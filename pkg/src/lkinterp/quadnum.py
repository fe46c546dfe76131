"""Numeric weighted norms in log coordinates with divergence detection.

On ``(0, 1)`` the substitution ``t = exp(-y)`` and on ``(1, inf)`` the
substitution ``t = exp(y)`` turn ``||f||_r`` into an integral over
``y >= 0`` whose integrand ``exp(r log f + log t)`` is smooth.  Panels are
``[2**(k-1), 2**k]`` in ``y``, integrated in ``z = log y`` with
Gauss-Legendre rules and bisected where two rule orders disagree.  Partial
integrals are accumulated in log space so that nothing overflows.

An improper integral is judged from its partials at ``Y_max = 2**k``:

* Finite when the last two doublings move it by less than ``tol``;
* Infinite when each of the last three doublings grows it by ``>= 1.05``;
* otherwise the log-log slope over the last four doublings decides
  (``>= 0.01`` Infinite, ``< 0.001`` with convergence Finite).

Iterated-log integrands move so slowly that a window ending at ``2**40``
can mislead in both directions (a large ``l_2`` power looks divergent long
before it converges, a small one looks convergent long before it
diverges).  Partials are therefore carried to ``2**996`` (``Y`` about
``1e300``) and the rules are applied there; a note records when the
``2**40`` window alone would have disagreed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from .asymcalc import EndpointSymbol, Side, Tag, parse_side

GROWTH_THRESHOLD = 1.05
SLOPE_INFINITE = 0.01
SLOPE_FINITE = 0.001
FIRST_DOUBLING = 6
STANDARD_LAST = 40
DEEP_LAST = 996

_NODES = {n: np.polynomial.legendre.leggauss(n) for n in (16, 32)}


def as_log_fn(obj) -> Callable:
    """Normalise a weight into ``f(Y, side) -> log value`` (vectorised)."""
    return split_weight(obj)[1] if not _has_tilt(obj) else _full_log_fn(obj)


def _has_tilt(obj) -> bool:
    return split_weight(obj)[0] != 0.0


def _full_log_fn(obj) -> Callable:
    delta, rest = split_weight(obj)
    return lambda Y, side: rest(Y, side) + delta * parse_side(side).sign * np.asarray(Y)


def split_weight(obj) -> Tuple[float, Callable]:
    """Return ``(delta, log_rest)`` with ``weight = t**delta * exp(log_rest)``."""
    if obj is None:
        return 0.0, lambda Y, side: np.zeros(np.shape(Y))
    if isinstance(obj, EndpointSymbol):
        rest = EndpointSymbol(obj.side, obj.coeff, obj.exponents)
        return obj.tilt, lambda Y, side: rest.log_value(Y)
    if isinstance(obj, (int, float)):
        c = math.log(float(obj))
        return 0.0, lambda Y, side: np.full(np.shape(Y), c)
    from .svfunc import log_eval, parse, split_raw_power
    if isinstance(obj, str):
        obj = parse(obj)
    if callable(obj) and not hasattr(obj, "__dataclass_fields__"):
        return 0.0, obj
    delta, rest = split_raw_power(obj)
    return delta, lambda Y, side: log_eval(rest, Y, side)


@dataclass(frozen=True)
class NormSpec:
    """``||weight * integrand||_{r, interval}``.

    ``measure`` is ``"dt"`` (Lebesgue) or ``"dt/t"``.  Raw powers of ``t``
    inside the weight are combined exactly with the change of variables.
    """

    r: float
    interval: Tuple[float, float] = (0.0, 1.0)
    weight: object = None
    integrand: object = None
    measure: str = "dt"

    def __post_init__(self):
        if not self.r >= 1:
            raise ValueError("r must be >= 1")
        if self.measure not in ("dt", "dt/t"):
            raise ValueError("measure must be 'dt' or 'dt/t'")
        object.__setattr__(self, "interval", parse_interval(self.interval))

    def parts(self) -> Tuple[float, Callable]:
        d1, w = split_weight(self.weight)
        d2, g = split_weight(self.integrand)
        return d1 + d2, lambda Y, side: w(Y, side) + g(Y, side)


def parse_interval(interval) -> Tuple[float, float]:
    if isinstance(interval, str):
        key = interval.replace(" ", "").lower()
        table = {"(0,1)": (0.0, 1.0), "(1,inf)": (1.0, math.inf),
                 "(1,∞)": (1.0, math.inf), "(0,inf)": (0.0, math.inf),
                 "(0,∞)": (0.0, math.inf)}
        if key not in table:
            raise ValueError(f"unknown interval {interval!r}")
        return table[key]
    lo, hi = (float(v) for v in interval)
    if not 0 <= lo < hi:
        raise ValueError("interval must satisfy 0 <= A < B")
    return lo, hi


@dataclass(frozen=True)
class NumVerdict:
    tag: Tag
    value: Optional[float] = None
    abs_err: Optional[float] = None
    rel_err: Optional[float] = None
    growth: Tuple[float, ...] = ()
    slope: Optional[float] = None
    trend: Tuple[Tuple[float, float], ...] = ()
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def finite(self) -> bool:
        return self.tag is Tag.FINITE


# ---------------------------------------------------------------------------
# panel quadrature


def _panel_log_integrals(logf: Callable, side: Side, lo: np.ndarray, hi: np.ndarray,
                         jac: int, n: int = 32) -> Tuple[np.ndarray, np.ndarray]:
    """Log of ``int exp(logf(y) + jac*y) dy`` over each ``[lo, hi]``.

    Panels with ``lo > 0`` are integrated in ``z = log y``.  Returns the log
    integrals and a relative error estimate from comparing two rule orders.
    """
    out = np.empty(lo.shape)
    err = np.zeros(lo.shape)
    for k, (nodes, weights) in enumerate((_NODES[n // 2], _NODES[n])):
        use_z = lo > 0
        a = np.where(use_z, np.log(np.where(use_z, lo, 1.0)), lo)
        b = np.where(use_z, np.log(np.where(use_z, hi, 1.0)), hi)
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        x = mid[:, None] + half[:, None] * nodes[None, :]
        y = np.where(use_z[:, None], np.exp(x), x)
        g = logf(y, side) + jac * y
        g = np.where(use_z[:, None], g + x, g)
        g = np.where(np.isnan(g), -np.inf, g)
        lw = np.log(weights)[None, :] + np.log(half)[:, None]
        vals = logsumexp(g + lw, axis=1)
        if k == 0:
            coarse = vals
        else:
            out = vals
            with np.errstate(invalid="ignore", over="ignore"):
                err = np.abs(np.expm1(np.clip(coarse - vals, -700, 700)))
            err = np.where(np.isneginf(vals), 0.0, err)
    return out, err


def _adaptive_log_integrals(logf, side, lo, hi, jac, rel_tol, depth=0, floor=None):
    vals, err = _panel_log_integrals(logf, side, lo, hi, jac)
    if floor is None:
        top = np.max(vals[np.isfinite(vals)]) if np.any(np.isfinite(vals)) else -np.inf
        # panels this far below the largest one cannot move any partial sum
        floor = top - 80.0
    bad = (err > rel_tol) & (np.maximum(vals, np.log(np.abs(err) + 1e-300) + vals) > floor)
    bad &= np.isfinite(vals) | np.isnan(vals)
    if depth >= 12 or not bad.any():
        return vals, err
    lb, hb = lo[bad], hi[bad]
    with np.errstate(divide="ignore"):
        mid = np.where(lb > 0, np.exp(0.5 * (np.log(lb) + np.log(hb))), 0.5 * (lb + hb))
    v1, e1 = _adaptive_log_integrals(logf, side, lb, mid, jac, rel_tol, depth + 1, floor)
    v2, e2 = _adaptive_log_integrals(logf, side, mid, hb, jac, rel_tol, depth + 1, floor)
    vals = vals.copy()
    err = err.copy()
    vals[bad] = np.logaddexp(v1, v2)
    err[bad] = np.maximum(e1, e2)
    return vals, err


def log_integral_segments(logf: Callable, side, edges: Sequence[float],
                          jac: Optional[float] = None, rel_tol: float = 1e-10):
    """Log integrals of ``exp(logf(Y) + jac*Y) dY`` between consecutive edges.

    ``edges`` are increasing values of ``Y = |log t|`` on one side.  With the
    default ``jac`` the measure is ``dt``; pass ``0`` for ``dt/t``.
    """
    side = parse_side(side)
    if jac is None:
        jac = float(side.sign)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    if np.any(hi <= lo):
        raise ValueError("edges must be strictly increasing")
    # every z-panel at most log 2 wide, with [0, 1] split off
    simple = (lo >= 1) & (hi <= 2 * lo) | (hi <= 1)
    pieces_lo, pieces_hi, owner = [lo[simple]], [hi[simple]], [np.flatnonzero(simple)]
    for i in np.flatnonzero(~simple):
        a, b = lo[i], hi[i]
        cuts = [a]
        if a < 1:
            cuts.append(1.0)
        c = 2.0 * cuts[-1]
        while c < b:
            cuts.append(c)
            c *= 2.0
        cuts.append(b)
        cuts = np.array(cuts)
        keep = cuts[1:] > cuts[:-1]
        pieces_lo.append(cuts[:-1][keep])
        pieces_hi.append(cuts[1:][keep])
        owner.append(np.full(int(keep.sum()), i))
    plo, phi, own = (np.concatenate(v) for v in (pieces_lo, pieces_hi, owner))
    vals, err = _adaptive_log_integrals(logf, side, plo, phi, jac, rel_tol)
    out = np.full(len(lo), -np.inf)
    out_err = np.zeros(len(lo))
    order = np.argsort(own, kind="stable")
    own, vals, err = own[order], vals[order], err[order]
    starts = np.flatnonzero(np.r_[True, own[1:] != own[:-1]])
    for st, en in zip(starts, np.r_[starts[1:], len(own)]):
        i = own[st]
        out[i] = logsumexp(vals[st:en]) if en - st > 1 else vals[st]
        out_err[i] = float(np.max(err[st:en]))
    return out, out_err


def log_node_rule(edges: Sequence[float], n: int = 8) -> Tuple[np.ndarray, np.ndarray]:
    """Fixed Gauss-Legendre nodes and log weights for ``dY`` on each panel.

    Returns arrays of shape ``(len(edges) - 1, n)``.  Panels with a positive
    left edge are mapped through ``z = log Y``; the Jacobian is folded into
    the weights.  Useful when many integrands share one mesh.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    if np.any(hi <= lo):
        raise ValueError("edges must be strictly increasing")
    nodes, weights = np.polynomial.legendre.leggauss(n)
    use_z = lo > 0
    with np.errstate(divide="ignore"):
        a = np.where(use_z, np.log(np.where(use_z, lo, 1.0)), lo)
        b = np.where(use_z, np.log(np.where(use_z, hi, 1.0)), hi)
    half = 0.5 * (b - a)
    x = 0.5 * (a + b)[:, None] + half[:, None] * nodes[None, :]
    Y = np.where(use_z[:, None], np.exp(x), x)
    lw = np.log(weights)[None, :] + np.log(half)[:, None]
    lw = np.where(use_z[:, None], lw + x, lw)
    return Y, lw


def _log_sup_segments(logf: Callable, side, edges: Sequence[float], per_panel: int = 64):
    side = parse_side(side)
    edges = np.asarray(edges, dtype=float)
    out = np.empty(len(edges) - 1)
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        if a > 0:
            ys = np.exp(np.linspace(math.log(a), math.log(b), per_panel))
        else:
            ys = np.concatenate([np.linspace(0.0, min(b, 1.0), per_panel),
                                 np.exp(np.linspace(0.0, math.log(b), per_panel))
                                 if b > 1 else []])
        g = logf(ys, side)
        g = np.where(np.isnan(g), -np.inf, g)
        out[i] = float(np.max(g))
    return out


# ---------------------------------------------------------------------------
# classification


def _slope(Ys: np.ndarray, logP: np.ndarray) -> float:
    x = np.log(Ys)
    return float(np.polyfit(x, logP, 1)[0])


def _classify(Ys, logP, tol: float, growth_window: int = 3):
    """Apply the doubling protocol to log partials; return tag and data."""
    inc = np.minimum(np.diff(logP), 700.0)
    ratios = np.exp(inc)
    growth = tuple(float(v) for v in ratios[-growth_window:])
    rel_change = np.expm1(inc)
    slope = _slope(Ys[-5:], logP[-5:]) if len(Ys) >= 5 else None
    cauchy = len(rel_change) >= 2 and np.all(np.abs(rel_change[-2:]) <= tol)
    if cauchy:
        return Tag.FINITE, growth, slope
    if len(ratios) >= growth_window and np.all(ratios[-growth_window:] >= GROWTH_THRESHOLD):
        return Tag.INFINITE, growth, slope
    if slope is not None and slope >= SLOPE_INFINITE:
        return Tag.INFINITE, growth, slope
    if slope is not None and abs(slope) < SLOPE_FINITE and abs(rel_change[-1]) <= tol:
        return Tag.FINITE, growth, slope
    return Tag.INCONCLUSIVE, growth, slope


def detect_divergence(partials, tol: float = 1e-6) -> NumVerdict:
    """Classify a non-decreasing partial-value sequence by its log-log trend.

    ``partials`` is either a callable ``Y -> partial`` (sampled at
    ``Y = 2**6 .. 2**40``) or a sequence of ``(Y, partial)`` pairs taken
    at successive doublings.
    """
    if callable(partials):
        Ys = 2.0 ** np.arange(FIRST_DOUBLING, STANDARD_LAST + 1)
        P = np.array([float(partials(y)) for y in Ys])
    else:
        arr = np.asarray(list(partials), dtype=float)
        Ys, P = arr[:, 0], arr[:, 1]
    if len(P) < 5:
        raise ValueError("need at least five doublings")
    if np.any(np.diff(P) < -1e-12 * np.abs(P[1:])):
        raise ValueError("partials must be non-decreasing; check the integrand sign")
    if np.any(P <= 0):
        raise ValueError("partials must be positive")
    logP = np.log(P)
    slope = _slope(Ys[-5:], logP[-5:])
    rel = abs(math.expm1(logP[-1] - logP[-2]))
    trend = tuple(zip(Ys.tolist(), P.tolist()))
    if slope >= SLOPE_INFINITE:
        return NumVerdict(Tag.INFINITE, slope=slope, trend=trend)
    if abs(slope) < SLOPE_FINITE and rel <= tol:
        return NumVerdict(Tag.FINITE, value=float(P[-1]), abs_err=rel * P[-1], rel_err=rel,
                          slope=slope, trend=trend)
    return NumVerdict(Tag.INCONCLUSIVE, slope=slope, trend=trend)


@dataclass(frozen=True)
class _Piece:
    side: Side
    y_lo: float
    y_hi: float  # inf when improper


def _pieces(interval: Tuple[float, float]):
    lo, hi = interval
    out = []
    if lo < 1:
        y_hi = math.inf if lo == 0 else -math.log(lo)
        y_lo = 0.0 if hi >= 1 else -math.log(hi)
        out.append(_Piece(Side.ZERO, y_lo, y_hi))
    if hi > 1:
        y_lo = 0.0 if lo <= 1 else math.log(lo)
        y_hi = math.inf if math.isinf(hi) else math.log(hi)
        out.append(_Piece(Side.INF, y_lo, y_hi))
    return out


def _piece_partials(rest, delta: float, m: float, piece: _Piece, r: float, last: int,
                    tol: float):
    """Log partial ``int |f|^r`` (or log sup) at the doubling points."""
    if piece.y_lo <= 1.0:
        Ys = piece.y_lo + 2.0 ** np.arange(FIRST_DOUBLING, last + 1)
    else:
        # far tails: keep doubling relative to the starting point
        steps = max(FIRST_DOUBLING, last - int(math.ceil(math.log2(piece.y_lo))))
        Ys = piece.y_lo * 2.0 ** np.arange(1, steps + 1)
    edges = np.concatenate([[piece.y_lo], Ys])
    sign = piece.side.sign
    if math.isinf(r):
        seg = _log_sup_segments(lambda Y, s: rest(Y, s) + delta * sign * Y, piece.side, edges)
        return Ys, np.maximum.accumulate(seg), np.zeros(len(seg))
    seg, err = log_integral_segments(lambda Y, s: r * rest(Y, s), piece.side, edges,
                                     jac=sign * (r * delta + m), rel_tol=min(tol, 1e-8))
    return Ys, np.logaddexp.accumulate(seg), err


def _piece_verdict(rest, delta: float, m: float, piece: _Piece, r: float, tol: float):
    """Return (tag, log value of the r-th power or sup, rel err, growth, slope, trend, notes)."""
    notes = []
    sign = piece.side.sign
    if not math.isinf(piece.y_hi):
        edges = np.array([piece.y_lo, piece.y_hi])
        if math.isinf(r):
            val = _log_sup_segments(lambda Y, s: rest(Y, s) + delta * sign * Y,
                                    piece.side, edges)[0]
            return Tag.FINITE, val, 0.0, (), None, (), notes
        seg, err = log_integral_segments(lambda Y, s: r * rest(Y, s), piece.side, edges,
                                         jac=sign * (r * delta + m), rel_tol=min(tol, 1e-8))
        return Tag.FINITE, float(seg[0]), float(err[0]), (), None, (), notes
    growth, slope, trend, logP = (), None, (), np.array([-np.inf])
    Ys, logP, err = _piece_partials(rest, delta, m, piece, r, DEEP_LAST, tol)
    if np.any(logP == np.inf) or np.any(np.isnan(logP)):
        notes.append("saturated: partial overflowed")
        return Tag.INFINITE, math.inf, None, (), None, (), notes
    if np.all(np.isneginf(logP)):
        notes.append("integrand vanishes numerically")
        return Tag.FINITE, -math.inf, 0.0, (), None, (), notes
    tag, growth, slope = _classify(Ys, logP, tol)
    trend = tuple((float(y), float(p)) for y, p in zip(Ys[-6:], logP[-6:]))
    std = int(np.sum(Ys <= 2.0 ** STANDARD_LAST))
    std_tag = _classify(Ys[:std], logP[:std], tol)[0] if std >= 5 else tag
    if std_tag is not tag:
        notes.append(f"standard 2^{STANDARD_LAST} window alone would say {std_tag.value}")
    if tag is not Tag.INCONCLUSIVE:
        step = min(abs(float(logP[-1] - logP[-2])), 700.0)
        rel = abs(math.expm1(step)) + float(np.max(err))
        return tag, float(logP[-1]), rel, growth, slope, trend, notes
    return Tag.INCONCLUSIVE, float(logP[-1]), None, growth, slope, trend, notes


def weighted_norm(spec: NormSpec, tol: float = 1e-6) -> NumVerdict:
    """Numeric ``||weight * integrand||_r`` over spec.interval."""
    if not 1e-12 <= tol <= 1e-2:
        raise ValueError("tol must lie in [1e-12, 1e-2]")
    delta, rest = spec.parts()
    m = 1.0 if spec.measure == "dt" else 0.0
    pieces = _pieces(spec.interval)
    for piece in pieces:
        probe_hi = piece.y_hi if math.isfinite(piece.y_hi) else piece.y_lo + 64.0
        probe = rest(np.linspace(piece.y_lo, probe_hi, 33), piece.side)
        if np.any(np.isnan(probe)) or np.any(probe == np.inf):
            raise ValueError("weight is not positive and finite on the interval")
    results = [_piece_verdict(rest, delta, m, p, spec.r, tol) for p in pieces]
    tags = [res[0] for res in results]
    notes = tuple(n for res in results for n in res[6])
    growth = tuple(g for res in results for g in res[3])
    slope = next((res[4] for res in results if res[0] is not Tag.FINITE), results[0][4])
    trend = tuple(t for res in results for t in res[5])
    if Tag.INFINITE in tags:
        return NumVerdict(Tag.INFINITE, growth=growth, slope=slope, trend=trend, notes=notes)
    if Tag.INCONCLUSIVE in tags:
        return NumVerdict(Tag.INCONCLUSIVE, growth=growth, slope=slope, trend=trend, notes=notes)
    logs = np.array([res[1] for res in results])
    rel = max(res[2] for res in results)
    if math.isinf(spec.r):
        log_val = float(np.max(logs))
    else:
        log_val = float(logsumexp(logs)) / spec.r
        rel = rel / spec.r
    if log_val > 709:
        return NumVerdict(Tag.INFINITE, notes=notes + ("saturated: value overflowed",))
    value = math.exp(log_val)
    return NumVerdict(Tag.FINITE, value=value, abs_err=rel * value, rel_err=rel,
                      growth=growth, slope=slope, trend=trend, notes=notes)


def integral_dt_over_t(weight, interval=(0.0, 1.0), tol: float = 1e-6) -> NumVerdict:
    """Numeric ``int weight(t) dt/t`` over the interval."""
    return weighted_norm(NormSpec(1.0, interval, weight, measure="dt/t"), tol)


def side_integral(weight, side, y_from: float = 0.0, y_to: float = math.inf, r: float = 1.0,
                  measure: str = "dt/t", tol: float = 1e-6) -> NumVerdict:
    """``||weight||_r`` over the ``Y``-range ``[y_from, y_to]`` on one side.

    Works directly in ``Y = |log t|`` so that ranges like ``Y >= 1e4``
    (far below the smallest double ``t``) stay accessible.
    """
    side = parse_side(side)
    delta, rest = split_weight(weight)
    m = 1.0 if measure == "dt" else 0.0
    res = _piece_verdict(rest, delta, m, _Piece(side, float(y_from), float(y_to)), r, tol)
    tag, log_p, rel, growth, slope, trend, notes = res
    if tag is not Tag.FINITE:
        return NumVerdict(tag, growth=growth, slope=slope, trend=trend, notes=tuple(notes))
    log_val = log_p if math.isinf(r) else log_p / r
    if log_val > 709:
        return NumVerdict(Tag.INFINITE, notes=tuple(notes) + ("saturated: value overflowed",))
    value = math.exp(log_val)
    rel = rel if math.isinf(r) else rel / r
    return NumVerdict(Tag.FINITE, value=value, abs_err=rel * value, rel_err=rel,
                      growth=growth, slope=slope, trend=trend, notes=tuple(notes))
