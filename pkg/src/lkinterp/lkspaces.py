"""Step functions, rearrangements and Lorentz-Karamata quasinorms.

Step functions are the universal function model: a finite list of
``(height, measure)`` pieces, optionally placed on real intervals.
Rational inputs stay exact (``fractions.Fraction``) through the
rearrangement, so equimeasurability can be checked with ``==``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from .asymcalc import Side, Tag, norm_power_symbol
from .functionals import FinVerdict, NormTerm, Shape, evaluate_shape
from .quadnum import NumVerdict, _log_sup_segments, log_integral_segments, side_integral
from .svfunc import (Const, NotRepresentable, Product, RawPower, RunningSup, as_expr,
                     log_eval, to_symbol, to_text)


def _num(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Rational):
        return Fraction(x)
    x = float(x)
    return x


@dataclass(frozen=True)
class StepFunction:
    """Non-negative simple function given by ``(height, measure)`` pieces.

    ``support`` optionally places piece ``i`` on the real interval
    ``support[i]`` (used by the operator simulations); otherwise pieces
    are laid side by side from 0.  A single trailing piece of infinite
    measure models a sigma-finite tail.
    """

    pieces: Tuple[Tuple[object, object], ...]
    support: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        pcs = []
        for h, m in self.pieces:
            h, m = _num(h), _num(m)
            if not (h >= 0 and math.isfinite(h)):
                raise ValueError(f"heights must be finite and >= 0, got {h}")
            if not m > 0:
                raise ValueError(f"measures must be > 0, got {m}")
            pcs.append((h, m))
        inf_idx = [i for i, (_, m) in enumerate(pcs) if isinstance(m, float) and math.isinf(m)]
        if inf_idx and inf_idx != [len(pcs) - 1]:
            raise ValueError("only the last piece may have infinite measure")
        object.__setattr__(self, "pieces", tuple(pcs))
        if self.support is not None:
            sup = tuple((float(a), float(b)) for a, b in self.support)
            if len(sup) != len(pcs):
                raise ValueError("support needs one interval per piece")
            for (a, b), (_, m) in zip(sup, pcs):
                if not b > a or not math.isclose(b - a, float(m), rel_tol=1e-12, abs_tol=1e-15):
                    raise ValueError("support interval lengths must equal the measures")
            order = sorted(sup)
            if any(b1 > a2 for (_, b1), (a2, _) in zip(order, order[1:])):
                raise ValueError("support intervals must be disjoint")
            object.__setattr__(self, "support", sup)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_intervals(cls, items: Iterable[Tuple[float, float, float]]) -> "StepFunction":
        """Build from ``(height, start, end)`` triples on the real line."""
        items = list(items)
        return cls(tuple((h, _num(b) - _num(a)) for h, a, b in items),
                   tuple((a, b) for _, a, b in items))

    @classmethod
    def sample(cls, f, edges: Sequence[float], at: str = "left") -> "StepFunction":
        """Step approximation of ``f`` on consecutive ``edges`` (laid from 0)."""
        edges = [float(e) for e in edges]
        if edges[0] != 0.0:
            raise ValueError("edges must start at 0")
        pts = edges[:-1] if at == "left" else edges[1:]
        return cls(tuple((float(f(x)), b - a) for x, a, b in zip(pts, edges[:-1], edges[1:])))

    @classmethod
    def from_csv(cls, source) -> "StepFunction":
        """Rows ``height,measure[,start,end]``; negatives are rejected."""
        if hasattr(source, "read"):
            text = source.read()
        elif "\n" in str(source) or "," in str(source):
            text = str(source)
        else:
            with open(source, newline="") as fh:
                text = fh.read()
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]  # header
        pieces, support = [], []
        for k, row in enumerate(rows, 1):
            if len(row) not in (2, 4):
                raise ValueError(f"row {k}: expected 2 or 4 fields, got {len(row)}")
            vals = [_parse_number(c, k) for c in row]
            if vals[0] < 0 or vals[1] <= 0:
                raise ValueError(f"row {k}: height must be >= 0 and measure > 0")
            pieces.append((vals[0], vals[1]))
            if len(row) == 4:
                support.append((vals[2], vals[3]))
        if support and len(support) != len(pieces):
            raise ValueError("either every row or no row carries an interval")
        return cls(tuple(pieces), tuple(support) if support else None)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["height", "measure"] + (["start", "end"] if self.support else []))
        for i, (h, m) in enumerate(self.pieces):
            row = [_csv_num(h), _csv_num(m)]
            if self.support:
                row += [repr(self.support[i][0]), repr(self.support[i][1])]
            w.writerow(row)
        return buf.getvalue()

    # -- queries --------------------------------------------------------------

    @property
    def exact(self) -> bool:
        """True when every height and measure is rational."""
        return all(isinstance(h, Fraction) and isinstance(m, Fraction) for h, m in self.pieces)

    @property
    def total_measure(self):
        return sum((m for _, m in self.pieces), Fraction(0))

    @property
    def sigma_finite_tail(self) -> bool:
        return bool(self.pieces) and isinstance(self.pieces[-1][1], float) \
            and math.isinf(self.pieces[-1][1])

    def distribution(self, h):
        """``d(h) = |{f > h}|``."""
        return sum((m for hh, m in self.pieces if hh > h), Fraction(0))

    def breakpoints(self) -> list:
        """Cumulative edges ``0 = c_0 < c_1 < ...`` of the side-by-side layout."""
        out = [Fraction(0)]
        for _, m in self.pieces:
            out.append(out[-1] + m)
        return out

    def is_nonincreasing(self) -> bool:
        hs = [h for h, _ in self.pieces]
        return all(a >= b for a, b in zip(hs, hs[1:]))

    def __call__(self, t: float) -> float:
        """Value of the side-by-side layout at ``t`` (right-continuous)."""
        c = 0.0
        for h, m in self.pieces:
            c += float(m)
            if t < c:
                return float(h)
        return 0.0

    def values(self, ts) -> np.ndarray:
        """Vectorised ``__call__`` for the side-by-side layout."""
        edges = np.array([float(c) for c in self.breakpoints()])
        hs = np.array([float(h) for h, _ in self.pieces] + [0.0])
        k = np.searchsorted(edges, np.asarray(ts, dtype=float), side="right") - 1
        return hs[np.clip(k, 0, len(hs) - 1)]

    def scaled(self, c) -> "StepFunction":
        c = _num(c)
        return StepFunction(tuple((h * c, m) for h, m in self.pieces), self.support)


def _csv_num(x) -> str:
    """Exact text for a CSV cell; terminating fractions print as decimals."""
    if not isinstance(x, Fraction):
        return repr(float(x))
    d, k2, k5 = x.denominator, 0, 0
    while d % 2 == 0:
        d, k2 = d // 2, k2 + 1
    while d % 5 == 0:
        d, k5 = d // 5, k5 + 1
    if d != 1:
        return str(x)
    k = max(k2, k5)
    if k == 0:
        return str(x.numerator)
    n = abs(x.numerator) * 10 ** k // x.denominator
    digits = str(n).rjust(k + 1, "0")
    sign = "-" if x < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:].rstrip('0')}"


def _is_number(s: str) -> bool:
    try:
        _parse_number(s, 0)
        return True
    except ValueError:
        return False


def _parse_number(s: str, row: int):
    s = s.strip()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        v = float(s)
    except ValueError:
        raise ValueError(f"row {row}: not a number: {s!r}") from None
    if math.isnan(v):
        raise ValueError(f"row {row}: NaN")
    return v


def rearrange(f: StepFunction) -> StepFunction:
    """Decreasing rearrangement ``f*`` on ``(0, |supp|)``.

    Equal heights are merged and zero heights dropped, so the result is
    strictly decreasing and equimeasurable with ``f``.
    """
    acc = {}
    for h, m in f.pieces:
        if h == 0:
            continue
        acc[h] = acc.get(h, Fraction(0)) + m
    return StepFunction(tuple(sorted(acc.items(), key=lambda hm: hm[0], reverse=True)))


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class LKSpaceSpec:
    """``L_{p,r;a}`` over ``(0, B)`` with ``B`` in ``{1, inf}``."""

    p: float
    r: float
    a: object = 1.0
    B: float = 1.0

    def __post_init__(self):
        for name in ("p", "r"):
            v = float(getattr(self, name))
            if not v > 0:
                raise ValueError(f"{name} must lie in (0, inf]")
            object.__setattr__(self, name, v)
        if self.B not in (1, 1.0, math.inf):
            raise ValueError("B must be 1 or inf")
        object.__setattr__(self, "B", float(self.B))
        object.__setattr__(self, "a", as_expr(self.a))

    def normalized(self) -> Tuple["LKSpaceSpec", Tuple[str, ...]]:
        """Apply the ``p = r = inf`` convention: ``a`` becomes its running sup."""
        if math.isinf(self.p) and math.isinf(self.r) and not isinstance(self.a, RunningSup):
            if not _is_nondecreasing(self.a, self.B):
                note = (f"p = r = inf: a = {to_text(self.a)} replaced by its running "
                        "supremum (same space)")
                return LKSpaceSpec(self.p, self.r, RunningSup(self.a), self.B), (note,)
        return self, ()


def _is_nondecreasing(a, B: float = math.inf) -> bool:
    """Whether ``a`` is non-decreasing on ``(0, B)`` (checked on a dense grid)."""
    if isinstance(a, Const):
        return True
    Y = np.logspace(-3, 6, 2000)
    # t increasing: Y on the zero side decreasing, then Y on the inf side increasing
    seq = log_eval(a, Y, "zero")[::-1]
    if math.isinf(B):
        seq = np.concatenate([seq, log_eval(a, Y, "inf")])
    return bool(np.all(np.diff(seq) >= -1e-12 * np.maximum(1.0, np.abs(seq[1:]))))


@dataclass(frozen=True)
class SumSpaceSpec:
    """``L_{p1,r1;a} + L_{p2,r2;a2}`` or the intersection, over ``(0, inf)``.

    ``a2`` defaults to ``a``.  Only the part of each weight on the side
    where its pair acts enters the quasinorm, so two weights describe the
    same space as one weight glued together at ``t = 1``.
    """

    p1: float
    r1: float
    p2: float
    r2: float
    a: object = 1.0
    mode: str = "sum"
    a2: object = None

    def __post_init__(self):
        for name in ("p1", "r1", "p2", "r2"):
            v = float(getattr(self, name))
            if not v >= 1:
                raise ValueError(f"{name} must lie in [1, inf]")
            object.__setattr__(self, name, v)
        if self.p1 == self.p2:
            raise ValueError("p1 and p2 must differ")
        if self.mode not in ("sum", "intersection"):
            raise ValueError("mode must be 'sum' or 'intersection'")
        object.__setattr__(self, "a", as_expr(self.a))
        object.__setattr__(self, "a2", self.a if self.a2 is None else as_expr(self.a2))

    def pairing(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """``((p, r) on (0,1), (p, r) on (1,inf))``.

        A sum puts the smaller ``p`` near 0; an intersection swaps the
        pairing and puts the larger ``p`` near 0.
        """
        lo, hi = (p[:2] for p in self.pieces())
        return lo, hi

    def pieces(self) -> Tuple[Tuple[float, float, object], Tuple[float, float, object]]:
        """``((p, r, weight) on (0,1), (p, r, weight) on (1,inf))``."""
        one, two = (self.p1, self.r1, self.a), (self.p2, self.r2, self.a2)
        lo, hi = (one, two) if self.p1 < self.p2 else (two, one)
        return (lo, hi) if self.mode == "sum" else (hi, lo)


def nontrivial(spec: LKSpaceSpec) -> bool:
    """False exactly when ``p = inf`` and ``||t^(-1/r) a||_{r,(0,1)} = inf``."""
    if not math.isinf(spec.p):
        return True
    spec, _ = spec.normalized()
    r = spec.r
    sym = to_symbol(spec.a, Side.ZERO)
    if not isinstance(sym, NotRepresentable):
        return norm_power_symbol(0.0, sym, r, "inner").finite
    v = side_integral(spec.a, Side.ZERO, r=r, measure="dt/t")
    if v.tag is Tag.INCONCLUSIVE:
        raise ValueError("could not decide triviality numerically")
    return v.tag is Tag.FINITE


def _log_norm_pieces(fstar: StepFunction, p: float, r: float, a, lo: float, hi: float):
    """Log r-th powers (or log sups) of ``t^(1/p-1/r) a(t)`` over each piece.

    Only the part of each piece inside ``(lo, hi)`` counts.  Returns the
    per-piece logs and any notes; ``inf`` marks divergence.
    """
    delta = (0.0 if math.isinf(p) else 1.0 / p) - (0.0 if math.isinf(r) else 1.0 / r)
    if isinstance(as_expr(a), Const):
        return _log_norm_pieces_const(fstar, p, r, as_expr(a).c, lo, hi), []
    edges = [float(c) for c in fstar.breakpoints()]
    out = np.full(len(fstar.pieces), -np.inf)
    notes = []
    a_expr = as_expr(a)
    sup = math.isinf(r)
    for i, (h, _) in enumerate(fstar.pieces):
        if h == 0:
            continue
        u, v = max(edges[i], lo), min(edges[i + 1], hi)
        if not v > u:
            continue
        parts = []
        for side, y_lo, y_hi in _side_ranges(u, v):
            if math.isinf(y_hi):
                w = Product((RawPower(delta), a_expr)) if delta else a_expr
                res = side_integral(w, side, y_lo, math.inf, r=r, measure="dt")
                if res.tag is Tag.INFINITE:
                    return None, ["quasinorm diverges on an unbounded piece"]
                if res.tag is Tag.INCONCLUSIVE:
                    notes.append("inconclusive tail piece")
                    return "inconclusive", notes
                val = math.log(res.value) if res.value > 0 else -np.inf
                parts.append(val if sup else r * val)
                continue
            sign = side.sign
            if sup:
                seg = _log_sup_segments(lambda Y, s: log_eval(a_expr, Y, s) + delta * s.sign * Y,
                                        side, [y_lo, y_hi])
            else:
                seg, _ = log_integral_segments(lambda Y, s: r * log_eval(a_expr, Y, s), side,
                                               [y_lo, y_hi], jac=sign * (r * delta + 1.0))
            parts.append(float(seg[0]))
        if not parts:
            continue
        lh = math.log(float(h))
        if sup:
            out[i] = lh + max(parts)
        else:
            out[i] = r * lh + float(logsumexp(parts))
    return out, notes


def _log_norm_pieces_const(fstar: StepFunction, p: float, r: float, c: float,
                           lo: float, hi: float) -> np.ndarray:
    """Closed form of ``_log_norm_pieces`` for a constant weight ``c``."""
    e = np.array([float(x) for x in fstar.breakpoints()])
    h = np.array([float(x) for x, _ in fstar.pieces])
    u, v = np.maximum(e[:-1], lo), np.minimum(e[1:], hi)
    ok = (v > u) & (h > 0)
    out = np.full(len(h), -np.inf)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if math.isinf(r):
            # the sup of t^(1/p) over a piece sits at its right end
            lt = inv_p * np.log(v) if inv_p > 0 else np.zeros(len(v))
            out[ok] = (np.log(h) + math.log(c) + lt)[ok]
            return out
        beta = r * inv_p  # integrate t^(beta - 1)
        if beta == 0:
            li = np.log(np.log(v / u))
        else:
            lv = beta * np.log(v)
            lu = np.where(u > 0, beta * np.log(np.where(u > 0, u, 1.0)), -np.inf)
            li = lv + np.log1p(-np.exp(lu - lv)) - math.log(beta)
        out[ok] = (r * (np.log(h) + math.log(c)) + li)[ok]
    return out


def _side_ranges(u: float, v: float):
    """Split ``(u, v)`` at 1 into ``(side, y_lo, y_hi)`` ranges."""
    out = []
    if u < 1:
        y_hi = math.inf if u == 0 else -math.log(u)
        y_lo = 0.0 if v >= 1 else -math.log(v)
        if y_hi > y_lo:
            out.append((Side.ZERO, y_lo, y_hi))
    if v > 1:
        y_lo = 0.0 if u <= 1 else math.log(u)
        y_hi = math.inf if math.isinf(v) else math.log(v)
        if y_hi > y_lo:
            out.append((Side.INF, y_lo, y_hi))
    return out


def _quasinorm_on(fstar: StepFunction, p: float, r: float, a, lo: float, hi: float,
                  notes=()) -> NumVerdict:
    if not fstar.is_nonincreasing():
        raise ValueError("quasinorm expects a non-increasing f*; call rearrange first")
    logs, more = _log_norm_pieces(fstar, p, r, a, lo, hi)
    notes = tuple(notes) + tuple(more)
    if logs is None:
        return NumVerdict(Tag.INFINITE, notes=notes)
    if isinstance(logs, str):
        return NumVerdict(Tag.INCONCLUSIVE, notes=notes)
    if np.all(np.isneginf(logs)):
        return NumVerdict(Tag.FINITE, value=0.0, abs_err=0.0, rel_err=0.0, notes=notes)
    lv = float(np.max(logs)) if math.isinf(r) else float(logsumexp(logs)) / r
    if lv > 709:
        return NumVerdict(Tag.INFINITE, notes=notes + ("saturated",))
    return NumVerdict(Tag.FINITE, value=math.exp(lv), abs_err=1e-9 * math.exp(lv),
                      rel_err=1e-9, notes=notes)


def quasinorm(fstar: StepFunction, spec: LKSpaceSpec) -> NumVerdict:
    """``||t^(1/p-1/r) a(t) f*(t)||_{r,(0,B)}`` piece by piece.

    A trivial space gives Infinite for every non-zero ``f*`` (with a note).
    """
    spec, notes = spec.normalized()
    if fstar.sigma_finite_tail and spec.B == 1.0:
        raise ValueError("an infinite-measure f* does not live on (0, 1)")
    if float(fstar.total_measure) > spec.B * (1 + 1e-12):
        raise ValueError("f* is longer than the underlying measure space")
    if not nontrivial(spec):
        zero = all(h == 0 for h, _ in fstar.pieces)
        note = notes + ("trivial space: only the zero function has finite quasinorm",)
        if zero:
            return NumVerdict(Tag.FINITE, value=0.0, abs_err=0.0, rel_err=0.0, notes=note)
        return NumVerdict(Tag.INFINITE, notes=note)
    return _quasinorm_on(fstar, spec.p, spec.r, spec.a, 0.0, spec.B, notes)


def sum_quasinorm(f: StepFunction, spec: SumSpaceSpec) -> NumVerdict:
    """Quasinorm of the sum or intersection space on ``(0, inf)``."""
    fstar = rearrange(f)
    near, far = spec.pieces()
    parts = []
    notes = []
    for (p, r, a), (lo, hi) in ((near, (0.0, 1.0)), (far, (1.0, math.inf))):
        sub, more = LKSpaceSpec(p, r, a, math.inf).normalized()
        notes.extend(more)
        v = _quasinorm_on(fstar, sub.p, sub.r, sub.a, lo, hi)
        if not v.finite:
            return NumVerdict(v.tag, notes=tuple(notes) + v.notes)
        parts.append(v.value)
    total = sum(parts)
    return NumVerdict(Tag.FINITE, value=total, abs_err=1e-9 * total, rel_err=1e-9,
                      notes=tuple(notes))


# ---------------------------------------------------------------------------
# embeddings


def embeds(src: LKSpaceSpec, dst: LKSpaceSpec) -> FinVerdict:
    """Decide ``L_{p,r;a} -> L_{q,s;b}`` on the common ``(0, B)``.

    Finite means the embedding holds.
    """
    if src.B != dst.B:
        raise ValueError("both spaces must live over the same B")
    notes = []
    src, n1 = src.normalized()
    dst, n2 = dst.normalized()
    notes.extend(n1 + n2)
    p, r, a = src.p, src.r, src.a
    q, s, b = dst.p, dst.r, dst.a
    interval = (0.0, src.B)
    label = "embedding"
    if src.B == 1.0 and p > q:
        return FinVerdict(Tag.FINITE, "symbolic", label,
                          notes=tuple(notes) + ("finite measure and p > q: always embeds",))
    if p != q:
        why = "p < q" if p < q else "p > q on an infinite measure space"
        return FinVerdict(Tag.INFINITE, "symbolic", label,
                          notes=tuple(notes) + (f"{why}: never embeds",))
    rho = None if r <= s else 1.0 / ((0.0 if math.isinf(s) else 1.0 / s)
                                      - (0.0 if math.isinf(r) else 1.0 / r))
    if not math.isinf(p):
        # the power factors cancel; the condition is N(r, s, a, b) < inf
        shape = Shape("sup" if rho is None else "rho", rho, (("b", 1.0), ("a", -1.0)), ())
        notes.append("p < inf: condition reduces to N")
    elif rho is None:
        shape = Shape("sup", None, (),
                      (NormTerm(s, (("b", 1.0),), "left", False, 1.0),
                       NormTerm(r, (("a", 1.0),), "left", False, -1.0)))
    else:
        shape = Shape("rho", rho, (("b", s / rho),),
                      (NormTerm(s, (("b", 1.0),), "left", False, s / r),
                       NormTerm(r, (("a", 1.0),), "left", False, -1.0)))
    v = evaluate_shape(shape, a, b, interval, label)
    return FinVerdict(v.tag, v.method, label, value=v.value, asymptotes=v.asymptotes,
                      divergence=v.divergence, witness=v.witness,
                      notes=v.notes + tuple(notes))
