"""Exact asymptotic calculus for iterated-logarithm power symbols.

A symbol is the germ ``coeff * x**tilt * prod_i l_i(x)**alpha_i`` at one
endpoint (``t -> 0`` or ``t -> inf``), where ``l_1(t) = 1 + |log t|`` and
``l_{i+1} = l_1(l_i)``.  Every quantity is kept in log coordinates
``Y = |log t|`` so that germs can be sampled far beyond double precision in
``t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

MAX_TIERS = 6


class Side(str, Enum):
    """Endpoint of ``(0, inf)`` a germ lives at."""

    ZERO = "zero"
    INF = "inf"

    @property
    def sign(self) -> int:
        """Sign of ``log t`` on this side."""
        return -1 if self is Side.ZERO else 1

    @property
    def other(self) -> "Side":
        return Side.INF if self is Side.ZERO else Side.ZERO


def parse_side(side) -> Side:
    if isinstance(side, Side):
        return side
    key = str(side).strip().lower().replace("-", "").replace("_", "")
    if key in ("zero", "0", "nearzero", "left"):
        return Side.ZERO
    if key in ("inf", "infinity", "nearinfinity", "nearinf", "right"):
        return Side.INF
    raise ValueError(f"unknown side {side!r}")


class Growth(str, Enum):
    """Outcome of a growth comparison ``u`` versus ``v``."""

    LESS = "<<"
    EQUIV = "~"
    GREATER = ">>"


class Tag(str, Enum):
    FINITE = "Finite"
    INFINITE = "Infinite"
    INCONCLUSIVE = "Inconclusive"


class TierOverflowError(ValueError):
    """Raised when a computation needs more log tiers than supported."""


class TailPreconditionError(ValueError):
    """The reciprocal-tail equivalence needs a divergent integral at the endpoint.

    ``fallback`` names the restricted-domain variant that still applies.
    """

    def __init__(self, message: str, fallback: str = "restricted"):
        super().__init__(message)
        self.fallback = fallback


def ell_log(Y, n: int) -> np.ndarray:
    """Return ``log l_i(Y)`` for ``i = 1..n`` stacked along axis 0.

    ``l_1 = 1 + Y`` and ``l_{i+1} = 1 + log l_i``.  Uses ``log1p`` so tiny
    and astronomically large ``Y`` are both handled without forming ``t``.
    """
    Y = np.asarray(Y, dtype=float)
    out = np.empty((n,) + Y.shape)
    cur = np.log1p(Y)
    for i in range(n):
        out[i] = cur
        cur = np.log1p(cur)
    return out


def ell(Y, i: int):
    """Value of the tier-``i`` iterated logarithm at ``Y = |log t|``."""
    return np.exp(ell_log(Y, i)[i - 1])


def _snap(x: float) -> float:
    # exponents come from products of rationals; absorb float round-off
    x = float(x)
    near = round(x, 9)
    return near + 0.0 if abs(x - near) <= 1e-12 * max(1.0, abs(x)) else x


def _strip(exps: Sequence[float]) -> tuple:
    exps = [_snap(e) for e in exps]
    while exps and exps[-1] == 0.0:
        exps.pop()
    return tuple(exps)


@dataclass(frozen=True)
class EndpointSymbol:
    """Germ ``coeff * x**tilt * prod l_i(x)**exponents[i-1]`` at ``side``."""

    side: Side
    coeff: float = 1.0
    exponents: tuple = ()
    tilt: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "side", parse_side(self.side))
        object.__setattr__(self, "exponents", _strip(self.exponents))
        object.__setattr__(self, "coeff", float(self.coeff))
        object.__setattr__(self, "tilt", _snap(self.tilt))
        if not (self.coeff > 0 and math.isfinite(self.coeff)):
            raise ValueError(f"coefficient must be positive and finite, got {self.coeff}")
        if len(self.exponents) > MAX_TIERS:
            raise TierOverflowError(
                f"{len(self.exponents)} log tiers requested, at most {MAX_TIERS} supported")
        if not all(math.isfinite(e) for e in self.exponents):
            raise ValueError("exponents must be finite")

    @classmethod
    def constant(cls, side, value: float = 1.0) -> "EndpointSymbol":
        return cls(side, value)

    def exponent(self, i: int) -> float:
        """Exponent of tier ``i`` (1-based), zero past the stored tail."""
        return self.exponents[i - 1] if i <= len(self.exponents) else 0.0

    @property
    def is_constant(self) -> bool:
        return not self.exponents and self.tilt == 0.0

    def growth_key(self, n: Optional[int] = None) -> tuple:
        """Lexicographic key; larger means faster growth toward the endpoint."""
        n = len(self.exponents) if n is None else n
        lead = self.side.sign * self.tilt
        return (lead,) + tuple(self.exponent(i) for i in range(1, n + 1))

    def __mul__(self, other) -> "EndpointSymbol":
        if isinstance(other, EndpointSymbol):
            _same_side(self, other)
            n = max(len(self.exponents), len(other.exponents))
            exps = [self.exponent(i) + other.exponent(i) for i in range(1, n + 1)]
            return EndpointSymbol(self.side, self.coeff * other.coeff, exps,
                                  self.tilt + other.tilt)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c: float) -> "EndpointSymbol":
        return EndpointSymbol(self.side, self.coeff * c, self.exponents, self.tilt)

    def power(self, p: float) -> "EndpointSymbol":
        return EndpointSymbol(self.side, self.coeff ** p,
                              [e * p for e in self.exponents], self.tilt * p)

    def without_coeff(self) -> "EndpointSymbol":
        return EndpointSymbol(self.side, 1.0, self.exponents, self.tilt)

    def log_value(self, Y) -> np.ndarray:
        """Natural log of the germ at ``Y = |log x|`` (vectorised)."""
        Y = np.asarray(Y, dtype=float)
        out = np.full(Y.shape, math.log(self.coeff))
        if self.tilt:
            out = out + self.tilt * self.side.sign * Y
        if self.exponents:
            logs = ell_log(Y, len(self.exponents))
            for i, e in enumerate(self.exponents):
                if e:
                    out = out + e * logs[i]
        return out

    def value(self, Y):
        return np.exp(self.log_value(Y))

    def to_text(self) -> str:
        """Render in the expression grammar understood by ``svfunc.parse``."""
        parts = []
        if self.coeff != 1.0 or (not self.exponents and not self.tilt):
            parts.append(_fmt(self.coeff))
        if self.tilt:
            parts.append(f"t^{_fmt(self.tilt)}")
        for i, e in enumerate(self.exponents, start=1):
            if e:
                parts.append(f"l{i}^{_fmt(e)}")
        return " * ".join(parts)

    def __str__(self) -> str:
        return f"{self.to_text()} @ {self.side.value}"


def _fmt(x: float) -> str:
    short = f"{x:.15g}"
    return short if float(short) == x else repr(float(x))


def _same_side(u: EndpointSymbol, v: EndpointSymbol) -> None:
    if u.side is not v.side:
        raise ValueError("symbols live at different endpoints")


@dataclass(frozen=True)
class Verdict:
    """Finite/Infinite classification with exactly one populated payload."""

    tag: Tag
    asymptote: Optional[EndpointSymbol] = None
    divergence: Optional[EndpointSymbol] = None
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.tag is Tag.FINITE and (self.asymptote is None or self.divergence is not None):
            raise ValueError("a Finite verdict carries an asymptote only")
        if self.tag is Tag.INFINITE and (self.divergence is None or self.asymptote is not None):
            raise ValueError("an Infinite verdict carries a divergence only")

    @property
    def finite(self) -> bool:
        return self.tag is Tag.FINITE

    @property
    def symbol(self) -> EndpointSymbol:
        return self.asymptote if self.finite else self.divergence

    @property
    def value(self) -> Optional[float]:
        """Plain constant when the asymptote has no growth at all."""
        if self.finite and self.asymptote.is_constant:
            return self.asymptote.coeff
        return None

    def power(self, p: float) -> "Verdict":
        if self.finite:
            return Verdict(Tag.FINITE, asymptote=self.asymptote.power(p), notes=self.notes)
        return Verdict(Tag.INFINITE, divergence=self.divergence.power(p), notes=self.notes)


def finite(sym: EndpointSymbol, *notes: str) -> Verdict:
    return Verdict(Tag.FINITE, asymptote=sym, notes=tuple(notes))


def infinite(sym: EndpointSymbol, *notes: str) -> Verdict:
    return Verdict(Tag.INFINITE, divergence=sym, notes=tuple(notes))


def lex_growth_compare(u: EndpointSymbol, v: EndpointSymbol) -> Growth:
    """Compare growth toward the shared endpoint, ignoring coefficients."""
    _same_side(u, v)
    n = max(len(u.exponents), len(v.exponents))
    ku, kv = u.growth_key(n), v.growth_key(n)
    if ku == kv:
        return Growth.EQUIV
    return Growth.LESS if ku < kv else Growth.GREATER


def _decay_rate(sym: EndpointSymbol, eps: float = 0.0) -> float:
    """Rate at which ``x**(tilt+eps)`` decays toward the endpoint."""
    return -sym.side.sign * (sym.tilt + eps)


def integrate_to_endpoint(sym: EndpointSymbol) -> Verdict:
    """Classify ``int t**-1 sym(t) dt`` over a neighbourhood of the endpoint.

    For a finite integral the asymptote describes the tail integral from
    ``x`` to the endpoint; for a divergent one the divergence symbol
    describes how the partial integral grows as ``x`` approaches it.
    """
    d = _decay_rate(sym)
    if d > 0:
        return finite(sym.scale(1.0 / d))
    if d < 0:
        return infinite(sym.scale(1.0 / -d))
    j = 1
    while sym.exponent(j) == -1.0 and j <= len(sym.exponents):
        j += 1
    if j > MAX_TIERS:
        raise TierOverflowError(f"divergence needs log tier {j} beyond the cap of {MAX_TIERS}")
    aj = sym.exponent(j)
    exps = [0.0] * (j - 1) + [aj + 1.0] + list(sym.exponents[j:])
    out = EndpointSymbol(sym.side, sym.coeff / abs(aj + 1.0), exps)
    return finite(out) if aj < -1.0 else infinite(out)


def sup_toward_endpoint(sym: EndpointSymbol) -> Verdict:
    """Classify ``sup sym`` over a neighbourhood of the endpoint."""
    n = len(sym.exponents)
    lead = next((k for k in sym.growth_key(n) if k != 0.0), 0.0)
    if lead <= 0.0:
        return finite(sym)
    return infinite(sym)


def norm_power_symbol(eps: float, sym: EndpointSymbol, r: float,
                      segment: str = "inner") -> Verdict:
    """Asymptotics of ``||t**(eps - 1/r) sym(t)||_r`` on one side of ``x``.

    ``inner`` is the interval between the endpoint and ``x``; ``outer`` is
    the interval from ``x`` to ``t = 1``.  The result is a symbol in ``x``
    whose tilt carries the ``x**eps`` power.  Outer norms are finite for
    every fixed ``x``; their asymptote tells how they grow as ``x``
    approaches the endpoint (a constant when they stay bounded).
    """
    if segment not in ("inner", "outer"):
        raise ValueError("segment must be 'inner' or 'outer'")
    if not r > 0:
        raise ValueError("r must be positive")
    base = EndpointSymbol(sym.side, sym.coeff, sym.exponents, sym.tilt + eps)
    d = _decay_rate(base)
    const = EndpointSymbol.constant(sym.side)
    if math.isinf(r):
        if segment == "inner":
            return sup_toward_endpoint(base)
        sup = sup_toward_endpoint(base)
        return finite(base if not sup.finite or base.is_constant else const)
    if d != 0.0:
        scaled = base.scale((abs(d) * r) ** (-1.0 / r))
        if segment == "inner":
            return finite(scaled) if d > 0 else infinite(scaled)
        return finite(scaled) if d < 0 else finite(const)
    inner = integrate_to_endpoint(base.power(r)).power(1.0 / r)
    if segment == "inner":
        return inner
    return finite(inner.divergence) if not inner.finite else finite(const)


def reciprocal_tail(sym: EndpointSymbol, R: float, S: float,
                    allow_restricted: bool = False) -> EndpointSymbol:
    """Symbol of ``||t**(-1/S) lam**(R/S) Lam**(-1/R-1/S)||_S``.

    ``Lam`` is the partial integral of ``t**-1 lam**R`` counted from the far
    side; when it diverges at the endpoint the norm, taken toward the
    endpoint, is equivalent to ``Lam(x)**(-1/R)``, the reciprocal of the
    complementary ``R``-norm.  When the integral converges the equivalence
    only survives on a restricted interval; pass ``allow_restricted`` to use
    the convergent tail integral instead.
    """
    if not 1 <= R < math.inf:
        raise ValueError("R must lie in [1, inf)")
    if S < 1:
        raise ValueError("S must be >= 1")
    if sym.tilt:
        raise ValueError("reciprocal tails are defined for slowly varying symbols")
    tail = integrate_to_endpoint(sym.power(R))
    if tail.finite and not allow_restricted:
        raise TailPreconditionError(
            "integral of t^-1 lam^R converges at the endpoint; only the "
            "restricted-interval variant applies", fallback="restricted")
    big_lam = tail.symbol
    if math.isinf(S):
        return big_lam.power(-1.0 / R)
    if tail.finite:
        # Lam decays toward the endpoint; the S-norm lives on the far side.
        return big_lam.power(-1.0 / R)
    integrand = sym.power(R) * big_lam.power(-S / R - 1.0)
    inner = integrate_to_endpoint(integrand)
    if not inner.finite:
        raise ArithmeticError("reciprocal tail integral failed to converge")
    return inner.asymptote.power(1.0 / S)
