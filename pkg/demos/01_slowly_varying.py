"""Log-power weights: parse, evaluate far out, read off the exact germ."""
from __future__ import annotations

from lkinterp import Side
from lkinterp.svfunc import log_eval, parse, to_symbol, to_text

a = parse("l1^(-1/2) * l2^-1")
print("a =", to_text(a))
for Y in (10.0, 1e6, 1e300):
    print(f"  log a at t = exp(-{Y:g}): {float(log_eval(a, Y, Side.ZERO)):.6f}")
print("germ near 0:", to_symbol(a, Side.ZERO).to_text())
