"""Sharp targets: iterated-log weights and an exponential weight."""
from __future__ import annotations

import numpy as np

from lkinterp import Side
from lkinterp.interpengine import ell, optimal_target
from lkinterp.lkspaces import LKSpaceSpec
from lkinterp.opsim import CATALOG
from lkinterp.svfunc import log_eval

r, s, alpha = 2, 3, 0.5
src = LKSpaceSpec(1, r, ell(1 / 2, 1 / 2, 1 / 2 + alpha), 1.0)
o = optimal_target("left", src, CATALOG["M"], s=s)
print("M: source weight", ell(1 / 2, 1 / 2, 1 / 2 + alpha))
print("   sharp target  ", o.symbol.to_text(), f"(second index {o.space.r:g})")

o = optimal_target("right", LKSpaceSpec(np.inf, np.inf, "exp(-1*l1^0.5)", 1.0), CATALOG["C"])
Y = np.array([1e2, 1e4, 1e6])
L = 1 + Y
ratio = np.exp(-log_eval(o.weight, Y, Side.ZERO) - 0.5 * np.log(L) - np.sqrt(L))
print("C: 1/weight over sqrt(l1) exp(sqrt(l1)) at Y = 1e2, 1e4, 1e6:", np.round(ratio, 4))
