"""The gap instance: R1 and R2 finite while R diverges like l2^0.1."""
from __future__ import annotations

from lkinterp.functionals import FunctionalSpec, evaluate
from lkinterp.harness import gap_weights

a, b = gap_weights(r=2, s=3, theta=-1, gamma=0.1)
print("a =", a, " b =", b)
for kind in ("R1", "R2", "R", "Rinf"):
    v = evaluate(FunctionalSpec(kind, 2, 3, a, b, (0, 1)))
    extra = "" if v.divergence is None else f"  grows like {v.divergence.to_text()}"
    print(f"{kind:5s} {v.tag.value:9s} ({v.method}){extra}")
