"""Boundedness decisions for classical operators."""
from __future__ import annotations

from lkinterp.interpengine import InterpolationQuery, decide
from lkinterp.lkspaces import LKSpaceSpec
from lkinterp.opsim import CATALOG
from lkinterp.svfunc import to_text

L1, LlogL = LKSpaceSpec(1, 1, "1", 1.0), LKSpaceSpec(1, 1, "l1", 1.0)
for key, src in (("M", LlogL), ("M", L1), ("H", L1)):
    v = decide(InterpolationQuery(CATALOG[key], "left", src, L1))
    print(f"{CATALOG[key].name}: L_(1,1;{to_text(src.a)}) -> L_1 ... {v.bounded}  [{v.theorem}]")
    for c in v.conditions:
        print(f"    {c.name}: {c.status}")
