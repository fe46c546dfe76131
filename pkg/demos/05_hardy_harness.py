"""Empirical constants of a weighted Hardy inequality, condition by condition."""
from __future__ import annotations

from lkinterp.harness import verify_equivalence

params = {"r": 2, "s": 2, "a": "l1^0.5", "b": "l1^0.25", "interval": (0, 1),
          "mu": 0.5, "nu": 1.0, "kappa": 1.0}
rep = verify_equivalence("N", params, seed=0, sizes=[2.0 ** k for k in range(6, 12)])
print("functional N:", rep.functional.tag.value, "-> expected", rep.expected)
for row in rep.rows:
    consts = " ".join(f"{c:.3f}" for c in row.sequence.values)
    print(f"  {row.condition:15s} {row.observed:8s} agree={row.agreement}  {consts}")
