"""Restricting to monotone functions changes the answer."""
from __future__ import annotations

from lkinterp.harness import monotone_gap_witness

w = monotone_gap_witness(r=2, s=3, theta=-1, gamma=0.1)
print("symbolic growth of R between the track points:", round(w.predicted_ratio, 3))
print("l2^0.1 over the same range:                   ", round(w.direct_ratio, 3))
print("general family constants: ", " ".join(f"{c:.3f}" for c in w.general.values))
print("monotone family constants:", " ".join(f"{c:.3f}" for c in w.monotone.values))
print("witness ok:", w.ok)
