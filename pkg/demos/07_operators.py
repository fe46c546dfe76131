"""Hilbert and maximal transforms of step functions and their rearrangements."""
from __future__ import annotations

import math

import numpy as np

from lkinterp.lkspaces import LKSpaceSpec, StepFunction, quasinorm
from lkinterp.opsim import (InterpolationSegment, hilbert_rearrangement, joint_weak_check,
                            maximal_rearrangement)

f = StepFunction.from_intervals([(2, -1, 0), (1, 0.5, 2)])
hf = hilbert_rearrangement(f)
l2 = quasinorm(hf.fstar, LKSpaceSpec(2, 2, 1, math.inf)).value
print("||Hf||_2 =", round(l2, 4), " ||f||_2 =", round(math.sqrt(4 + 1.5), 4))
unit = InterpolationSegment(1, 1, math.inf, math.inf)
rep = joint_weak_check(hf, unit, f, np.logspace(-4, 4, 201))
print("sup (Hf)*/(S f*) on [1e-4, 1e4]:", round(rep.sup_ratio, 4))

g = StepFunction(((3, 0.25), (1, 0.5)))
mg = maximal_rearrangement(g, per_decade=32)
print("(Mg)* pieces:", len(mg.fstar.pieces), " sup:", round(float(mg.fstar.pieces[0][0]), 4))
