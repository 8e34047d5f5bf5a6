"""Deterministic rational parameter tuples for the module families."""

from __future__ import annotations

import random
from fractions import Fraction as Q

from confkernel.modules import module_family

VALUES = [Q(p, q) for q in (1, 2, 3) for p in range(-4, 5)]


def module_params(key: str, n: int = 5, seed: int = 0) -> list:
    fam = module_family(key)
    rnd = random.Random(f"{key}-{seed}")
    out = []
    while len(out) < n:
        vals = {}
        for p in fam.params:
            v = rnd.choice(VALUES)
            while (p.nonzero and v == 0) or v in fam.excluded.get(p.name, ()):
                v = rnd.choice(VALUES)
            vals[p.name] = v
        if vals not in out:
            out.append(vals)
    return out
