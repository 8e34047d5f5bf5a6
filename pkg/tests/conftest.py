from __future__ import annotations

import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from confkernel import Polynomial, Ring

settings.register_profile(
    "repo", deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

RING = Ring(params=("a",))
VARS = ("del", "lam", "mu", "a")

rationals = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5))


@st.composite
def polys(draw, ring=RING, max_terms=4, max_deg=3, variables=VARS):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = [0] * ring.arity
        for v in variables:
            exps[ring.index(v)] = draw(st.integers(0, max_deg))
        terms[tuple(exps)] = draw(rationals)
    return Polynomial(ring, terms)


@st.composite
def del_polys(draw, ring, max_deg=2):
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=1, max_size=max_deg + 1))
    d = ring.var("del")
    return sum((d ** k * c for k, c in enumerate(coeffs)), ring.zero())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n, (ok, detail) in sorted(mod.RESULTS.items()):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
