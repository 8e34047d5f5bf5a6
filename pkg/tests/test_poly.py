from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import RING, polys
from confkernel import ParseError, Ring, RingMismatchError, parse
from confkernel.parse import ExponentOverflowError, UnknownIdentifierError
from oracle import to_sympy

R = Ring(params=("a", "beta", "gamma"))
d, lam, mu = R.gens("del", "lam", "mu")
a, beta, gamma = R.gens("a", "beta", "gamma")


def P(text, ring=R):
    return parse(text, ring)


class TestRational:
    def test_canonical_form(self):
        p = R.const(Fraction(6, -4))
        c = p.constant_value()
        assert (c.numerator, c.denominator) == (-3, 2)

    def test_zero_has_no_terms(self):
        assert (d - d).is_zero() and len(d - d) == 0


class TestAdd:
    def test_inverse(self):
        assert ((d + lam * 2) + (-d - lam * 2)).is_zero()

    def test_sum(self):
        assert d + lam == P("del + lam")

    def test_collect(self):
        assert (d + lam) + (d + beta * lam + gamma) == P("2*del + (1 + beta)*lam + gamma")

    def test_ring_mismatch(self):
        other = Ring(params=("c",))
        with pytest.raises(RingMismatchError):
            _ = d + other.var("c")


class TestMul:
    def test_identity(self):
        assert (d + lam * 2) * 1 == d + lam * 2
        assert (d + lam * 2) * R.one() == d + lam * 2

    def test_module_h(self):
        # frozen expansion, cross-checked against sympy below
        h = (lam * (d + lam + a) * (d + lam * 2 + a)).substitute({"a": R.zero()})
        assert h == P("lam*del^2 + 3*lam^2*del + 2*lam^3")

    def test_cubic_row(self):
        K = Ring("x", ("y",), ())
        x, y = K.gens("x", "y")
        f = (x - y) * (x + y * Fraction(1, 2)) * (x + y * 2)
        assert f == parse("x^3 + 3/2*x^2*y - 3/2*x*y^2 - y^3", K)

    def test_oracle_agrees(self):
        h = lam * (d + lam + a) * (d + lam * 2 + a)
        import sympy as sp

        dd, ll, aa = sp.symbols("del lam a")
        assert to_sympy(h) == sp.expand(ll * (dd + ll + aa) * (dd + 2 * ll + aa))


class TestSubstitute:
    def test_skew_substitution(self):
        assert (d + lam * 2).substitute({"lam": -d - lam}) == -d - lam * 2

    def test_shift(self):
        assert (d + lam).substitute({"del": d + mu}) == d + mu + lam

    def test_lambda_shift_of_h(self):
        h = lam * (d - lam + a)
        assert h.substitute({"lam": lam + mu}) == (lam + mu) * (d - lam - mu + a)

    def test_simultaneous(self):
        assert (d * lam).substitute({"del": lam, "lam": d}) == d * lam

    def test_unbound_pass_through(self):
        assert (d + beta).substitute({"lam": mu}) == d + beta


class TestCoefficientsIn:
    def test_linear(self):
        parts = (d + lam * 2).coefficients_in(["lam"])
        assert parts == {(0,): d, (1,): R.const(2)}

    def test_zero(self):
        assert R.zero().coefficients_in(["lam", "del"]) == {}

    def test_cubic(self):
        parts = P("lam*del^2 + 3*lam^2*del + 2*lam^3").coefficients_in(["lam"])
        assert parts == {(1,): d ** 2, (2,): d * 3, (3,): R.const(2)}


class TestParse:
    def test_simple(self):
        assert P("del + 2*lam") == d + lam * 2

    def test_params(self):
        assert P("(del + beta*lam + gamma)") == d + beta * lam + gamma

    def test_product(self):
        assert P("lam*(del - lam + a)") == lam * d - lam ** 2 + a * lam

    def test_rational_and_power(self):
        assert P("-3/2*del^2 + lam") == d ** 2 * Fraction(-3, 2) + lam

    def test_unary_minus_only_leading(self):
        with pytest.raises(ParseError):
            P("del - -lam")

    def test_whitespace_insignificant(self):
        assert P(" ( del+lam ) ^ 2 ") == P("(del+lam)^2")

    def test_syntax_error_position(self):
        with pytest.raises(ParseError) as exc:
            P("del + * lam")
        assert exc.value.position == 6

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError):
            P("del + zeta")

    def test_exponent_overflow(self):
        with pytest.raises(ExponentOverflowError):
            P("del^100000")

    def test_zero_denominator(self):
        with pytest.raises(ParseError):
            P("1/0")


class TestProperties:
    @settings(max_examples=1000)
    @given(polys(), polys(), polys())
    def test_ring_laws(self, p, q, r):
        assert p + q == q + p
        assert p * q == q * p
        assert (p + q) + r == p + (q + r)
        assert (p * q) * r == p * (q * r)
        assert p * (q + r) == p * q + p * r
        assert p - p == RING.zero()

    @settings(max_examples=300)
    @given(polys(), polys())
    def test_ring_laws_against_oracle(self, p, q):
        assert to_sympy(p * q) == (to_sympy(p) * to_sympy(q)).expand()
        assert to_sympy(p + q) == (to_sympy(p) + to_sympy(q)).expand()

    @settings(max_examples=150)
    @given(polys(), polys(), polys(max_terms=2, max_deg=1), polys(max_terms=2, max_deg=1))
    def test_substitution_homomorphism(self, p, q, s1, s2):
        b = {"del": s1, "lam": s2}
        assert (p * q).substitute(b) == p.substitute(b) * q.substitute(b)
        assert (p + q).substitute(b) == p.substitute(b) + q.substitute(b)

    @settings(max_examples=300)
    @given(polys())
    def test_display_round_trip(self, p):
        assert parse(str(p), RING) == p

    @settings(max_examples=300)
    @given(polys(), st.sampled_from([["lam"], ["del", "mu"], ["a"], ["del", "lam", "mu", "a"]]))
    def test_coefficients_reassemble(self, p, vars):
        total = RING.zero()
        for exps, coeff in p.coefficients_in(vars).items():
            assert not coeff.is_zero()
            mono = RING.one()
            for v, e in zip(vars, exps):
                mono = mono * RING.var(v) ** e
            total = total + mono * coeff
        assert total == p


def test_catalog_polynomials_round_trip():
    from confkernel import catalog

    for key in catalog.keys():
        alg = catalog.build(key, symbolic=True)
        for row in alg.table:
            for vec in row:
                for c in vec:
                    assert parse(str(c), alg.ring) == c
