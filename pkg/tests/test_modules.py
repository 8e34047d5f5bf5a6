from __future__ import annotations

from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
import sympy as sp

import oracle
from samples import module_params
from confkernel import catalog
from confkernel.catalog import SchemaError, UnknownKeyError
from confkernel.modules import (TABLE_FAMILIES, build_module, coupling_residual, discover_rank11,
                                divide_by_del_poly, dumps_module, is_module, loads_module, make_module,
                                module_family, module_keys, submodule_check)
from confkernel.solver import SymbolicParameterError, solve_keyeq

SYMBOLIC_OK = [k for k in module_keys() if not module_family(k).numeric]


def test_nineteen_table_families():
    assert len(TABLE_FAMILIES) == 19


class TestIsModule:
    def test_hv_symbolic(self):
        M = build_module("HV-M")
        assert set(M.ring.params) >= {"Delta", "a", "b"}
        assert is_module(M).passed

    def test_mabc_sample(self):
        M = build_module("T7.3-Mabc", {"Delta": 1, "a": 0, "b": 2, "c": 3})
        assert M.entry("H", "v0", "v0") == M.ring.const(6)
        assert is_module(M).passed

    def test_m4_wrong_weight_fails(self):
        M = build_module("T7.3-M4", {"a": 0, "k": 5})
        d, lam = M.ring.gens("del", "lam")
        acts = {(g, p): {q: M.entry(g, p, q) for q in M.basis} for g in M.algebra.gens for p in M.basis}
        acts[("L", "v0")] = {"v0": d + lam * 2}
        bad = make_module(M.algebra, "bad", M.basis, M.parities, acts)
        assert not is_module(bad).passed

    def test_wrong_bc_fails(self):
        M = build_module("T7.3-Mabc", {"Delta": 1, "a": 0, "b": 2, "c": 3})
        acts = {(g, p): {q: M.entry(g, p, q) for q in M.basis} for g in M.algebra.gens for p in M.basis}
        acts[("H", "v0")] = {"v0": 5}
        acts[("H", "v1")] = {"v1": 5}
        assert not is_module(make_module(M.algebra, "bad", M.basis, M.parities, acts)).passed

    @pytest.mark.parametrize("key", SYMBOLIC_OK)
    def test_symbolic(self, key):
        assert is_module(build_module(key, symbolic=True)).passed

    @pytest.mark.parametrize("key", module_keys())
    def test_samples(self, key):
        for params in module_params(key, 5):
            rep = is_module(build_module(key, params))
            assert rep.passed, (params, rep.residuals[:1])

    @pytest.mark.parametrize("key", module_keys())
    def test_parity_flip(self, key):
        for params in module_params(key, 2, seed=1):
            M = build_module(key, params)
            F = M.flipped()
            assert [p.word for p in F.parities] != [p.word for p in M.parities]
            assert is_module(F).passed

    def test_parity_violation(self):
        A = catalog.build("HVS", {"alpha": 1})
        M = make_module(A, "bad", ["v0", "v1"], ["even", "odd"], {("L", "v0"): {"v1": 1}})
        assert M.parity_violations() == [("L", "v0", "v1")]
        assert not is_module(M).passed


class TestBuild:
    def test_m1(self):
        M = build_module("T7.3-M1", {"Delta": 0, "a": 0, "b": 1, "c": 1})
        assert M.entry("G", "v0", "v1") == M.ring.one() and M.entry("G", "v1", "v0") == M.ring.one()

    def test_m1_defaults(self):
        M = build_module("T7.3-M1", {"Delta": 1, "a": 2})
        assert M.entry("G", "v1", "v0").is_zero() and M.entry("G", "v0", "v1") == M.ring.one()

    def test_t74_m4(self):
        M = build_module("T7.4-M4", {"a": 0, "k": 5, "beta": 2, "gamma": 0})
        R = M.ring
        assert M.entry("L", "v0", "v0") == R.parse("del + 5*lam")
        assert M.entry("L", "v1", "v1") == R.parse("del + 5*lam")
        assert M.entry("E", "v0", "v1") == R.parse("del + 5*lam")

    def test_t73_m5(self):
        M = build_module("T7.3-M5", {"a": 1})
        R = M.ring
        assert M.entry("L", "v1", "v1") == R.parse("del - 2*lam + 1")
        assert M.entry("G", "v0", "v1") == R.parse("lam*(del + lam + 1)*(del + 2*lam + 1)")
        assert M.entry("G", "v1", "v0").is_zero()

    def test_t74_m7_weights(self):
        M = build_module("T7.4-M7", {"a": 0, "gamma": 0})
        R = M.ring
        assert M.entry("L", "v0", "v0") == R.parse("del + 5/3*lam")
        assert M.entry("L", "v1", "v1") == R.parse("del - 2/3*lam")
        assert M.entry("E", "v0", "v1") == R.parse("(del - lam)*(del + 1/2*lam)*(del + 2*lam)")
        assert is_module(M).passed

    def test_t74_m7_tabulated_weights_fail(self):
        M = build_module("T7.4-M7", {"a": 0, "gamma": 0})
        d, lam = M.ring.gens("del", "lam")
        acts = {(g, p): {q: M.entry(g, p, q) for q in M.basis} for g in M.algebra.gens for p in M.basis}
        acts[("L", "v0")] = {"v0": d + lam * Q(5, 6)}
        acts[("L", "v1")] = {"v1": d + lam * Q(-3, 2)}
        assert not is_module(make_module(M.algebra, "tabulated", M.basis, M.parities, acts)).passed

    def test_schema(self):
        with pytest.raises(SchemaError):
            build_module("T7.3-Mabc", {"Delta": 1, "a": 0, "b": 0, "c": 1})
        with pytest.raises(SchemaError):
            build_module("T7.4-M5", {"beta": 2, "gamma": 0, "a": 0})
        with pytest.raises(SchemaError):
            build_module("T7.4-M6", {"gamma": 0, "a": 0})
        with pytest.raises(SchemaError):
            build_module("Vir-M", {"Delta": 1, "q": 2})
        with pytest.raises(UnknownKeyError):
            build_module("T9-M1")


class TestCoupling:
    @pytest.mark.parametrize("key", ["T7.3-Mabc", "T7.3-M1"])
    def test_symbolic(self, key):
        assert coupling_residual(build_module(key, symbolic=True)).is_zero()

    @pytest.mark.parametrize("key", ["T7.3-Mabc", "T7.3-M1"])
    def test_samples(self, key):
        for params in module_params(key, 5):
            assert coupling_residual(build_module(key, params)).is_zero()


def hvs2(beta, gamma, tau):
    return catalog.build("HVS2", {"beta": beta, "gamma": gamma, "tau": tau})


class TestDiscovery:
    def test_m2_row(self):
        res = discover_rank11(hvs2(1, 0, 0), 2, 1, 0, 0)
        assert res.dimension == 1 and str(res.h0()[0]) == "lam"

    def test_m2_row_with_b(self):
        res = discover_rank11(hvs2(1, 0, 0), 5, 4, 0, 3)
        assert res.dimension == 1 and str(res.h0()[0]) == "lam"

    def test_tau_nonzero_lambda_free_solutions(self):
        # with tau != 0 and H v1 = 0 the H-E identity forces h0 to be free of lam, and then
        # the key equation leaves h0 = 1 when d0 - d1 + beta - 1 = 0 and h0 = del + a when it is 1 with d1 = 0
        for beta, gamma, tau in [(2, 1, 1), (1, 0, 3), (Q(5, 2), -1, Q(1, 2))]:
            A = hvs2(beta, gamma, tau)
            for d0 in (Q(0), Q(1), Q(3, 2), Q(2)):
                for d1 in (Q(0), Q(1), Q(1, 2), Q(-1)):
                    s = d0 - d1 + beta - 1
                    want = int(s == 0) + int(s == 1 and d1 == 0)
                    res = discover_rank11(A, d0, d1, 0, 0)
                    assert res.dimension == want, (beta, gamma, tau, d0, d1)
                    assert all(h.degree("lam") == 0 for h in res.h0())

    def test_tau_nonzero_counterexample_independent(self):
        d, l = sp.symbols("d l")
        br, par = oracle.hvs2_brackets(2, 1, 1)
        acts = {("L", "v0"): {"v0": d - 1}, ("L", "v1"): {"v1": d + l}, ("H", "v0"): {"v0": -1},
                ("E", "v0"): {"v1": 1}}
        assert oracle.module_identity_failures(br, par, acts, {"v0": 0, "v1": 1}) == []
        res = discover_rank11(hvs2(2, 1, 1), 0, 1, 0, 0)
        assert res.dimension == 1 and str(res.h0()[0]) == "1"
        # H acting by b - tau on v1 instead of v0 is not a module
        acts[("H", "v0")] = {"v0": 0}
        acts[("H", "v1")] = {"v1": -1}
        assert oracle.module_identity_failures(br, par, acts, {"v0": 0, "v1": 1})

    def test_tau_nonzero_generic_weights(self):
        assert discover_rank11(hvs2(2, 1, 1), Q(1, 3), Q(2, 7), 1, 0).dimension == 0

    def test_hvs(self):
        res = discover_rank11(catalog.build("HVS", {"alpha": 1}), 1, 0, 0, 0)
        assert sorted(str(h) for h in res.h0()) == ["del", "lam"]

    def test_modules_pass(self):
        res = discover_rank11(hvs2(1, 0, 0), 1, 0, 0, 0)
        assert res.dimension == 2
        assert all(is_module(M).passed for M in res.modules)

    def test_b_nonzero_forces_del_free(self):
        res = discover_rank11(hvs2(1, 0, 0), 1, 0, 0, 3)
        assert [str(h) for h in res.h0()] == ["lam"]

    def test_symbolic_refused(self):
        with pytest.raises(SymbolicParameterError):
            discover_rank11(catalog.build("HVS2", symbolic=True), 1, 0, 0)

    @settings(max_examples=30)
    @given(st.sampled_from([Q(1), Q(2), Q(3), Q(5, 3), Q(1, 2), Q(-1)]),
           st.sampled_from([Q(0), Q(1), Q(-1), Q(1, 2), Q(2), Q(3)]),
           st.sampled_from([Q(0), Q(1), Q(-2), Q(-2, 3), Q(1, 2), Q(2)]),
           st.sampled_from([Q(0), Q(1), Q(-2)]), st.sampled_from([Q(0), Q(3, 2)]))
    def test_matches_key_equation(self, beta, d0, d1, gamma, a):
        # h0(del, lam) = f(del + a, lam - gamma) with f solving the key equation at (d0, d1, beta - 1)
        res = discover_rank11(hvs2(beta, gamma, 0), d0, d1, a, 0)
        assert res.dimension == solve_keyeq(d0, d1, beta - 1, 3).dimension


class TestSubmodule:
    def test_vir_weight_zero(self):
        M = build_module("Vir-M", {"Delta": 0, "a": 2})
        rep = submodule_check(M, "del + 2")
        assert rep.passed and rep.notes == ["L_lam -> del + lam + 2"]

    def test_not_closed(self):
        rep = submodule_check(build_module("Vir-M", {"Delta": 1, "a": 0}), "del")
        assert not rep.passed

    def test_trivial(self):
        assert submodule_check(build_module("HV-M", {"Delta": 3, "a": 1, "b": 2}), "1").passed

    def test_division(self):
        M = build_module("Vir-M", {"Delta": 1, "a": 0})
        R = M.ring
        q, r = divide_by_del_poly(R.parse("del^2 + 3*del*lam + 2"), R.parse("del + 1"))
        assert q * R.parse("del + 1") + r == R.parse("del^2 + 3*del*lam + 2") and r.degree("del") == 0


class TestFormat:
    @pytest.mark.parametrize("key", module_keys())
    def test_round_trip(self, key):
        M = build_module(key, module_params(key, 1)[0])
        assert loads_module(dumps_module(M)).action == M.action

    @pytest.mark.parametrize("key", SYMBOLIC_OK)
    def test_round_trip_symbolic(self, key):
        M = build_module(key, symbolic=True)
        back = loads_module(dumps_module(M))
        assert back.action == M.action and back.ring == M.ring
