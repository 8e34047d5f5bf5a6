"""Independent reference computations with sympy, used to cross-check frozen values."""

from __future__ import annotations

import sympy as sp

from confkernel import Polynomial

SYMS = {}


def sym(name):
    if name not in SYMS:
        SYMS[name] = sp.Symbol(name)
    return SYMS[name]


def to_sympy(p: Polynomial):
    names = p.ring.partial, *p.ring.lambdas, *p.ring.params
    expr = sp.Integer(0)
    for exps, c in p.items():
        term = sp.Rational(c.numerator, c.denominator) if hasattr(c, "numerator") else sp.Integer(c)
        for n, e in zip(names, exps):
            if e:
                term *= sym(n) ** e
        expr += term
    return sp.expand(expr)


def keyeq_holds(f, a, b, c) -> bool:
    x, y, z = sp.symbols("x y z")
    f = sp.sympify(f)

    def F(u, v):
        return f.subs({x: u, y: v}, simultaneous=True)

    expr = (x + b * y) * F(x + y, z) - (x + a * y + z) * F(x, z) - (c * y - z) * F(x, y + z)
    return sp.expand(sp.simplify(expr)) == 0


def keyeq_dimension(a, b, c, bound: int) -> int:
    """Brute-force nullity of the key equation over monomials of total degree <= bound."""
    x, y, z = sp.symbols("x y z")
    monos = [x ** i * y ** j for i in range(bound + 1) for j in range(bound + 1 - i)]
    coeffs = sp.symbols(f"k0:{len(monos)}")
    f = sum(k * m for k, m in zip(coeffs, monos))

    def F(u, v):
        return f.subs({x: u, y: v}, simultaneous=True)

    expr = sp.expand((x + b * y) * F(x + y, z) - (x + a * y + z) * F(x, z) - (c * y - z) * F(x, y + z))
    eqs = sp.Poly(expr, x, y, z).coeffs()
    M = sp.Matrix([[sp.diff(e, k) for k in coeffs] for e in eqs])
    return len(coeffs) - M.rank()


def dll_h_dimension(bd: int, bl: int) -> int:
    """Nullity of (l+m) f(-l-m, l) + (d+m) f(d+m, l) - (d+l+2m) f(d, l) over the bounded ansatz."""
    d, l, m = sp.symbols("d l m")
    monos = [d ** i * l ** j for i in range(bd + 1) for j in range(bl + 1)]
    coeffs = sp.symbols(f"k0:{len(monos)}")
    f = sum(k * mo for k, mo in zip(coeffs, monos))

    def F(u, v):
        return f.subs({d: u, l: v}, simultaneous=True)

    expr = sp.expand((l + m) * F(-l - m, l) + (d + m) * F(d + m, l) - (d + l + 2 * m) * F(d, l))
    eqs = sp.Poly(expr, d, l, m).coeffs()
    M = sp.Matrix([[sp.diff(e, k) for k in coeffs] for e in eqs])
    return len(coeffs) - M.rank()


def module_identity_failures(brackets, parities, actions, basis_parities):
    """Independent check of the module identity on generators with sympy.

    brackets: {(i, j): {k: expr in d, l}}; actions: {(g, p): {q: expr in d, l}};
    parities: {gen: 0|1}; basis_parities: {basis: 0|1}.  Returns failing (i, j, p).
    """
    d, l, m = sp.symbols("d l m")

    def act(g, p, dd, ll):
        return {q: sp.sympify(e).subs({d: dd, l: ll}, simultaneous=True) for q, e in actions.get((g, p), {}).items()}

    def act_on(g, vec, ll):
        # g_ll (sum_q c_q(d) v_q) = sum_q c_q(d + ll) g_ll v_q
        out = {}
        for q, c in vec.items():
            for r, e in act(g, q, d, ll).items():
                out[r] = out.get(r, 0) + c.subs(d, d + ll) * e
        return out

    bad = []
    gens = list(parities)
    for i in gens:
        for j in gens:
            s = (-1) ** (parities[i] * parities[j])
            for p in basis_parities:
                lhs = {}
                for k, e in brackets.get((i, j), {}).items():
                    coef = sp.sympify(e).subs({d: -l - m, l: l}, simultaneous=True)
                    for r, a in act(k, p, d, l + m).items():
                        lhs[r] = lhs.get(r, 0) + coef * a
                first = act_on(i, act(j, p, d, m), l)
                second = act_on(j, act(i, p, d, l), m)
                for r in set(lhs) | set(first) | set(second):
                    diff = lhs.get(r, 0) - first.get(r, 0) + s * second.get(r, 0)
                    if sp.expand(diff) != 0:
                        bad.append((i, j, p))
                        break
    return bad


def hvs2_brackets(beta, gamma, tau):
    """Generator brackets of the (beta, gamma, tau) family, including skew transposes."""
    d, l = sp.symbols("d l")
    br = {("L", "L"): {"L": d + 2 * l}, ("L", "H"): {"H": d + l}, ("L", "E"): {"E": d + beta * l + gamma},
          ("H", "E"): {"E": tau}}
    full = dict(br)
    par = {"L": 0, "H": 0, "E": 1}
    for (i, j), vec in br.items():
        if i != j:
            s = (-1) ** (par[i] * par[j])
            full[(j, i)] = {k: sp.expand(-s * sp.sympify(e).subs(l, -d - l)) for k, e in vec.items()}
    return full, par
