"""Exact nullspaces of sparse rational matrices.

Rows are dicts ``{column: rational}``.  ``nullspace`` returns the canonical
basis: the reduced row-echelon form of the solution space, first nonzero
entry 1, columns in their given order.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .poly import as_rational


def _normalize_int_row(row: dict) -> dict:
    """Clear denominators and divide out the content; sign fixed by first column."""
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    ints = {c: int(v * den) for c, v in row.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {c: v // g for c, v in ints.items()}
    first = min(ints)
    if ints[first] < 0:
        ints = {c: -v for c, v in ints.items()}
    return ints


def dedupe_rows(rows: Iterable[dict]) -> list:
    seen = set()
    out = []
    for r in rows:
        r = {c: v for c, v in r.items() if v}
        if not r:
            continue
        n = _normalize_int_row(r)
        key = tuple(sorted(n.items()))
        if key not in seen:
            seen.add(key)
            out.append(n)
    return out


def rref(rows: Sequence[dict], ncols: int) -> tuple:
    """Exact reduced row-echelon form; returns (pivot rows by column, pivot columns)."""
    pivots: dict = {}
    for raw in rows:
        row = {c: Fraction(v) for c, v in raw.items() if v}
        # eliminate existing pivots in increasing column order
        while row:
            hit = [c for c in row if c in pivots]
            if not hit:
                break
            c = min(hit)
            f = row[c]
            for k, v in pivots[c].items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        if not row:
            continue
        lead = min(row)
        inv = 1 / row[lead]
        row = {k: v * inv for k, v in row.items()}
        # back-substitute into earlier pivots
        for pc, prow in pivots.items():
            f = prow.get(lead)
            if f:
                for k, v in row.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivots[lead] = row
    return pivots, sorted(pivots)


def nullspace_from_rref(pivots: dict, ncols: int) -> list:
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for pc, prow in pivots.items():
            v = prow.get(f)
            if v:
                vec[pc] = -v
        basis.append(vec)
    return canonical_basis(basis, ncols)


def canonical_basis(vectors: Sequence[dict], ncols: int) -> list:
    """RREF of a list of vectors: unique representative of their span."""
    pivots, cols = rref(vectors, ncols)
    return [dict(sorted(pivots[c].items())) for c in cols]


def exact_nullspace(rows: Sequence[dict], ncols: int) -> list:
    pivots, _ = rref(dedupe_rows(rows), ncols)
    return nullspace_from_rref(pivots, ncols)


def dot(row: dict, vec: dict):
    if len(vec) < len(row):
        return sum(v * row[c] for c, v in vec.items() if c in row)
    return sum(v * vec[c] for c, v in row.items() if c in vec)


def as_exact(v):
    return as_rational(v)
