"""Shared pieces of the line-oriented file formats (algebras, maps, modules)."""

from __future__ import annotations

from typing import Iterator, Mapping, Sequence

from .parse import ParseError
from .poly import Polynomial, Ring


class FormatError(ValueError):
    """Malformed or inconsistent input file; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


def logical_lines(text: str) -> Iterator:
    """Yield ``(lineno, stripped_line)`` skipping blanks and ``#`` comments."""
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def split_assignment(line: str, lineno: int) -> tuple:
    if "=" not in line:
        raise FormatError("expected '='", lineno)
    head, rhs = line.split("=", 1)
    return head.split(), rhs.strip()


def parse_combination(rhs: str, ring: Ring, basis: Sequence[str], lineno: int,
                      forbid: Sequence[str] = ()) -> dict:
    """Parse ``poly * b1 + poly * b2 ...`` (or ``0``) into ``{basis name: poly}``.

    Basis names are temporarily treated as extra indeterminates; the parsed
    expression must be linear in them with no basis-free remainder.
    """
    clash = [b for b in basis if b in ring]
    if clash:
        raise FormatError(f"basis names {clash} clash with ring indeterminates", lineno)
    wide = ring.with_params(*basis)
    try:
        expr = wide.parse(rhs)
    except ParseError as exc:
        raise FormatError(f"{exc} in {rhs!r}", lineno) from exc
    out: dict = {}
    split = expr.coefficients_in(basis)
    for exps, coeff in split.items():
        if sum(exps) != 1:
            raise FormatError(f"expression is not linear in {list(basis)}: {rhs!r}", lineno)
        name = basis[exps.index(1)]
        out[name] = coeff.to_ring(ring)
    for name, poly in out.items():
        bad = [v for v in forbid if v in poly.variables()]
        if bad:
            raise FormatError(f"{bad} not allowed here: {poly}", lineno)
    return out


def format_combination(vec: Sequence[Polynomial], names: Sequence[str]) -> str:
    parts = [f"({c}) * {g}" for c, g in zip(vec, names) if not c.is_zero()]
    return " + ".join(parts) if parts else "0"


def read_text(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def check_ident(word: str, lineno: int) -> str:
    if not word.replace("_", "a").isalnum() or word[0].isdigit():
        raise FormatError(f"bad identifier {word!r}", lineno)
    return word


def param_header(params: Mapping | Sequence) -> list:
    lines = []
    for p in params:
        lines.append(f"params {p.name}" + (" nonzero" if p.nonzero else ""))
    return lines
