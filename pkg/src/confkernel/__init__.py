"""Exact verification kernel for finite Lie conformal superalgebras."""

from .poly import Indeterminate, Polynomial, Ring, RingMismatchError, Role
from .parse import ParseError, parse

__all__ = ["Indeterminate", "Polynomial", "Ring", "RingMismatchError", "Role", "ParseError", "parse"]
__version__ = "0.1.0"
