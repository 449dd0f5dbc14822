"""Reading matrices given as decimal or fraction strings, and the bundled examples.

Every entry is kept as its literal string so that both an exact value and
an uncertainty can be derived from it: integers and ``p/q`` fractions are
exact, while a decimal literal is uncertain by half a unit in its last
printed digit (``"876747."`` by 0.5, ``"1.22394e7"`` by 50).
"""

from __future__ import annotations

import json
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from importlib import resources
from typing import Sequence

import numpy as np

from .matrix import RationalMatrix


def _literal(s) -> str:
    if isinstance(s, bool):
        raise ValueError("booleans are not matrix entries")
    if isinstance(s, (int, np.integer)):
        return str(int(s))
    if isinstance(s, (float, np.floating)):
        return repr(float(s))
    if isinstance(s, Fraction):
        return f"{s.numerator}/{s.denominator}"
    if isinstance(s, str):
        return s.strip()
    raise ValueError(f"cannot read a matrix entry from {s!r}")


def parse_entry(s) -> tuple[Fraction, Fraction]:
    """``(value, uncertainty)`` of one literal; the uncertainty is 0 for exact entries."""
    lit = _literal(s)
    if "/" in lit:
        try:
            return Fraction(lit), Fraction(0)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad fraction {lit!r}") from exc
    try:
        d = Decimal(lit)
    except InvalidOperation as exc:
        raise ValueError(f"bad number {lit!r}") from exc
    if not d.is_finite():
        raise ValueError(f"non-finite entry {lit!r}")
    value = Fraction(d)
    is_int_literal = lit.lstrip("+-").isdigit()
    if is_int_literal:
        return value, Fraction(0)
    exp = d.as_tuple().exponent
    return value, Fraction(1, 2) * Fraction(10) ** exp


def _rows(rows: Sequence[Sequence]) -> list[list]:
    rows = [list(r) for r in rows]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("matrix rows must be non-empty and of equal length")
    return rows


def parse_matrix(rows: Sequence[Sequence]) -> tuple[np.ndarray, np.ndarray]:
    """Float values and per-entry uncertainties of a matrix of literals."""
    parsed = [[parse_entry(x) for x in r] for r in _rows(rows)]
    vals = np.array([[float(v) for v, _ in r] for r in parsed])
    sig = np.array([[float(e) for _, e in r] for r in parsed])
    return vals, sig


def parse_exact(rows: Sequence[Sequence]) -> RationalMatrix:
    """Exact rational matrix; decimal literals are taken at face value."""
    return RationalMatrix([[parse_entry(x)[0] for x in r] for r in _rows(rows)])


def is_exact(rows: Sequence[Sequence]) -> bool:
    return all(parse_entry(x)[1] == 0 for r in _rows(rows) for x in r)


def format_fraction(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def load_example(name: str) -> dict:
    """Load a bundled example (``"so8"`` or ``"g2"``) as a dict of literal matrices."""
    fname = {"so8": "so8_example.json", "g2": "g2_example.json"}.get(name)
    if fname is None:
        raise KeyError(f"unknown example {name!r}")
    text = resources.files("grouplll").joinpath("data", fname).read_text()
    return json.loads(text)
