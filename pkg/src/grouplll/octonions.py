"""Split octonions in the Cayley–Dickson form and exact G2 membership.

An octonion is a pair ``(x, y)`` of 2x2 rational matrices with product
``(x, y)(z, w) = (xz - w y*, x* w + z y)``, where ``*`` is the adjugate.
The quadratic form is ``q(x, y) = det x + det y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .matrix import RationalMatrix, snap_to_integers

Mat2 = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


def _m2(a) -> Mat2:
    (p, q), (r, s) = a
    return ((Fraction(p), Fraction(q)), (Fraction(r), Fraction(s)))


def _mul2(a: Mat2, b: Mat2) -> Mat2:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _add2(a: Mat2, b: Mat2) -> Mat2:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def _sub2(a: Mat2, b: Mat2) -> Mat2:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def adjugate(a: Mat2) -> Mat2:
    """``(a b; c d) -> (d -b; -c a)``."""
    return ((a[1][1], -a[0][1]), (-a[1][0], a[0][0]))


def _det2(a: Mat2) -> Fraction:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


ZERO2: Mat2 = _m2(((0, 0), (0, 0)))
ONE2: Mat2 = _m2(((1, 0), (0, 1)))


@dataclass(frozen=True)
class Octonion:
    x: Mat2 = ZERO2
    y: Mat2 = ZERO2

    def __post_init__(self):
        object.__setattr__(self, "x", _m2(self.x))
        object.__setattr__(self, "y", _m2(self.y))

    def __mul__(self, other: "Octonion") -> "Octonion":
        return oct_mul(self, other)

    def __add__(self, other: "Octonion") -> "Octonion":
        return Octonion(_add2(self.x, other.x), _add2(self.y, other.y))

    def __sub__(self, other: "Octonion") -> "Octonion":
        return Octonion(_sub2(self.x, other.x), _sub2(self.y, other.y))

    def scale(self, c) -> "Octonion":
        c = Fraction(c)
        return Octonion(tuple(tuple(c * v for v in r) for r in self.x),
                        tuple(tuple(c * v for v in r) for r in self.y))


ONE = Octonion(ONE2, ZERO2)


def oct_mul(a: Octonion, b: Octonion) -> Octonion:
    """Cayley–Dickson product ``(x, y)(z, w) = (xz - w y*, x* w + z y)``."""
    x, y, z, w = a.x, a.y, b.x, b.y
    return Octonion(_sub2(_mul2(x, z), _mul2(w, adjugate(y))),
                    _add2(_mul2(adjugate(x), w), _mul2(z, y)))


def oct_q(a: Octonion) -> Fraction:
    return _det2(a.x) + _det2(a.y)


# (component, row, col, sign): e_i has a single entry ``sign`` at that slot
_BASIS_SLOTS = [
    ("x", 1, 0, 1),
    ("y", 1, 0, 1),
    ("y", 1, 1, 1),
    ("x", 1, 1, 1),
    ("x", 0, 0, 1),
    ("y", 0, 0, 1),
    ("y", 0, 1, -1),
    ("x", 0, 1, -1),
]


def basis_octonion(i: int) -> Octonion:
    """The basis element ``e_i`` for ``1 <= i <= 8``."""
    if not 1 <= i <= 8:
        raise IndexError("octonion basis index must be in 1..8")
    comp, r, c, s = _BASIS_SLOTS[i - 1]
    m = [[0, 0], [0, 0]]
    m[r][c] = s
    return Octonion(m, ZERO2) if comp == "x" else Octonion(ZERO2, m)


def from_coords(v: Sequence) -> Octonion:
    """Octonion with coordinates ``v`` in the basis ``e_1..e_8``."""
    if len(v) != 8:
        raise ValueError("an octonion has 8 coordinates")
    x = [[Fraction(0)] * 2 for _ in range(2)]
    y = [[Fraction(0)] * 2 for _ in range(2)]
    for (comp, r, c, s), coef in zip(_BASIS_SLOTS, v):
        (x if comp == "x" else y)[r][c] += s * Fraction(coef)
    return Octonion(x, y)


def to_coords(a: Octonion) -> list[Fraction]:
    return [s * (a.x if comp == "x" else a.y)[r][c] for comp, r, c, s in _BASIS_SLOTS]


def polar_gram() -> RationalMatrix:
    """Gram matrix of ``b(u, v) = q(u + v) - q(u) - q(v)`` in the basis."""
    e = [basis_octonion(i) for i in range(1, 9)]
    return RationalMatrix([[oct_q(u + v) - oct_q(u) - oct_q(v) for v in e] for u in e])


def _structure_constants() -> list[list[list[Fraction]]]:
    e = [basis_octonion(i) for i in range(1, 9)]
    return [[to_coords(u * v) for v in e] for u in e]


_PRODUCTS = _structure_constants()
_S = np.fliplr(np.eye(8, dtype=np.int64)).astype(object)


def is_g2_element(M) -> bool:
    """Exact test that ``M`` preserves ``q`` and the octonion product.

    Float input is first snapped to integers (``G2(Z)`` is integral).
    """
    if isinstance(M, RationalMatrix):
        rows = M.tolist()
    else:
        arr = np.asarray(M)
        if arr.dtype.kind == "f":
            arr = snap_to_integers(arr)
        rows = [[Fraction(x) for x in r] for r in arr.tolist()]
    if len(rows) != 8 or any(len(r) != 8 for r in rows):
        return False
    Mo = np.array(rows, dtype=object)
    if not np.array_equal(Mo.T.dot(_S).dot(Mo), _S):
        return False
    cols = [from_coords(Mo[:, j]) for j in range(8)]
    for i in range(8):
        for j in range(8):
            lhs = Mo.dot(np.array(_PRODUCTS[i][j], dtype=object))
            if list(lhs) != to_coords(cols[i] * cols[j]):
                return False
    return True
