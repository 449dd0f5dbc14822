"""Dense matrices over exact rationals and over doubles.

Two backends live here.  :class:`RationalMatrix` is an immutable matrix of
:class:`fractions.Fraction` entries used for every identity that has to hold
exactly (integrality of ``gamma``, conjugation of integral matrices).  The
float backend is plain ``numpy.float64`` arrays, validated by
:func:`as_float_matrix`.  Integral group elements are numpy arrays with
``dtype=object`` holding Python ints, so they never overflow.

Conversion from rational to float is explicit (:meth:`RationalMatrix.to_float`).
The only route from floats back to exact numbers is :func:`snap_to_integers`.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, SingularMatrixError

SNAP_TOLERANCE = 1e-6


def _to_fraction(x) -> Fraction:
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (Integral, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        # "p/q", integers and decimal literals such as "1.22394e7" are exact.
        return Fraction(x.strip())
    raise TypeError(f"cannot build an exact rational from {type(x).__name__} {x!r}")


class RationalMatrix:
    """Immutable dense matrix with exact rational entries."""

    __slots__ = ("_rows", "_shape", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(_to_fraction(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise DimensionError("a matrix needs at least one row and one column")
        ncols = len(data[0])
        if any(len(r) != ncols for r in data):
            raise DimensionError("ragged rows")
        self._rows = data
        self._shape = (len(data), ncols)
        self._hash = None

    # construction ---------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def diag(cls, entries: Sequence) -> "RationalMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_array(cls, arr) -> "RationalMatrix":
        """Build from an integer or object array (floats are rejected)."""
        arr = np.asarray(arr)
        if arr.dtype.kind == "f":
            raise TypeError("float arrays must go through snap_to_integers")
        return cls(arr.tolist())

    # basic protocol -------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self._rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._rows)
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"RationalMatrix([{body}])"

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    # arithmetic -----------------------------------------------------------

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(zip(*self._rows))

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix([[-x for x in r] for r in self._rows])

    def _check_same_shape(self, other: "RationalMatrix") -> None:
        if self._shape != other._shape:
            raise DimensionError(f"shape mismatch {self._shape} vs {other._shape}")

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix(
            [[x + y for x, y in zip(r, s)] for r, s in zip(self._rows, other._rows)]
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix(
            [[x - y for x, y in zip(r, s)] for r, s in zip(self._rows, other._rows)]
        )

    def scale(self, c) -> "RationalMatrix":
        c = _to_fraction(c)
        return RationalMatrix([[c * x for x in r] for r in self._rows])

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self._shape[1] != other._shape[0]:
            raise DimensionError(f"cannot multiply {self._shape} by {other._shape}")
        cols = list(zip(*other._rows))
        return RationalMatrix(
            [[sum((x * y for x, y in zip(r, c) if x and y), Fraction(0)) for c in cols]
             for r in self._rows]
        )

    def inverse(self) -> "RationalMatrix":
        """Exact inverse by Gauss–Jordan elimination."""
        n, m = self._shape
        if n != m:
            raise DimensionError("only square matrices are invertible")
        aug = [list(r) + [Fraction(int(i == j)) for j in range(n)]
               for i, r in enumerate(self._rows)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise SingularMatrixError("matrix is singular")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv_p = 1 / aug[col][col]
            aug[col] = [x * inv_p for x in aug[col]]
            for r in range(n):
                f = aug[r][col]
                if r != col and f:
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
        return RationalMatrix([row[n:] for row in aug])

    def det(self) -> Fraction:
        n, m = self._shape
        if n != m:
            raise DimensionError("determinant needs a square matrix")
        a = [list(r) for r in self._rows]
        det = Fraction(1)
        for col in range(n):
            pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
            if pivot is None:
                return Fraction(0)
            if pivot != col:
                a[col], a[pivot] = a[pivot], a[col]
                det = -det
            det *= a[col][col]
            for r in range(col + 1, n):
                f = a[r][col] / a[col][col]
                if f:
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return det

    # conversions ----------------------------------------------------------

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._rows for x in r)

    def to_int_array(self) -> np.ndarray:
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return int_matrix([[int(x) for x in r] for r in self._rows])

    def to_float(self) -> np.ndarray:
        """Lossy conversion to the float backend."""
        return np.array([[float(x) for x in r] for r in self._rows], dtype=float)


def as_float_matrix(a, *, square: bool = False) -> np.ndarray:
    """Validate and convert to a 2-D float64 array; NaN and Inf are rejected."""
    if isinstance(a, RationalMatrix):
        arr = a.to_float()
    else:
        arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains NaN or Inf")
    return arr


def int_matrix(rows) -> np.ndarray:
    """Integer matrix as an object array of Python ints (overflow-free)."""
    arr = np.array(rows, dtype=object)
    if arr.ndim != 2:
        raise DimensionError("expected a 2-D integer matrix")
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, (float, np.floating)) or not float(x).is_integer():
            raise TypeError(f"non-integer entry {x!r}")
        out[idx] = int(x)
    return out


def int_identity(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = int(i == j)
    return out


def snap_to_integers(a, tol: float = SNAP_TOLERANCE) -> np.ndarray:
    """Round a float matrix to integers, refusing if any entry is off by more than ``tol``."""
    arr = as_float_matrix(a)
    rounded = np.rint(arr)
    err = np.abs(arr - rounded).max()
    if err > tol:
        raise ValueError(f"entry {err:.3g} away from an integer (tolerance {tol})")
    return int_matrix(rounded.astype(np.int64).tolist())


def mat_mul(a, b):
    """Matrix product in the operands' common backend (exact or float)."""
    if isinstance(a, RationalMatrix) and isinstance(b, RationalMatrix):
        return a @ b
    if isinstance(a, RationalMatrix) or isinstance(b, RationalMatrix):
        raise TypeError("operands use different arithmetic backends")
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    exact_a, exact_b = a.dtype == object, b.dtype == object
    if exact_a != exact_b:
        raise TypeError("operands use different arithmetic backends")
    return a.dot(b)


def mat_inverse_exact(a: RationalMatrix) -> RationalMatrix:
    if not isinstance(a, RationalMatrix):
        a = RationalMatrix.from_array(a)
    return a.inverse()


def transpose_conjugate_form(gamma, h):
    """Return ``gamma^T H gamma``.

    Exact when ``H`` is a :class:`RationalMatrix` (``gamma`` may then be a
    RationalMatrix or an integer array); otherwise computed in floats.
    """
    if isinstance(h, RationalMatrix):
        if not isinstance(gamma, RationalMatrix):
            gamma = RationalMatrix.from_array(gamma)
        if gamma.shape[0] != gamma.shape[1] or gamma.shape[0] != h.shape[0]:
            raise DimensionError("gamma and H must be square of the same size")
        return gamma.T @ h @ gamma
    h = as_float_matrix(h, square=True)
    g = gamma.to_float() if isinstance(gamma, RationalMatrix) else np.asarray(gamma, dtype=float)
    if g.shape != h.shape:
        raise DimensionError(f"gamma {g.shape} and H {h.shape} differ in shape")
    return g.T @ h @ g
