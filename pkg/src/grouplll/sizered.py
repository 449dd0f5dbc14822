"""Group-uniform size reduction in ordered root-group coordinates.

Every ``n`` in ``N`` factors uniquely as ``u_1(t_1) ... u_r(t_r)`` along a
good ordering of the positive roots.  The coordinate ``t_i`` is read from
the marker entry of ``u_i`` after peeling off the earlier factors; explicit
matrix multiplication takes the place of commutator tables.

Two size reductions are provided.  :func:`size_reduce` is the inductive
procedure in coordinates.  :func:`size_reduce_entries` is the column
operation schedule that normalizes matrix entries directly; it lands in a
different fundamental set (see :meth:`GroupDescriptor.in_omega`).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError
from .groups import GroupDescriptor, Root
from .matrix import RationalMatrix, int_identity

RESIDUAL_TOLERANCE = 1e-9


def verify_good_ordering(desc: GroupDescriptor, ordering: Optional[Sequence] = None) -> bool:
    """Exhaustive check that ``a_k = c_i a_i + c_j a_j`` (``c >= 1``) forces ``k > max(i, j)``.

    ``ordering`` may list roots (or labels) of ``desc``, or raw coefficient
    vectors in the simple-root basis; by default the stored ordering is used.
    """
    if ordering is None:
        vecs = [np.array(r.coeffs) for r in desc.roots]
    else:
        vecs = []
        for item in ordering:
            if isinstance(item, (tuple, list, np.ndarray)) and all(
                    isinstance(x, (int, np.integer)) for x in item) and len(item) == desc.rank \
                    and desc.kind != "sl":
                vecs.append(np.array(item))
            else:
                vecs.append(np.array(desc.root(item).coeffs))
    return _good(vecs)


def _good(vecs: Sequence[np.ndarray]) -> bool:
    index = {tuple(int(x) for x in v): k for k, v in enumerate(vecs)}
    top = max(int(v.sum()) for v in vecs)
    for i, j in itertools.permutations(range(len(vecs)), 2):
        for ci in range(1, top + 1):
            for cj in range(1, top + 1):
                s = tuple(int(x) for x in ci * vecs[i] + cj * vecs[j])
                if sum(s) > top:
                    break
                k = index.get(s)
                if k is not None and k <= max(i, j):
                    return False
    return True


def coordinates(desc: GroupDescriptor, n, check: bool = True) -> np.ndarray:
    """Ordered coordinates ``t_1..t_r`` of a float unipotent matrix."""
    n = np.array(n, dtype=float)
    if n.shape != (desc.dim, desc.dim):
        raise DimensionError(f"expected a {desc.dim}x{desc.dim} matrix")
    resid = n
    out = np.empty(len(desc.roots))
    for k, r in enumerate(desc.roots):
        t = r.sign * resid[r.marker]
        out[k] = t
        if t:
            resid = desc.u_alpha(r, -t) @ resid
    if check:
        err = np.abs(resid - np.eye(desc.dim)).max()
        if err > RESIDUAL_TOLERANCE * max(1.0, np.abs(n).max()):
            raise ValueError(f"matrix is not in N (peel-off residual {err:.3g})")
    return out


def coordinates_exact(desc: GroupDescriptor, n: RationalMatrix) -> list[Fraction]:
    """Exact ordered coordinates of a rational unipotent matrix."""
    if not isinstance(n, RationalMatrix):
        n = RationalMatrix(n)
    resid = n
    out = []
    for r in desc.roots:
        t = r.sign * resid[r.marker]
        out.append(t)
        if t:
            resid = desc.u_alpha_exact(r, -t) @ resid
    if resid != RationalMatrix.identity(desc.dim):
        raise ValueError("matrix is not in N")
    return out


def project_unipotent(desc: GroupDescriptor, n) -> np.ndarray:
    """Rebuild ``n`` from its coordinates, landing exactly on the group's ``N``."""
    return desc.compose(coordinates(desc, n, check=False))


def _round_shift(t: float) -> int:
    """The integer ``m`` with ``t + m`` in ``[-1/2, 1/2)``."""
    return -math.floor(t + 0.5)


def size_reduce(desc: GroupDescriptor, n) -> tuple[np.ndarray, np.ndarray]:
    """Unique ``gamma_n`` in ``N(Z)`` with all coordinates of ``n gamma_n`` in ``[-1/2, 1/2)``.

    Returns ``(gamma_n, n gamma_n)``; ``gamma_n`` is an exact integer matrix.
    """
    n = np.array(n, dtype=float)
    gamma = int_identity(desc.dim)
    resid = n.copy()
    for r in desc.roots:
        t = r.sign * resid[r.marker]
        m = _round_shift(t)
        if m:
            n = n @ desc.u_alpha(r, m)
            resid = resid @ desc.u_alpha(r, m)
            gamma = gamma.dot(desc.u_alpha_int(r, m))
            t += m
        if t:
            resid = desc.u_alpha(r, -t) @ resid
    return gamma, n


def reduce_entry(desc: GroupDescriptor, root: Root, n: np.ndarray) -> tuple[int, np.ndarray]:
    """Column operation bringing the marker entry of ``root`` into ``[-1/2, 1/2)``.

    Returns ``(m, n u_root(m))``.  The marker entry moves by ``sign * m``.
    """
    e = root.sign * n[root.marker]
    m = _round_shift(e)
    if m:
        n = n @ desc.u_alpha(root, m)
    return m, n


def size_reduce_entries(desc: GroupDescriptor, n) -> tuple[np.ndarray, np.ndarray]:
    """Column-operation size reduction along the descriptor's schedule."""
    n = np.array(n, dtype=float)
    gamma = int_identity(desc.dim)
    for r in desc.red_schedule:
        m, n = reduce_entry(desc, r, n)
        if m:
            gamma = gamma.dot(desc.u_alpha_int(r, m))
    return gamma, n


def size_reduce_omega(desc: GroupDescriptor, n, omega: str = "entries"):
    if omega == "entries":
        return size_reduce_entries(desc, n)
    if omega == "coordinates":
        return size_reduce(desc, n)
    raise ValueError("omega must be 'entries' or 'coordinates'")
