"""Random compatible Gram matrices with exact rational entries.

An instance is ``H = (a0 n0 gamma0)^T (a0 n0 gamma0)`` where ``a0`` is a
product of simple coroots evaluated at powers of two, ``n0`` has quarter
integer root coordinates and ``gamma0`` is a random word in the integral
generators ``u_alpha(m)`` and ``s_alpha``.  Everything is rational, so ``H``
is exact and compatible with the group by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .groups import GroupDescriptor
from .matrix import RationalMatrix, int_identity


@dataclass(frozen=True)
class Instance:
    H: RationalMatrix
    a0: tuple[Fraction, ...]
    n0: RationalMatrix
    gamma0: np.ndarray

    def H_float(self) -> np.ndarray:
        return self.H.to_float()


def random_torus_exact(desc: GroupDescriptor, rng: np.random.Generator,
                       max_exponent: int = 3) -> tuple[Fraction, ...]:
    """``prod_j alpha_j_check(2^k_j)`` with ``0 <= k_j <= max_exponent``."""
    ks = rng.integers(0, max_exponent + 1, size=desc.rank)
    exps = np.zeros(desc.dim, dtype=np.int64)
    for k, r in zip(ks, desc.simple):
        exps += int(k) * r.coroot.astype(np.int64)
    return tuple(Fraction(2) ** int(e) for e in exps)


def random_unipotent_exact(desc: GroupDescriptor, rng: np.random.Generator,
                           bound: int = 8, denominator: int = 4) -> RationalMatrix:
    coords = [Fraction(int(c), denominator) for c in rng.integers(-bound, bound + 1,
                                                                  size=len(desc.roots))]
    return desc.compose_exact(coords)


def random_word(desc: GroupDescriptor, rng: np.random.Generator, length: int = 8,
                max_shift: int = 3) -> np.ndarray:
    """A random product of ``u_alpha(m)`` (``1 <= |m| <= max_shift``) and ``s_alpha``."""
    gamma = int_identity(desc.dim)
    for _ in range(length):
        if rng.random() < 0.5:
            r = desc.simple[rng.integers(len(desc.simple))]
            gamma = gamma.dot(desc.simple_reflection_int(r))
        else:
            r = desc.roots[rng.integers(len(desc.roots))]
            m = int(rng.integers(1, max_shift + 1)) * int(rng.choice([-1, 1]))
            gamma = gamma.dot(desc.u_alpha_int(r, m))
    return gamma


def random_instance(desc: GroupDescriptor, seed: Optional[int] = None, *,
                    rng: Optional[np.random.Generator] = None, max_exponent: int = 3,
                    word_length: int = 8) -> Instance:
    rng = rng if rng is not None else np.random.default_rng(seed)
    a0 = random_torus_exact(desc, rng, max_exponent)
    n0 = random_unipotent_exact(desc, rng)
    gamma0 = random_word(desc, rng, word_length)
    return make_instance(desc, a0, n0, gamma0)


def make_instance(desc: GroupDescriptor, a0, n0: RationalMatrix, gamma0) -> Instance:
    a0 = tuple(Fraction(x) for x in a0)
    F = RationalMatrix.diag(a0) @ n0 @ RationalMatrix(np.asarray(gamma0, dtype=object).tolist())
    return Instance(F.T @ F, a0, n0, np.asarray(gamma0, dtype=object))
