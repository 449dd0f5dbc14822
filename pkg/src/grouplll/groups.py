"""Root data of the supported groups, encoded as explicit matrices.

Every group is described by its positive root vectors ``X_alpha`` (integer
nilpotent matrices in the standard representation).  Everything else is
derived from them:

* ``u_alpha(t) = exp(t X_alpha)``, a polynomial in ``t`` with integral
  coefficient matrices ``X^k / k!``;
* ``s_alpha = u_alpha(1) exp(-X_alpha^T) u_alpha(1)``, the image of
  ``[[0, 1], [-1, 0]]`` under the root ``SL_2``;
* the coroot ``alpha_check(z) = diag(z ** h)`` with ``h = diag([X, X^T])``;
* the character ``alpha(a) = a[r] / a[c]`` read at the *marker* entry
  ``(r, c)``, where ``X_alpha[r, c] = sign`` is ``+1`` or ``-1``.

The torus ``A`` is ``exp`` of the span of the simple coroot vectors, so
torus elements are stored as 1-D arrays of positive diagonal entries.

Sp and SO use the labels ``-g, ..., -1, 1, ..., g`` for basis vectors; the
translation to array positions lives in :meth:`GroupDescriptor.position`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionError, UnknownRootError
from .matrix import RationalMatrix, int_identity, int_matrix

OMEGA_KINDS = ("entries", "coordinates")


@dataclass(frozen=True, eq=False)
class Root:
    """A positive root together with its matrix data."""

    label: Hashable
    name: str
    X: np.ndarray
    marker: tuple[int, int]
    sign: int
    index: int = -1
    simple_index: Optional[int] = None
    coeffs: tuple[int, ...] = ()
    height: int = 0
    coroot: np.ndarray = field(default=None, repr=False)
    character: np.ndarray = field(default=None, repr=False)
    powers: tuple[np.ndarray, ...] = field(default=(), repr=False)

    @property
    def is_simple(self) -> bool:
        return self.simple_index is not None

    def __repr__(self) -> str:
        return f"Root({self.name})"


def _nilpotent_powers(X: np.ndarray) -> tuple[np.ndarray, ...]:
    """Return ``(X, X^2/2, X^3/6, ...)`` as integer matrices, stopping at zero."""
    out = []
    current = np.eye(X.shape[0], dtype=np.int64)
    k = 1
    while True:
        current = current @ X
        if not current.any():
            break
        if np.any(current % math.factorial(k)):
            raise ValueError("root vector exponential has non-integral coefficients")
        out.append(current // math.factorial(k))
        k += 1
        if k > X.shape[0]:
            raise ValueError("root vector is not nilpotent")
    return tuple(out)


def _exp_int(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    return np.eye(n, dtype=np.int64) + sum(_nilpotent_powers(X), np.zeros((n, n), dtype=np.int64))


class GroupDescriptor:
    """Immutable root datum of one group in its standard representation.

    ``roots`` is the stored good ordering of the positive roots, ``simple``
    the simple roots in the order the reduction loop scans them, and
    ``red_schedule`` the order in which the matrix-entry size reduction
    visits the roots.
    """

    def __init__(self, kind: str, g: Optional[int], dim: int, S: Optional[np.ndarray],
                 roots: Sequence[Root], simple_labels: Sequence[Hashable],
                 red_schedule: Sequence[Hashable], ordering: Optional[Sequence[Hashable]] = None):
        self.kind = kind
        self.g = g
        self.dim = dim
        self.S = None if S is None else S.astype(np.int64)
        by_label = {r.label: r for r in roots}
        if len(by_label) != len(roots):
            raise ValueError("duplicate root labels")
        simple = [by_label[lab] for lab in simple_labels]

        # coroots and Cartan pairings
        coroots = {r.label: np.diag(r.X @ r.X.T - r.X.T @ r.X).astype(np.int64) for r in roots}
        chars = {}
        for r in roots:
            chi = np.zeros(dim, dtype=np.int64)
            chi[r.marker[0]] += 1
            chi[r.marker[1]] -= 1
            chars[r.label] = chi
        pair = lambda beta, alpha: int(chars[beta.label] @ coroots[alpha.label])
        cartan = np.array([[pair(a, b) for b in simple] for a in simple], dtype=np.int64)
        inv = np.linalg.inv(cartan.astype(float))

        # reorder into the requested good ordering
        order = list(ordering) if ordering is not None else None
        if order is None:
            order = [r.label for r in roots]
        coeff_of = {}
        for r in roots:
            p = np.array([pair(r, a) for a in simple], dtype=float)
            c = p @ inv
            ci = np.rint(c).astype(np.int64)
            if np.abs(c - ci).max() > 1e-9 or (ci < 0).any() or not ci.any():
                raise ValueError(f"{r.name} is not a positive root for the chosen simple roots")
            coeff_of[r.label] = tuple(int(x) for x in ci)

        simple_pos = {lab: k for k, lab in enumerate(simple_labels)}
        built = []
        for idx, lab in enumerate(order):
            r = by_label[lab]
            X = r.X.astype(np.int64)
            X.setflags(write=False)
            cor = coroots[lab]
            cor.setflags(write=False)
            chi = chars[lab]
            chi.setflags(write=False)
            powers = _nilpotent_powers(X)
            for P in powers:
                P.setflags(write=False)
            built.append(Root(label=lab, name=r.name, X=X, marker=r.marker, sign=r.sign,
                              index=idx, simple_index=simple_pos.get(lab),
                              coeffs=coeff_of[lab], height=sum(coeff_of[lab]),
                              coroot=cor, character=chi, powers=powers))
        self.roots: tuple[Root, ...] = tuple(built)
        self._by_label = {r.label: r for r in self.roots}
        self._by_name = {r.name: r for r in self.roots}
        self.simple: tuple[Root, ...] = tuple(self._by_label[lab] for lab in simple_labels)
        self.red_schedule: tuple[Root, ...] = tuple(self._by_label[lab] for lab in red_schedule)
        self.cartan = cartan
        self.coroot_basis = np.array([r.coroot for r in self.simple], dtype=float)
        self.sigma_character = sum((r.character for r in self.roots),
                                   np.zeros(dim, dtype=np.int64))
        self._reflections = {r.label: self._derive_reflection(r) for r in self.simple}
        self._validate()

    # ------------------------------------------------------------------
    # lookup

    def __repr__(self) -> str:
        return f"GroupDescriptor({self.kind!r}, g={self.g}, dim={self.dim})"

    @property
    def rank(self) -> int:
        return len(self.simple)

    def root(self, key) -> Root:
        """Resolve a :class:`Root`, a label, a name or (G2 only) an index 1..6."""
        if isinstance(key, Root):
            if self._by_label.get(key.label) is not key:
                raise UnknownRootError(f"{key.name} does not belong to {self!r}")
            return key
        if isinstance(key, str) and key in self._by_name:
            return self._by_name[key]
        norm = self._normalize_label(key)
        try:
            return self._by_label[norm]
        except (KeyError, TypeError):
            raise UnknownRootError(f"unknown root {key!r} for {self!r}") from None

    def _normalize_label(self, key):
        if isinstance(key, list):
            key = tuple(key)
        if self.kind in ("sp", "so") and isinstance(key, tuple) and len(key) == 3 and key[0] == "+":
            _, i, j = key
            return ("+", min(i, j), max(i, j))
        return key

    def simple_root(self, key) -> Root:
        r = self.root(key)
        if not r.is_simple:
            raise UnknownRootError(f"{r.name} is not a simple root")
        return r

    def position(self, i: int) -> int:
        """Array position of the basis label ``i`` (Sp/SO: -g..-1, 1..g; else 1-based)."""
        if self.kind in ("sp", "so"):
            if i == 0 or abs(i) > self.g:
                raise DimensionError(f"basis label {i} out of range")
            return i + self.g if i < 0 else i + self.g - 1
        if not 1 <= i <= self.dim:
            raise DimensionError(f"basis label {i} out of range")
        return i - 1

    def label_of(self, pos: int) -> int:
        if self.kind in ("sp", "so"):
            return pos - self.g if pos < self.g else pos - self.g + 1
        return pos + 1

    # ------------------------------------------------------------------
    # root groups

    def u_alpha(self, alpha, t: float) -> np.ndarray:
        """Float matrix ``u_alpha(t)``."""
        r = self.root(alpha)
        out = np.eye(self.dim)
        tk = 1.0
        for P in r.powers:
            tk *= t
            out += tk * P
        return out

    def u_alpha_int(self, alpha, m: int) -> np.ndarray:
        """Exact integer matrix ``u_alpha(m)`` as an object array."""
        r = self.root(alpha)
        m = int(m)
        out = int_identity(self.dim)
        mk = 1
        for P in r.powers:
            mk *= m
            out = out + mk * P.astype(object)
        return out

    def u_alpha_exact(self, alpha, t) -> RationalMatrix:
        """Exact rational matrix ``u_alpha(t)`` for rational ``t``."""
        r = self.root(alpha)
        t = Fraction(t)
        rows = [[Fraction(int(i == j)) for j in range(self.dim)] for i in range(self.dim)]
        tk = Fraction(1)
        for P in r.powers:
            tk *= t
            for i, j in zip(*np.nonzero(P)):
                rows[i][j] += tk * int(P[i, j])
        return RationalMatrix(rows)

    def compose(self, coords: Sequence[float]) -> np.ndarray:
        """The ordered product ``u_{a_1}(t_1) ... u_{a_r}(t_r)`` in floats."""
        if len(coords) != len(self.roots):
            raise DimensionError("one coordinate per positive root is required")
        out = np.eye(self.dim)
        for r, t in zip(self.roots, coords):
            if t:
                out = out @ self.u_alpha(r, t)
        return out

    def compose_exact(self, coords: Sequence) -> RationalMatrix:
        if len(coords) != len(self.roots):
            raise DimensionError("one coordinate per positive root is required")
        out = RationalMatrix.identity(self.dim)
        for r, t in zip(self.roots, coords):
            if t:
                out = out @ self.u_alpha_exact(r, t)
        return out

    # ------------------------------------------------------------------
    # Weyl group lifts

    def _derive_reflection(self, r: Root) -> np.ndarray:
        u1 = _exp_int(r.X)
        lower = _exp_int(-r.X.T)
        s = u1 @ lower @ u1
        s.setflags(write=False)
        return s

    def simple_reflection(self, alpha) -> np.ndarray:
        """Integer matrix ``s_alpha`` (int64, read-only) for a simple root."""
        r = self.simple_root(alpha)
        return self._reflections[r.label]

    def simple_reflection_int(self, alpha) -> np.ndarray:
        return int_matrix(self.simple_reflection(alpha).tolist())

    # ------------------------------------------------------------------
    # torus

    def check_torus(self, a, tol: float = 1e-9) -> np.ndarray:
        """Validate a torus element (positive, inside ``A`` up to ``tol``)."""
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dim,):
            raise DimensionError(f"torus element needs {self.dim} diagonal entries")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise ValueError("torus entries must be finite and positive")
        log = np.log(a)
        if np.abs(log - self._torus_projector() @ log).max() > tol * max(1.0, np.abs(log).max()):
            raise ValueError("diagonal matrix is not in the torus of this group")
        return a

    def _torus_projector(self) -> np.ndarray:
        if not hasattr(self, "_proj"):
            B = self.coroot_basis.T
            self._proj = B @ np.linalg.pinv(B)
        return self._proj

    def project_torus(self, d) -> np.ndarray:
        """Closest torus element in log coordinates (least squares)."""
        d = np.asarray(d, dtype=float)
        if np.any(d <= 0):
            raise ValueError("torus entries must be positive")
        return np.exp(self._torus_projector() @ np.log(d))

    def torus_from_log(self, lam: Sequence[float]) -> np.ndarray:
        """``prod_j alpha_j_check(exp(lam_j))`` over the simple coroots."""
        return np.exp(np.asarray(lam, dtype=float) @ self.coroot_basis)

    def torus_log(self, a) -> np.ndarray:
        """Inverse of :meth:`torus_from_log`."""
        lam, *_ = np.linalg.lstsq(self.coroot_basis.T, np.log(np.asarray(a, dtype=float)),
                                  rcond=None)
        return lam

    def char_eval(self, alpha, a) -> float:
        r = self.root(alpha)
        a = np.asarray(a, dtype=float)
        return float(a[r.marker[0]] / a[r.marker[1]])

    def coroot_apply(self, alpha, z: float) -> np.ndarray:
        r = self.simple_root(alpha)
        if not z > 0:
            raise ValueError("coroots are evaluated at positive reals")
        return np.power(float(z), r.coroot.astype(float))

    def reflect_torus(self, alpha, a) -> np.ndarray:
        """``s_alpha(a) = a / alpha_check(alpha(a))``."""
        r = self.simple_root(alpha)
        a = np.asarray(a, dtype=float)
        return a * np.power(self.char_eval(r, a), -r.coroot.astype(float))

    def sigma(self, a) -> float:
        """Product of ``beta(a)`` over all positive roots."""
        return float(np.exp(self.sigma_character @ np.log(np.asarray(a, dtype=float))))

    def log_sigma(self, a) -> float:
        return float(self.sigma_character @ np.log(np.asarray(a, dtype=float)))

    # ------------------------------------------------------------------
    # unipotent elements

    def p_alpha(self, alpha, n) -> float:
        """Coordinate of ``n`` along the simple root ``alpha``."""
        r = self.simple_root(alpha)
        return float(r.sign * np.asarray(n)[r.marker])

    def in_N(self, n, tol: float = 1e-8) -> bool:
        """Unipotent upper triangular and (classical groups) preserving ``S``."""
        n = np.asarray(n, dtype=float)
        if n.shape != (self.dim, self.dim):
            return False
        scale = max(1.0, np.abs(n).max())
        if np.abs(np.tril(n, -1)).max(initial=0.0) > tol * scale:
            return False
        if np.abs(np.diag(n) - 1).max() > tol * scale:
            return False
        if self.S is not None:
            if np.abs(n.T @ self.S @ n - self.S).max() > tol * scale * scale:
                return False
        return True

    def in_omega(self, n, omega: str = "entries") -> bool:
        """Membership of ``n`` in the fundamental set ``omega``.

        ``"entries"`` tests the matrix entries visited by the column-operation
        size reduction; ``"coordinates"`` tests the ordered root-group
        coordinates.  Both use the half-open interval ``[-1/2, 1/2)``.
        """
        return all(self.omega_report(n, omega).values())

    def omega_report(self, n, omega: str = "entries") -> dict:
        """Per-root membership booleans behind :meth:`in_omega`."""
        n = np.asarray(n, dtype=float)
        if omega == "entries":
            vals = [(r, r.sign * n[r.marker]) for r in self.red_schedule]
        elif omega == "coordinates":
            from .sizered import coordinates  # local import: sizered depends on this module
            vals = list(zip(self.roots, coordinates(self, n, check=False)))
        else:
            raise ValueError(f"omega must be one of {OMEGA_KINDS}")
        return {r.name: bool(-0.5 <= v < 0.5) for r, v in vals}

    # ------------------------------------------------------------------
    # integral group elements

    def is_integral_element(self, gamma) -> bool:
        """Exact membership test for ``G(Z)``."""
        gamma = np.asarray(gamma, dtype=object)
        if gamma.shape != (self.dim, self.dim):
            return False
        if not all(isinstance(x, (int, np.integer)) for x in gamma.flat):
            return False
        gamma = int_matrix(gamma.tolist())
        if self.kind == "g2":
            from .octonions import is_g2_element
            return is_g2_element(gamma)
        if self.S is not None:
            S = self.S.astype(object)
            if not np.array_equal(gamma.T.dot(S).dot(gamma), S):
                return False
        return RationalMatrix(gamma.tolist()).det() == 1

    # ------------------------------------------------------------------

    def _validate(self) -> None:
        dim = self.dim
        for r in self.roots:
            X = r.X
            if np.tril(X).any():
                raise ValueError(f"{r.name}: root vector is not strictly upper triangular")
            if X[r.marker] != r.sign or r.sign not in (1, -1):
                raise ValueError(f"{r.name}: marker entry mismatch")
            if self.S is not None and (X.T @ self.S + self.S @ X).any():
                raise ValueError(f"{r.name}: root vector does not preserve S")
            # every nonzero entry of X sits at a position of weight r
            chis = {tuple(np.eye(dim, dtype=np.int64)[i] - np.eye(dim, dtype=np.int64)[j])
                    for i, j in zip(*np.nonzero(X))}
            if not all(self._same_character(c, r.character) for c in chis):
                raise ValueError(f"{r.name}: root vector is not a weight vector")
        for r in self.simple:
            if int(r.character @ r.coroot) != 2:
                raise ValueError(f"{r.name}: pairing with its coroot is not 2")
            s = self._reflections[r.label]
            if not np.array_equal(s.T @ s, np.eye(dim, dtype=np.int64)):
                raise ValueError(f"{r.name}: reflection is not orthogonal")
            if self.S is not None and not np.array_equal(s.T @ self.S @ s, self.S):
                raise ValueError(f"{r.name}: reflection does not preserve S")

    def _same_character(self, chi, ref) -> bool:
        diff = np.asarray(chi, dtype=float) - ref
        return np.abs(self._torus_projector() @ diff).max() < 1e-9


# ----------------------------------------------------------------------
# constructors


def _E(dim: int, i: int, j: int) -> np.ndarray:
    M = np.zeros((dim, dim), dtype=np.int64)
    M[i, j] = 1
    return M


def _root(label, name, X, marker) -> Root:
    return Root(label=label, name=name, X=X, marker=marker, sign=int(X[marker]))


@lru_cache(maxsize=None)
def sl(g: int) -> GroupDescriptor:
    """``SL_g`` with root vectors ``E_{i,j}`` (no defining form)."""
    if g < 2:
        raise DimensionError("SL_g needs g >= 2")
    roots = []
    order = []
    for j in range(2, g + 1):
        for i in range(j - 1, 0, -1):
            roots.append(_root((i, j), f"a{i}{j}" if g < 10 else f"a{i},{j}",
                               _E(g, i - 1, j - 1), (i - 1, j - 1)))
            order.append((i, j))
    simple = [(i, i + 1) for i in range(1, g)]
    return GroupDescriptor("sl", g, g, None, roots, simple, order, order)


def _antidiag(g: int) -> np.ndarray:
    return np.fliplr(np.eye(g, dtype=np.int64))


def _classical(kind: str, g: int) -> GroupDescriptor:
    dim = 2 * g
    pos = lambda i: i + g if i < 0 else i + g - 1
    E = lambda i, j: _E(dim, pos(i), pos(j))
    psi = _antidiag(g)
    zero = np.zeros((g, g), dtype=np.int64)
    sgn = -1 if kind == "sp" else 1
    S = np.block([[zero, psi], [sgn * psi, zero]])

    roots = []
    listing = []
    for j in range(-g + 1, 0):
        for i in range(j - 1, -g - 1, -1):
            lab = ("-", i, j)
            roots.append(_root(lab, f"e[{i}]-e[{j}]", E(i, j) - E(-j, -i), (pos(i), pos(j))))
            listing.append(lab)
    for jj in range(1, g + 1):
        j = -jj
        top = j if kind == "sp" else j - 1
        for i in range(top, -g - 1, -1):
            lab = ("+", i, j)
            if i == j:
                X = E(i, -i)
                name = f"2e[{i}]"
            elif kind == "sp":
                X = E(i, -j) + E(j, -i)
                name = f"e[{i}]+e[{j}]"
            elif (i, j) == (-2, -1):
                # sign chosen so that s_alpha is the printed permutation
                X = E(-1, 2) - E(-2, 1)
                name = f"e[{i}]+e[{j}]"
            else:
                X = E(i, -j) - E(j, -i)
                name = f"e[{i}]+e[{j}]"
            roots.append(_root(lab, name, X, (pos(i), pos(-j))))
            listing.append(lab)
    simple = [("-", i, i + 1) for i in range(-g, -1)]
    simple.append(("+", -1, -1) if kind == "sp" else ("+", -2, -1))
    desc = GroupDescriptor(kind, g, dim, S, roots, simple, listing)
    # good ordering: by height, ties broken by the listing order
    height = {r.label: r.height for r in desc.roots}
    ordering = sorted(listing, key=lambda lab: height[lab])
    return GroupDescriptor(kind, g, dim, S, roots, simple, listing, ordering)


@lru_cache(maxsize=None)
def sp(g: int) -> GroupDescriptor:
    """``Sp_2g`` preserving ``S = [[0, Psi], [-Psi, 0]]``."""
    if g < 2:
        raise DimensionError("Sp_2g needs g >= 2")
    return _classical("sp", g)


@lru_cache(maxsize=None)
def so(g: int) -> GroupDescriptor:
    """Split ``SO_2g`` preserving ``S = [[0, Psi], [Psi, 0]]``."""
    if g < 3:
        raise DimensionError("SO_2g needs g >= 3")
    return _classical("so", g)


G2_ROOT_ENTRIES = {
    1: [(1, 2, 1), (3, 4, 1), (3, 5, -1), (4, 6, 1), (5, 6, -1), (7, 8, -1)],
    2: [(2, 3, 1), (6, 7, -1)],
    3: [(1, 3, 1), (2, 4, -1), (2, 5, 1), (4, 7, -1), (5, 7, 1), (6, 8, -1)],
    4: [(1, 4, 1), (1, 5, -1), (2, 6, -1), (3, 7, 1), (4, 8, 1), (5, 8, -1)],
    5: [(1, 6, 1), (3, 8, -1)],
    6: [(1, 7, 1), (2, 8, -1)],
}
G2_MARKERS = {1: (1, 2), 2: (2, 3), 3: (1, 3), 4: (1, 4), 5: (1, 6), 6: (1, 7)}


@lru_cache(maxsize=None)
def g2() -> GroupDescriptor:
    """``G_2`` as automorphisms of the split octonions, in the basis ``e_1..e_8``."""
    roots = []
    for k, entries in G2_ROOT_ENTRIES.items():
        X = np.zeros((8, 8), dtype=np.int64)
        for i, j, v in entries:
            X[i - 1, j - 1] = v
        r, c = G2_MARKERS[k]
        roots.append(_root(k, f"a{k}", X, (r - 1, c - 1)))
    S = _antidiag(8)
    order = list(range(1, 7))
    return GroupDescriptor("g2", None, 8, S, roots, [1, 2], order, order)


GROUP_KINDS = ("sl", "sp", "so", "g2")


def get_group(kind: str, g: Optional[int] = None) -> GroupDescriptor:
    """Descriptor for a CLI group kind ``"sl" | "sp" | "so" | "g2"``."""
    kind = kind.lower()
    if kind == "g2":
        return g2()
    if g is None:
        raise DimensionError(f"group {kind!r} needs a rank parameter g")
    if kind == "sl":
        return sl(int(g))
    if kind == "sp":
        return sp(int(g))
    if kind == "so":
        return so(int(g))
    raise ValueError(f"unknown group kind {kind!r}; expected one of {GROUP_KINDS}")
