"""The reduction loop: reducedness test, reflection step and drivers.

The generic driver alternates size reduction with a scan over the simple
roots; the first root whose Lovász inequality fails triggers a reflection
and the scan restarts.  The specialized drivers follow the explicit
column-operation schedules for SL, Sp, SO and G2.

Float drift is controlled by periodically recomputing ``(a, n)`` from
``F0 gamma``, where ``F0 = a0 n0`` is the starting factor (a QR
factorization, see :func:`grouplll.iwasawa.from_factor`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DriftError, IterationCapExceeded
from .groups import GroupDescriptor, Root
from .iwasawa import IwasawaPair, from_factor, iwasawa_decompose, pair_from_exact
from .matrix import RationalMatrix, int_identity, int_matrix
from .sizered import coordinates, project_unipotent, reduce_entry, size_reduce

DRIFT_TOLERANCE = 1e-6
# relative rounding allowance in the Lovász test; ties such as
# alpha(a)^2 = (delta - p^2)^-1 occur exactly for rational inputs
LOVASZ_SLACK = 1e-12
# entries of n beyond this trigger a full size reduction after a reflection;
# the specialized G2 schedule otherwise lets them grow without bound
GROWTH_LIMIT = 1e3
DEFAULT_REORTHO = 32
DRIVERS = ("generic", "specialized")


def check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.25 < delta < 1:
        raise ValueError(f"delta must lie in (1/4, 1), got {delta}")
    return delta


# ----------------------------------------------------------------------
# reducedness


def lovasz_holds(desc: GroupDescriptor, delta: float, alpha, a, n,
                 slack: float = LOVASZ_SLACK) -> bool:
    """``alpha(a)^2 <= (delta - p_alpha(n)^2)^-1`` up to a relative ``slack``.

    False when the bracket ``delta - p^2`` is not positive.
    """
    x = desc.char_eval(alpha, a)
    p = desc.p_alpha(alpha, n)
    denom = delta - p * p
    return denom > 0 and x * x * denom <= 1.0 + slack


def lovasz_report(desc: GroupDescriptor, delta: float, a, n) -> dict:
    delta = check_delta(delta)
    return {r.name: lovasz_holds(desc, delta, r, a, n) for r in desc.simple}


def is_reduced(desc: GroupDescriptor, delta: float, a, n, omega: str = "entries") -> bool:
    """``n`` in ``omega`` and the Lovász inequality for every simple root."""
    delta = check_delta(delta)
    return desc.in_omega(n, omega) and all(lovasz_report(desc, delta, a, n).values())


def sigma_eval(desc: GroupDescriptor, a) -> float:
    return desc.sigma(a)


# ----------------------------------------------------------------------
# reflection


def _clean_unipotent(n: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.abs(n).max()))
    dev = max(float(np.abs(np.tril(n, -1)).max(initial=0.0)), float(np.abs(np.diag(n) - 1).max()))
    if dev > DRIFT_TOLERANCE * scale:
        raise DriftError(f"updated matrix is {dev:.3g} away from unipotent upper triangular")
    out = np.triu(n, 1)
    out[np.diag_indices_from(out)] = 1.0
    return out


def reflection_step(desc: GroupDescriptor, alpha, a, n, verify: bool = False
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of ``K a n s_alpha``.

    With ``t = p_alpha(n)``, ``x = alpha(a)`` and ``m = u_alpha(-t) n``::

        a' = alpha_check(sqrt(1 + t^2 x^2)) s_alpha(a)
        n' = u_alpha(-t x^2 / (1 + t^2 x^2)) s_alpha^-1 m s_alpha

    ``verify`` additionally checks ``(a'n')^T (a'n') = s^T (an)^T (an) s``.
    """
    r = desc.simple_root(alpha)
    a = np.asarray(a, dtype=float)
    n = np.asarray(n, dtype=float)
    t = desc.p_alpha(r, n)
    x = desc.char_eval(r, a)
    m = desc.u_alpha(r, -t) @ n
    y2 = 1.0 + t * t * x * x
    h = r.coroot.astype(float)
    a_new = a * np.power(math.sqrt(y2), h) * np.power(x, -h)
    s = desc.simple_reflection(r).astype(float)
    n_new = desc.u_alpha(r, -t * x * x / y2) @ (s.T @ m @ s)
    n_new = _clean_unipotent(n_new)
    if verify:
        F = a[:, None] * n @ s
        G = a_new[:, None] * n_new
        lhs, rhs = G.T @ G, F.T @ F
        if np.abs(lhs - rhs).max() > 1e-8 * max(1.0, np.abs(rhs).max()):
            raise DriftError("coset identity failed after the reflection step")
    return a_new, n_new


# ----------------------------------------------------------------------
# state and results


@dataclass(frozen=True)
class TraceStep:
    kind: str  # "RED" or "REFL"
    root: str
    value: float
    sigma: float


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)

    def add(self, kind: str, root: Root, value, sigma: float) -> None:
        self.steps.append(TraceStep(kind, root.name, value, sigma))

    def reflection_sigmas(self) -> list[float]:
        return [s.sigma for s in self.steps if s.kind == "REFL"]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass
class ReductionState:
    """Mutable loop state: ``K a0 n0 gamma = K a n``."""

    desc: GroupDescriptor
    delta: float
    gamma: np.ndarray
    a: np.ndarray
    n: np.ndarray
    start_factor: np.ndarray
    reflections: int = 0
    refreshes: int = 0
    fresh: bool = True
    cap: int = 0
    reortho_every: int = DEFAULT_REORTHO
    trace: Optional[ReductionTrace] = None
    exact_gram: Optional[RationalMatrix] = None

    def sigma(self) -> float:
        return self.desc.sigma(self.a)

    # elementary moves -------------------------------------------------

    def red(self, root: Root) -> None:
        m, self.n = reduce_entry(self.desc, root, self.n)
        if m:
            self.gamma = self.gamma.dot(self.desc.u_alpha_int(root, m))
            if self.trace is not None:
                self.trace.add("RED", root, m, self.sigma())

    def size_reduce(self, omega: str) -> None:
        if omega == "entries":
            for r in self.desc.red_schedule:
                self.red(r)
            return
        g, self.n = size_reduce(self.desc, self.n)
        self.gamma = self.gamma.dot(g)
        if self.trace is not None:
            ms = coordinates(self.desc, g.astype(float), check=False)
            for r, m in zip(self.desc.roots, ms):
                if m:
                    self.trace.add("RED", r, int(round(m)), self.sigma())

    def fails(self, root: Root) -> bool:
        return not lovasz_holds(self.desc, self.delta, root, self.a, self.n)

    def refl(self, root: Root) -> None:
        t = self.desc.p_alpha(root, self.n)
        before = self.sigma()
        self.a, self.n = reflection_step(self.desc, root, self.a, self.n)
        self.gamma = self.gamma.dot(self.desc.simple_reflection_int(root))
        self.reflections += 1
        self.fresh = False
        if self.trace is not None:
            self.trace.add("REFL", root, t, self.sigma())
        if np.abs(self.n).max() > GROWTH_LIMIT:
            for r in self.desc.red_schedule:
                self.red(r)
        if self.reflections > self.cap:
            raise IterationCapExceeded(
                f"more than {self.cap} reflections (sigma {before:.6g} -> {self.sigma():.6g})")
        if self.reortho_every and self.reflections % self.reortho_every == 0:
            self.refresh()

    def refresh(self) -> None:
        if self.exact_gram is not None:
            g = RationalMatrix(self.gamma.tolist())
            pair = pair_from_exact(g.T @ self.exact_gram @ g)
            a, n = self.desc.project_torus(pair.a), project_unipotent(self.desc, pair.n)
        else:
            pair = from_factor(self.desc, self.start_factor @ self.gamma.astype(float))
            a, n = pair.a, pair.n
        self.a, self.n = a, n
        self.refreshes += 1
        self.fresh = True


@dataclass
class ReductionResult:
    gamma: np.ndarray
    a: np.ndarray
    n: np.ndarray
    reflections: int
    trace: ReductionTrace
    sigma_initial: float
    sigma_final: float
    delta: float
    driver: str
    omega: str
    refreshes: int = 0

    @property
    def pair(self) -> IwasawaPair:
        return IwasawaPair(self.a, self.n)

    def reduced_gram(self) -> np.ndarray:
        return self.pair.gram()


# ----------------------------------------------------------------------
# drivers


def default_cap(sigma_initial: float, delta: float) -> int:
    """``10 (1 + ceil(log(sigma) / log(1/delta)))`` reflections, at least 10."""
    steps = max(0.0, math.log(sigma_initial)) / math.log(1.0 / delta)
    return 10 * (1 + math.ceil(steps))


def _generic(st: ReductionState, omega: str) -> None:
    desc = st.desc
    while True:
        st.size_reduce(omega)
        for r in desc.simple:
            if st.fails(r):
                st.refl(r)
                break
        else:
            if not st.fresh:
                st.refresh()
                continue
            return


def _root_at(desc: GroupDescriptor, i: int, j: int) -> Root:
    key = (desc.position(i), desc.position(j))
    for r in desc.roots:
        if r.marker == key:
            return r
    raise KeyError(f"no root with marker entry ({i}, {j})")


def _simple_at(desc: GroupDescriptor, i: int) -> Root:
    """The simple root indexed like the reflections ``s_i``."""
    if desc.kind in ("sp", "so"):
        return desc.simple[i + desc.g]
    return desc.simple[i - 1]


def _linear_phase(st: ReductionState, k: int, last: int) -> int:
    """LLL-style sweep over the type-A chain of simple roots ``k .. last-1``."""
    desc, first = st.desc, k
    red = lambda i, j: st.red(_root_at(desc, i, j))
    while k < last:
        red(k, k + 1)
        if st.fails(_simple_at(desc, k)):
            st.refl(_simple_at(desc, k))
            if k > first:
                k -= 1
        else:
            for i in range(k - 1, first - 1, -1):
                red(i, k + 1)
            k += 1
    return k


def _sl_driver(st: ReductionState) -> None:
    _linear_phase(st, 1, st.desc.g)


def _classical_driver(st: ReductionState) -> None:
    desc = st.desc
    g, is_sp = desc.g, desc.kind == "sp"
    red = lambda i, j: st.red(_root_at(desc, i, j))
    k = -g
    while True:
        # step 2: the loop over the type-A part of the diagram
        while k < -1:
            red(k, k + 1)
            if st.fails(_simple_at(desc, k)):
                st.refl(_simple_at(desc, k))
                if k > -g:
                    k -= 1
            else:
                for i in range(k - 1, -g - 1, -1):
                    red(i, k + 1)
                k += 1
        red(-1, 1) if is_sp else red(-2, 1)
        last = _simple_at(desc, -1)
        if st.fails(last):
            st.refl(last)
            k -= 1 if is_sp else 2
            continue
        for i in range(-2 if is_sp else -3, -g - 1, -1):
            red(i, 1)
        for j in range(2, g + 1):
            for i in range(-j if is_sp else -j - 1, -g - 1, -1):
                red(i, j)
        return


def _g2_driver(st: ReductionState) -> None:
    desc = st.desc
    a1, a2 = desc.simple
    while True:
        st.red(a1)
        if st.fails(a1):
            st.refl(a1)
            continue
        st.red(a2)
        if st.fails(a2):
            st.refl(a2)
            continue
        for r in desc.roots[2:]:
            st.red(r)
        return


def _specialized(st: ReductionState) -> None:
    driver = {"sl": _sl_driver, "sp": _classical_driver, "so": _classical_driver,
              "g2": _g2_driver}[st.desc.kind]
    while True:
        driver(st)
        if st.fresh:
            return
        st.refresh()


def reduce(desc: GroupDescriptor, delta: float, H=None, *, pair: Optional[IwasawaPair] = None,
           driver: str = "generic", omega: str = "entries", max_iter: Optional[int] = None,
           reortho_every: int = DEFAULT_REORTHO, tol: float = 1e-8,
           trace: bool = True) -> ReductionResult:
    """Find ``gamma`` in ``G(Z)`` such that ``K a n gamma`` is reduced.

    Give either a compatible Gram matrix ``H`` (decomposed by Gram–Schmidt)
    or Iwasawa coordinates ``pair``.  When ``H`` is a :class:`RationalMatrix`
    the periodic refreshes recompute ``(a, n)`` exactly from
    ``gamma^T H gamma``, so the result stays accurate however badly
    conditioned ``H`` is.  The specialized drivers always use the
    matrix-entry fundamental set.
    """
    delta = check_delta(delta)
    if driver not in DRIVERS:
        raise ValueError(f"driver must be one of {DRIVERS}")
    if driver == "specialized" and omega != "entries":
        raise ValueError("the specialized drivers normalize matrix entries (omega='entries')")
    if (H is None) == (pair is None):
        raise ValueError("pass exactly one of H and pair")
    if pair is None:
        pair = iwasawa_decompose(desc, H, tol=tol)
    a0 = desc.project_torus(pair.a)
    n0 = desc.compose(coordinates(desc, pair.n, check=False))
    sigma0 = desc.sigma(a0)
    cap = int(max_iter) if max_iter is not None else default_cap(sigma0, delta)
    st = ReductionState(desc, delta, int_identity(desc.dim), a0, n0, a0[:, None] * n0,
                        cap=cap, reortho_every=int(reortho_every),
                        trace=ReductionTrace() if trace else None,
                        exact_gram=H if isinstance(H, RationalMatrix) else None)
    if driver == "generic":
        _generic(st, omega)
    else:
        _specialized(st)
    return ReductionResult(st.gamma, st.a, st.n, st.reflections, st.trace or ReductionTrace(),
                           sigma0, st.sigma(), delta, driver, omega, st.refreshes)


# ----------------------------------------------------------------------
# classic LLL reference


def _gram_schmidt_any(H):
    """Gram–Schmidt ``(B, mu)`` as Python lists, exact for Fraction input."""
    n = len(H)
    B = [None] * n
    mu = [[0] * n for _ in range(n)]
    for i in range(n):
        mu[i][i] = 1
        for j in range(i, n):
            v = H[i][j] - sum(mu[k][i] * mu[k][j] * B[k] for k in range(i))
            if j == i:
                B[i] = v
                if not B[i] > 0:
                    raise ValueError("Gram matrix is not positive definite")
            else:
                mu[i][j] = v / B[i]
    return B, mu


def _as_rows(H):
    if isinstance(H, RationalMatrix):
        return H.tolist()
    arr = np.asarray(H)
    if arr.dtype == object:
        return [[Fraction(x) for x in r] for r in arr.tolist()]
    return [[float(x) for x in r] for r in arr.tolist()]


def satisfies_lll_definition(H, delta) -> bool:
    """The classical LLL conditions on a Gram matrix (exact for rational input)."""
    rows = _as_rows(H)
    exact = isinstance(rows[0][0], Fraction)
    d = Fraction(delta) if exact and not isinstance(delta, float) else delta
    if exact and isinstance(delta, float):
        d = Fraction(delta)
    B, mu = _gram_schmidt_any(rows)
    n = len(rows)
    half = Fraction(1, 2) if exact else 0.5
    for i in range(n):
        for j in range(i + 1, n):
            if abs(mu[i][j]) > half:
                return False
    for i in range(n - 1):
        bracket = d - mu[i][i + 1] ** 2
        if bracket <= 0 or B[i] / B[i + 1] > 1 / bracket:
            return False
    return True


def classic_lll_reference(H, delta: float) -> np.ndarray:
    """Textbook LLL on a Gram matrix; returns the integer basis transform.

    Works on exact rationals when ``H`` is a :class:`RationalMatrix` (or an
    object array of rationals) and in floats otherwise.
    """
    rows = _as_rows(H)
    exact = isinstance(rows[0][0], Fraction)
    d = Fraction(delta) if exact else float(delta)
    n = len(rows)
    G = [list(r) for r in rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_sub(k, j, q):
        # b_k <- b_k - q b_j
        for r in range(n):
            U[r][k] -= q * U[r][j]
        for r in range(n):
            G[r][k] -= q * G[r][j]
        for c in range(n):
            G[k][c] -= q * G[j][c]

    def swap(i, j):
        for r in range(n):
            U[r][i], U[r][j] = U[r][j], U[r][i]
        G[i], G[j] = G[j], G[i]
        for r in range(n):
            G[r][i], G[r][j] = G[r][j], G[r][i]

    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            _, mu = _gram_schmidt_any(G)
            q = math.floor(mu[j][k] + Fraction(1, 2) if exact else mu[j][k] + 0.5)
            if q:
                col_sub(k, j, q)
        B, mu = _gram_schmidt_any(G)
        if B[k] < (d - mu[k - 1][k] ** 2) * B[k - 1]:
            swap(k - 1, k)
            k = max(k - 1, 1)
        else:
            k += 1
    return int_matrix(U)
