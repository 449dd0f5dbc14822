"""Iwasawa coordinates ``H = (an)^T (an)`` of a compatible Gram matrix.

The exact route is classical Gram–Schmidt on the standard basis.  Gram
matrices that are only known to a printed number of digits need not be
exactly compatible (or even positive definite); for those,
:func:`fit_iwasawa` finds the group point ``(a, n)`` closest to the data in
the metric given by the per-entry uncertainty.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from .errors import DimensionError, IncompatibleFormError, NotPositiveDefiniteError
from .groups import GroupDescriptor
from .matrix import RationalMatrix, as_float_matrix
from .sizered import coordinates

PD_EPSILON = 1e-12
COMPAT_TOLERANCE = 1e-8
SYMMETRY_TOLERANCE = 1e-12
FIT_ACCEPT = 2.0


@dataclass(frozen=True)
class IwasawaPair:
    """Torus diagonal ``a`` and unipotent ``n`` with ``x = K a n``."""

    a: np.ndarray
    n: np.ndarray

    def factor(self) -> np.ndarray:
        return self.a[:, None] * self.n

    def gram(self) -> np.ndarray:
        F = self.factor()
        return F.T @ F


def check_symmetric(H) -> np.ndarray:
    H = as_float_matrix(H, square=True)
    scale = max(np.abs(H).max(), 1e-300)
    if np.abs(H - H.T).max() > SYMMETRY_TOLERANCE * scale:
        raise ValueError("Gram matrix is not symmetric")
    return H


def gram_schmidt(H) -> tuple[np.ndarray, np.ndarray]:
    """Classical Gram–Schmidt in Gram form.

    Returns ``(B, mu)`` with ``B[i] = (e_i*, e_i*)_H`` and ``mu`` unit upper
    triangular, ``mu[i, j] = (e_j, e_i*)_H / B[i]``.
    """
    H = as_float_matrix(H, square=True)
    dim = H.shape[0]
    B = np.zeros(dim)
    mu = np.eye(dim)
    for i in range(dim):
        # (e_j, e_i*) = H[i, j] - sum_{k<i} mu[k, i] mu[k, j] B[k]
        row = H[i, i:] - (mu[:i, i] * B[:i]) @ mu[:i, i:]
        B[i] = row[0]
        if not B[i] > PD_EPSILON * abs(H[i, i]) or not B[i] > 0:
            raise NotPositiveDefiniteError(
                f"Gram–Schmidt norm {B[i]:.3g} at index {i} is not positive")
        mu[i, i + 1:] = row[1:] / B[i]
    return B, mu


def gram_schmidt_exact(H: RationalMatrix) -> tuple[list, list]:
    """Gram–Schmidt ``(B, mu)`` in exact rational arithmetic (lists of Fractions)."""
    rows = H.tolist()
    dim = len(rows)
    B = []
    mu = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    for i in range(dim):
        for j in range(i, dim):
            v = rows[i][j] - sum(mu[k][i] * mu[k][j] * B[k] for k in range(i))
            if j == i:
                if v <= 0:
                    raise NotPositiveDefiniteError(
                        f"Gram–Schmidt norm {float(v):.3g} at index {i} is not positive")
                B.append(v)
            else:
                mu[i][j] = v / B[i]
    return B, mu


def pair_from_exact(H: RationalMatrix) -> IwasawaPair:
    """Float Iwasawa coordinates from exact Gram–Schmidt (accurate to rounding)."""
    B, mu = gram_schmidt_exact(H)
    return IwasawaPair(np.sqrt(np.array([float(b) for b in B])),
                       np.array([[float(x) for x in r] for r in mu]))


def compatibility_residual(desc: GroupDescriptor, H) -> float:
    """``||H S^-1 H - S^T||_F / ||H||_F^2`` (zero for SL)."""
    H = as_float_matrix(H, square=True)
    if H.shape[0] != desc.dim:
        raise DimensionError(f"expected a {desc.dim}x{desc.dim} Gram matrix")
    if desc.S is None:
        return 0.0
    S = desc.S.astype(float)
    lhs = H @ np.linalg.inv(S) @ H
    return float(np.linalg.norm(lhs - S.T) / np.linalg.norm(H) ** 2)


def check_compatible(desc: GroupDescriptor, H, tol: float = COMPAT_TOLERANCE) -> bool:
    """Whether ``H^-1 S^T = S^-1 H^T`` holds to relative tolerance ``tol``."""
    return compatibility_residual(desc, H) <= tol


def iwasawa_decompose(desc: GroupDescriptor, H, tol: float = COMPAT_TOLERANCE,
                      check: bool = True) -> IwasawaPair:
    """Gram–Schmidt coordinates ``a = diag(||e_i*||)``, ``n = (mu_ij)``.

    A :class:`RationalMatrix` is orthogonalized exactly.
    """
    exact = H if isinstance(H, RationalMatrix) else None
    if exact is not None and exact != exact.T:
        raise ValueError("Gram matrix is not symmetric")
    H = check_symmetric(exact.to_float() if exact is not None else H)
    if H.shape[0] != desc.dim:
        raise DimensionError(f"expected a {desc.dim}x{desc.dim} Gram matrix")
    if check:
        res = compatibility_residual(desc, H)
        if res > tol:
            raise IncompatibleFormError(
                f"Gram matrix is not compatible with the group (residual {res:.3g})")
    if exact is not None:
        return pair_from_exact(exact)
    B, mu = gram_schmidt(H)
    return IwasawaPair(np.sqrt(B), mu)


def from_factor(desc: GroupDescriptor, M, project: bool = True) -> IwasawaPair:
    """Iwasawa coordinates of ``K M`` via a QR factorization of ``M``.

    Better conditioned than decomposing ``M^T M``.  With ``project`` the
    result is pushed back onto the group's torus and unipotent subgroup.
    """
    M = as_float_matrix(M, square=True)
    R = np.linalg.qr(M, mode="r")
    d = np.diag(R)
    if np.any(d == 0):
        raise NotPositiveDefiniteError("factor matrix is singular")
    R = R * np.sign(d)[:, None]
    a = np.abs(d)
    n = R / a[:, None]
    if project:
        a = desc.project_torus(a)
        n = desc.compose(coordinates(desc, n, check=False))
    return IwasawaPair(a, n)


def transport(desc: GroupDescriptor, pair: IwasawaPair, gamma) -> IwasawaPair:
    """Coordinates of ``K a n gamma``."""
    g = np.asarray(gamma, dtype=float)
    return from_factor(desc, pair.factor() @ g)


# ----------------------------------------------------------------------
# fitting noisy data


@dataclass(frozen=True)
class FitResult:
    pair: IwasawaPair
    max_weighted_residual: float
    rms_weighted_residual: float
    max_abs_residual: float
    nfev: int


def _structured_start(desc: GroupDescriptor, H: np.ndarray) -> IwasawaPair:
    """Starting point from the first half of the Gram–Schmidt process.

    Only rows ``-g..-1`` are computed from ``H``; the rest of ``(a, n)`` is
    completed from the group structure, then projected onto the group.
    """
    try:
        B, mu = gram_schmidt(H)
        a, n = np.sqrt(B), mu
    except NotPositiveDefiniteError:
        if desc.kind == "sl":
            raise
        half = desc.dim // 2
        B = np.zeros(half)
        mu = np.eye(desc.dim)
        for i in range(half):
            row = H[i, i:] - (mu[:i, i] * B[:i]) @ mu[:i, i:]
            if not row[0] > 0:
                raise
            B[i] = row[0]
            mu[i, i + 1:] = row[1:] / B[i]
        top = np.sqrt(B)
        a = np.concatenate([top, 1.0 / top[::-1]])
        A = mu[:half, :half]
        psi = np.fliplr(np.eye(half))
        n = mu.copy()
        n[half:, half:] = psi @ np.linalg.inv(A).T @ psi
        n[half:, :half] = 0.0
    return IwasawaPair(desc.project_torus(a),
                       desc.compose(coordinates(desc, n, check=False)))


def fit_iwasawa(desc: GroupDescriptor, H, sigma, start: Optional[IwasawaPair] = None) -> FitResult:
    """Weighted least-squares fit of ``(a, n)`` in ``A x N`` to ``H``.

    ``sigma`` holds the uncertainty of every entry (for printed data, half a
    unit in the last printed digit).  The torus is parametrized by
    logarithms along the simple coroots and ``N`` by ordered root
    coordinates, so every iterate is exactly a group point.
    """
    H = check_symmetric(H)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), H.shape)
    if np.any(sigma <= 0):
        raise ValueError("entry uncertainties must be positive")
    iu = np.triu_indices(desc.dim)
    w = 1.0 / sigma[iu]
    target = H[iu]
    rank = desc.rank

    def model(x):
        a = desc.torus_from_log(x[:rank])
        F = a[:, None] * desc.compose(x[rank:])
        return F.T @ F

    def resid(x):
        return (model(x)[iu] - target) * w

    if start is None:
        start = _structured_start(desc, H)
    x0 = np.concatenate([desc.torus_log(start.a), coordinates(desc, start.n, check=False)])
    sol = least_squares(resid, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=20000)
    x = sol.x
    pair = IwasawaPair(desc.torus_from_log(x[:rank]), desc.compose(x[rank:]))
    r = resid(x)
    return FitResult(pair, float(np.abs(r).max()), float(np.sqrt(np.mean(r * r))),
                     float(np.abs(model(x)[iu] - target).max()), int(sol.nfev))


@dataclass(frozen=True)
class Decomposition:
    pair: IwasawaPair
    method: str
    compatibility_residual: float
    fit: Optional[FitResult] = None


def decompose(desc: GroupDescriptor, H, sigma=None, tol: float = COMPAT_TOLERANCE) -> Decomposition:
    """Gram–Schmidt when ``H`` is compatible, else a fit when uncertainties are known.

    Raises :class:`IncompatibleFormError` or :class:`NotPositiveDefiniteError`
    when neither route applies.
    """
    H = check_symmetric(H)
    res = compatibility_residual(desc, H)
    first_error = None
    if res <= tol:
        try:
            return Decomposition(iwasawa_decompose(desc, H, check=False), "gram-schmidt", res)
        except NotPositiveDefiniteError as exc:
            first_error = exc
    if sigma is None or not np.any(np.asarray(sigma) > 0):
        if first_error is not None:
            raise first_error
        raise IncompatibleFormError(
            f"Gram matrix is not compatible with the group (residual {res:.3g})")
    sigma = np.asarray(sigma, dtype=float)
    # exact entries still get a tiny weight floor so the fit is well posed
    floor = np.finfo(float).eps * max(np.abs(H).max(), 1.0)
    sigma = np.where(sigma > 0, sigma, floor)
    fit = fit_iwasawa(desc, H, sigma)
    if fit.max_weighted_residual > FIT_ACCEPT:
        raise IncompatibleFormError(
            "no compatible Gram matrix within the stated precision "
            f"(worst entry off by {fit.max_weighted_residual:.3g} uncertainties)")
    return Decomposition(fit.pair, "fit", res, fit)


# ----------------------------------------------------------------------
# symplectic realizations


def sp_H_to_J(desc: GroupDescriptor, H, tol: float = COMPAT_TOLERANCE) -> np.ndarray:
    """Complex structure ``J = -S^-1 H`` of a compatible symplectic Gram matrix."""
    if desc.kind != "sp":
        raise ValueError("the J realization is specific to Sp_2g")
    H = check_symmetric(H)
    if not check_compatible(desc, H, tol):
        raise IncompatibleFormError("Gram matrix is not compatible with the symplectic form")
    S = desc.S.astype(float)
    return -np.linalg.solve(S, H)


def sp_J_to_H(desc: GroupDescriptor, J) -> np.ndarray:
    """Inverse map ``H = -S J``."""
    if desc.kind != "sp":
        raise ValueError("the J realization is specific to Sp_2g")
    J = as_float_matrix(J, square=True)
    return -desc.S.astype(float) @ J
