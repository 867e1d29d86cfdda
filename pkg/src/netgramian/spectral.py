"""Perron eigenpair machinery.

For an irreducible nonnegative ``A`` with Perron root ``lambda1`` and
positive right/left eigenvectors ``v``/``w``, the weight vector
``pi = w / v`` (normalized to sum 1) defines

* the reversal ``A^R = Pi^-1 A^T Pi``,
* the symmetrized product ``A^S = Pi^1/2 A A^R Pi^-1/2``, a PSD matrix whose
  eigenvalues ``sigma_1 >= sigma_2 >= ... >= 0`` drive the energy bounds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, PreconditionError, StructuralError
from .matrix_core import as_weight_matrix, is_irreducible, spectral_norm

__all__ = [
    "SpectralData",
    "leading_eigenpair",
    "perron_vector",
    "reversal",
    "symmetrized_product",
    "is_reversible",
    "symmetrize",
    "reversible_eigenvalues",
    "project_out",
    "check_contraction",
    "check_reversal_contraction",
    "check_transpose_contraction",
    "kernel_condition",
]

PSD_CLAMP = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralData:
    lambda1: float
    v: np.ndarray
    w: np.ndarray
    pi: np.ndarray
    sigma: np.ndarray
    heterogeneity: float
    iterations: int = 0

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def sigma2(self) -> float:
        return float(self.sigma[1]) if self.sigma.shape[0] > 1 else 0.0

    @property
    def spectral_gap(self) -> float:
        return 1.0 - self.sigma2


def perron_vector(M, tol: float = 1e-12, max_iter: int = 10**6):
    """Positive eigenvector of irreducible ``M`` by power iteration on ``I + M``.

    ``I + M`` is primitive whenever ``M`` is irreducible, so the iteration
    converges to the Perron vector even for periodic ``M``. Stops when
    ``||M x - lambda x|| <= tol * ||M||_2 * ||x||`` with the Rayleigh quotient
    ``lambda``. Returns ``(x, lambda, iterations)`` with ``sum(x) == 1``.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    scale = max(spectral_norm(M), np.finfo(float).tiny)
    x = np.full(n, 1.0 / n)
    for it in range(1, max_iter + 1):
        Mx = M @ x
        lam = float(x @ Mx) / float(x @ x)
        resid = np.linalg.norm(Mx - lam * x)
        if resid <= tol * scale * np.linalg.norm(x):
            return x, lam, it
        x = x + Mx
        x /= x.sum()
    raise ConvergenceError(
        f"power iteration did not reach residual {tol:g} in {max_iter} iterations",
        iterations=max_iter,
    )


def _sigma_from(A, pi):
    root = np.sqrt(pi)
    M = root[:, None] * A / root[None, :]
    AS = M @ M.T
    AS = 0.5 * (AS + AS.T)
    sigma = np.linalg.eigvalsh(AS)[::-1]
    if sigma[-1] < -PSD_CLAMP * max(1.0, sigma[0]):
        raise ConvergenceError(f"symmetrized product not PSD: sigma_n = {sigma[-1]:.3e}")
    return AS, np.clip(sigma, 0.0, None)


def leading_eigenpair(A, tol: float = 1e-12, max_iter: int = 10**6) -> SpectralData:
    """Perron data of an irreducible nonnegative matrix.

    ``v`` is scaled so that it sums to 1; ``w`` is then scaled so that
    ``pi = w / v`` sums to 1.
    """
    A = as_weight_matrix(A)
    if not is_irreducible(A):
        raise StructuralError("leading_eigenpair requires an irreducible matrix")
    v, lam, it_v = perron_vector(A, tol, max_iter)
    w, _, it_w = perron_vector(A.T, tol, max_iter)
    if np.any(v <= 0) or np.any(w <= 0):
        raise ConvergenceError("Perron vectors are not strictly positive", iterations=it_v + it_w)
    w = w / np.sum(w / v)
    pi = w / v
    _, sigma = _sigma_from(A, pi)
    for arr in (v, w, pi, sigma):
        arr.setflags(write=False)
    return SpectralData(
        lambda1=lam,
        v=v,
        w=w,
        pi=pi,
        sigma=sigma,
        heterogeneity=float(pi.max() / pi.min()),
        iterations=it_v + it_w,
    )


def reversal(A, S: SpectralData) -> np.ndarray:
    """Time reversal ``Pi^-1 A^T Pi``."""
    A = np.asarray(A, dtype=float)
    return A.T * S.pi[None, :] / S.pi[:, None]


def symmetrized_product(A, S: SpectralData):
    """``A^S`` and its eigenvalues sorted nonincreasing (negatives clamped to 0)."""
    return _sigma_from(np.asarray(A, dtype=float), S.pi)


def _require_stochastic(A, tol):
    sums = A.sum(axis=0)
    if np.max(np.abs(sums - 1.0)) > max(tol, 1e-12):
        raise PreconditionError("reversibility is defined for column-stochastic matrices")


def is_reversible(A, S: SpectralData, tol: float = 1e-10) -> bool:
    """True iff ``max |A - A^R| <= tol`` for a column-stochastic ``A``."""
    A = np.asarray(A, dtype=float)
    _require_stochastic(A, tol)
    return bool(np.max(np.abs(A - reversal(A, S))) <= tol)


def symmetrize(A, S: SpectralData, tol: float = 1e-10) -> np.ndarray:
    """``Pi^1/2 A Pi^-1/2`` for reversible ``A``; symmetric, same spectrum as ``A``."""
    A = np.asarray(A, dtype=float)
    if not is_reversible(A, S, tol):
        raise PreconditionError("symmetrize requires a reversible matrix")
    root = np.sqrt(S.pi)
    Sym = root[:, None] * A / root[None, :]
    return 0.5 * (Sym + Sym.T)


def reversible_eigenvalues(A, S: SpectralData, tol: float = 1e-10) -> np.ndarray:
    """Real eigenvalues of a reversible ``A``, sorted nonincreasing."""
    return np.linalg.eigvalsh(symmetrize(A, S, tol))[::-1]


def project_out(y, v, w=None) -> np.ndarray:
    """Remove from ``y`` its component violating ``y . v = 0``.

    With ``w`` given the projection is oblique along ``w`` (the direction in
    which ``(A^T)^t`` amplifies rounding error); otherwise orthogonal.
    """
    y = np.asarray(y, dtype=float)
    d = v if w is None else w
    return y - (y @ v) / (d @ v) * d


def _pinv_norm2(y, pi):
    return float(np.sum(y * y / pi))


def check_contraction(A, S: SpectralData, y, t: int, tol: float = 1e-9):
    """Both sides of ``||(A^T)^t y||^2_{Pi^-1} <= sigma2^t ||y||^2_{Pi^-1}``.

    ``y`` must satisfy ``y . v = 0`` up to ``tol * ||y|| * ||v||``. The
    iterates are re-projected along ``w`` after every step, which is exact
    in exact arithmetic since ``(A^T)^t y`` stays orthogonal to ``v``.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    if abs(y @ S.v) > tol * np.linalg.norm(y) * np.linalg.norm(S.v):
        raise PreconditionError("y is not orthogonal to the right Perron vector")
    z = project_out(y, S.v, S.w)
    for _ in range(t):
        z = project_out(A.T @ z, S.v, S.w)
    lhs = _pinv_norm2(z, S.pi)
    rhs = S.sigma2**t * _pinv_norm2(y, S.pi)
    return lhs, rhs


def check_reversal_contraction(A, S: SpectralData, x, tol: float = 1e-9):
    """Both sides of ``||A^R x||^2_Pi <= sigma2 ||x||^2_Pi`` for ``x . w = 0``."""
    x = np.asarray(x, dtype=float)
    if abs(x @ S.w) > tol * np.linalg.norm(x) * np.linalg.norm(S.w):
        raise PreconditionError("x is not orthogonal to the left Perron vector")
    z = reversal(A, S) @ x
    return float(np.sum(S.pi * z * z)), S.sigma2 * float(np.sum(S.pi * x * x))


def check_transpose_contraction(A, S: SpectralData, y, tol: float = 1e-9):
    """One-step case: ``||A^T y||^2_{Pi^-1} <= sigma2 ||y||^2_{Pi^-1}``."""
    return check_contraction(A, S, y, 1, tol)


def kernel_condition(A, S: SpectralData, tol: float = 1e-9) -> bool:
    """True iff ``(A - A^T) v`` vanishes relative to ``||A||_2 ||v||``."""
    A = np.asarray(A, dtype=float)
    r = np.linalg.norm((A - A.T) @ S.v)
    return bool(r <= tol * spectral_norm(A) * np.linalg.norm(S.v))
