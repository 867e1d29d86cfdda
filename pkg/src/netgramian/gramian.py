"""Controllability Gramians, minimum-energy inputs and the centrality energy bound.

The system is ``x(t+1) = A x(t) + B_K u(t)`` where ``B_K`` stacks the
canonical basis vectors of the control nodes ``K`` (0-based indices). The
finite-horizon Gramian ``W_K(T) = sum_{tau<T} A^tau B B^T (A^T)^tau`` gives
the minimum energy ``x_f^T W^-1 x_f`` to reach ``x_f`` from the origin.

For an irreducible, marginally stable ``A`` whose product ``A A^T`` is
pattern-primitive (or any irreducible strictly stable ``A``)::

    lambda_min(W_K(T)) <= het * sigma2**(n/m) / (sigma2**2 * (1 - sigma2))

for every ``T`` and every ``K`` with ``|K| = m``, where ``het`` is the
heterogeneity index of :class:`~netgramian.spectral.SpectralData`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, DegenerateSpectrumError, PreconditionError, UncontrollableError
from .matrix_core import as_weight_matrix, spectral_norm, stability_report
from .spectral import SpectralData, leading_eigenpair

__all__ = [
    "ControlSystem",
    "GramianResult",
    "LambdaMetric",
    "gramian",
    "gramian_direct",
    "orthonormal_complement",
    "min_energy_input",
    "simulate",
    "energy_bound",
    "log_energy_bound",
    "theorem1_bound",
    "bound_hypotheses_hold",
    "lambda_metric",
]

GAP_COLLAPSE = 1e-12


@dataclass(frozen=True, eq=False)
class ControlSystem:
    A: np.ndarray
    K: tuple

    def __post_init__(self):
        A = as_weight_matrix(self.A)
        K = tuple(int(k) for k in self.K)
        n = A.shape[0]
        if not 1 <= len(K) <= n:
            raise PreconditionError(f"need 1 <= m <= n, got m = {len(K)}, n = {n}")
        if len(set(K)) != len(K) or min(K) < 0 or max(K) >= n:
            raise PreconditionError(f"control nodes must be distinct indices in [0, {n}): {K}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "K", K)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return len(self.K)

    @property
    def B(self) -> np.ndarray:
        B = np.zeros((self.n, self.m))
        B[list(self.K), range(self.m)] = 1.0
        return B


@dataclass(frozen=True, eq=False)
class GramianResult:
    W: np.ndarray
    T: int
    lambda_min: float
    lambda_min_restricted: float
    converged: bool


def orthonormal_complement(v) -> np.ndarray:
    """Orthonormal basis (as columns) of the hyperplane ``v^perp``.

    Built from a Householder reflector mapping ``v / ||v||`` to ``e_1``; its
    last ``n - 1`` columns span the complement.
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    u = v / np.linalg.norm(v)
    e = np.zeros(n)
    e[0] = 1.0
    h = u - e if u[0] <= 0 else u + e
    h /= np.linalg.norm(h)
    H = np.eye(n) - 2.0 * np.outer(h, h)
    return H[:, 1:]


def _restricted_min(W, P):
    if P.shape[1] == 0:
        return math.inf
    return float(np.linalg.eigvalsh(P.T @ W @ P)[0])


def _min_eig(W):
    return float(np.linalg.eigvalsh(W)[0])


def _accumulate(sys, T):
    A, B = sys.A, sys.B
    BBt = B @ B.T
    W = W_prev = np.zeros_like(A)
    for _ in range(T):
        W_prev = W
        W = A @ W @ A.T + BBt
    return 0.5 * (W + W.T), W_prev


def gramian(sys: ControlSystem, T: int, v=None, tol: float = 1e-10) -> GramianResult:
    """Gramian ``W_K(T)`` via ``W(t+1) = A W(t) A^T + B B^T``.

    ``v`` is the direction excluded by ``lambda_min_restricted``; it defaults
    to the right Perron vector of ``A``. ``converged`` reports whether the
    last increment ``A^{T-1} B B^T (A^T)^{T-1}`` is below ``tol`` entrywise.
    """
    if T < 1:
        raise PreconditionError("horizon T must be >= 1")
    W, W_prev = _accumulate(sys, T)
    increment = float(np.max(np.abs(W - W_prev)))
    if v is None:
        v = leading_eigenpair(sys.A).v
    return GramianResult(
        W=W,
        T=T,
        lambda_min=_min_eig(W),
        lambda_min_restricted=_restricted_min(W, orthonormal_complement(v)),
        converged=increment < tol,
    )


def gramian_direct(sys: ControlSystem, T: int) -> np.ndarray:
    """Gramian by explicit summation of the defining series."""
    A, B = sys.A, sys.B
    W = np.zeros_like(A)
    for tau in range(T):
        At = np.linalg.matrix_power(A, tau)
        W += At @ B @ B.T @ At.T
    return W


def simulate(A, B, inputs, x0=None) -> np.ndarray:
    """Final state of ``x(t+1) = A x + B u(t)`` driven by the rows of ``inputs``."""
    A = np.asarray(A, dtype=float)
    x = np.zeros(A.shape[0]) if x0 is None else np.asarray(x0, dtype=float)
    for u in np.atleast_2d(inputs):
        x = A @ x + B @ u
    return x


def min_energy_input(sys: ControlSystem, T: int, x_f):
    """Least-norm input sequence steering ``0 -> x_f`` in ``T`` steps.

    Returns ``(inputs, energy)`` where ``inputs[tau] = B^T (A^T)^{T-1-tau} W^-1 x_f``
    and ``energy = x_f^T W^-1 x_f``.
    """
    x_f = np.asarray(x_f, dtype=float)
    if T < 1:
        raise PreconditionError("horizon T must be >= 1")
    W, _ = _accumulate(sys, T)
    lam = _min_eig(W)
    if lam <= 1e-12 * spectral_norm(W):
        raise UncontrollableError(f"Gramian singular at T = {T} (lambda_min = {lam:.3e})", lam)
    z = np.linalg.solve(W, x_f)
    B, A = sys.B, sys.A
    inputs = np.empty((T, sys.m))
    q = z
    for tau in range(T - 1, -1, -1):
        inputs[tau] = B.T @ q
        q = A.T @ q
    return inputs, float(x_f @ z)


def bound_hypotheses_hold(A) -> bool:
    """Whether ``A`` meets the hypotheses of the energy bound.

    Irreducible and either marginally stable with ``A A^T`` pattern-primitive,
    or strictly stable.
    """
    rep = stability_report(A)
    if not rep.irreducible:
        return False
    return rep.strictly_stable or (rep.marginally_stable and rep.product_pattern_primitive)


def _check_sigma2(sigma2):
    if sigma2 <= 0:
        raise DegenerateSpectrumError("sigma2 <= 0: the bound formula is undefined", sigma2)
    if sigma2 >= 1 - GAP_COLLAPSE:
        raise DegenerateSpectrumError("sigma2 >= 1: spectral gap collapsed", sigma2)


def energy_bound(heterogeneity: float, sigma2: float, n: int, m: int) -> float:
    """``heterogeneity * sigma2**(n/m) / (sigma2**2 * (1 - sigma2))``."""
    _check_sigma2(sigma2)
    return heterogeneity * sigma2 ** (n / m) / (sigma2**2 * (1.0 - sigma2))


def log_energy_bound(heterogeneity: float, sigma2: float, n: int, m: int) -> float:
    """Natural log of :func:`energy_bound`, safe against underflow."""
    _check_sigma2(sigma2)
    return math.log(heterogeneity) + (n / m - 2.0) * math.log(sigma2) - math.log1p(-sigma2)


def theorem1_bound(S: SpectralData, n: int, m: int) -> float:
    """Upper bound on ``lambda_min(W_K(T))`` for all ``T`` and all ``|K| = m``."""
    return energy_bound(S.heterogeneity, S.sigma2, n, m)


@dataclass(frozen=True)
class LambdaMetric:
    value: float
    argmax_K: tuple
    horizon: int
    converged: bool
    evaluated: int


def _limit_lambda_min(A, K, T_max, tol=1e-10, patience=5):
    sys = ControlSystem(A, K)
    BBt = sys.B @ sys.B.T
    W = np.zeros_like(sys.A)
    best = -math.inf
    calm = 0
    for T in range(1, T_max + 1):
        W = sys.A @ W @ sys.A.T + BBt
        lam = _min_eig(0.5 * (W + W.T))
        calm = calm + 1 if lam - best < tol else 0
        best = max(best, lam)
        if calm >= patience:
            return best, T, True
    return best, T_max, False


def lambda_metric(A, m: int, mode: str = "exhaustive", budget: int = 10**5, seed: int = 0,
                  T_max: int | None = None) -> LambdaMetric:
    """Lower estimate of ``max_{K, T} lambda_min(W_K(T))`` over ``|K| = m``.

    Each candidate set is run until ``lambda_min`` gains less than ``1e-10``
    for 5 consecutive horizons or ``T_max`` (default ``50 n``) is reached.
    ``mode="sampled"`` evaluates up to ``budget`` distinct sets drawn
    uniformly at random. Ties are broken by the lexicographically smallest set.
    """
    A = as_weight_matrix(A)
    n = A.shape[0]
    if not 1 <= m <= n:
        raise PreconditionError(f"need 1 <= m <= n, got m = {m}")
    T_max = 50 * n if T_max is None else T_max
    total = math.comb(n, m)
    if mode == "exhaustive":
        if total > budget:
            raise BudgetExceededError(f"C({n}, {m}) = {total} exceeds budget {budget}")
        candidates = itertools.combinations(range(n), m)
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        target = min(budget, total)
        chosen = set()
        while len(chosen) < target:
            chosen.add(tuple(sorted(int(i) for i in rng.choice(n, m, replace=False))))
        candidates = sorted(chosen)
    else:
        raise PreconditionError(f"unknown mode {mode!r}")

    best = None
    count = 0
    for K in candidates:
        lam, T, conv = _limit_lambda_min(A, K, T_max)
        count += 1
        if best is None or lam > best[0]:
            best = (lam, K, T, conv)
    return LambdaMetric(value=best[0], argmax_K=best[1], horizon=best[2], converged=best[3],
                        evaluated=count)
