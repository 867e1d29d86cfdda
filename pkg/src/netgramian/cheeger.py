"""Bottleneck ratio (Cheeger constant) and spectral-gap bounds.

For a column-stochastic ``A`` with stationary vector ``v``::

    h = min_{S : v(S) <= 1/2} Q(S, S^c) / v(S),   Q(S, S^c) = sum_{i in S, j notin S} A[j, i] v[i]

and for reversible ``A`` the second eigenvalue obeys ``lambda_2 <= 1 - h**2 / 2``.
Exact ``h`` needs all ``2**n`` cuts, so brute force stops at ``n = 22``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, SizeError
from .spectral import SpectralData, reversible_eigenvalues

__all__ = [
    "CutReport",
    "ArrayGapBound",
    "MAX_BRUTE_FORCE_N",
    "bottleneck_ratio",
    "cheeger_gap_check",
    "weighted_cut_bounds",
    "isoperimetric_number",
    "sampled_isoperimetric_upper",
    "array_gap_bound",
    "asymptotic_log_bound",
]

MAX_BRUTE_FORCE_N = 22
_CHUNK = 1 << 15
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class CutReport:
    h: float
    argmin_S: tuple
    lambda2_bound: float
    method: str = "brute_force"


def _check_size(n):
    if n > MAX_BRUTE_FORCE_N:
        raise SizeError(
            f"n = {n} exceeds brute-force limit {MAX_BRUTE_FORCE_N}; use array_gap_bound "
            "or weighted_cut_bounds on a smaller graph"
        )


def _subset_chunks(n):
    """Indicator matrices of all nonempty proper subsets, in mask order."""
    bits = 1 << np.arange(n, dtype=np.int64)
    total = (1 << n) - 1
    for start in range(1, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        yield masks, ((masks[:, None] & bits[None, :]) > 0).astype(float)


def _subset_key(mask, n):
    members = tuple(i for i in range(n) if mask >> i & 1)
    return len(members), members


def _argmin_cut(n, ratio_fn, feasible_fn):
    """Minimum of ``ratio_fn`` over feasible subsets with size-then-lex tie-break."""
    best_val = math.inf
    best = []
    for masks, X in _subset_chunks(n):
        ok = feasible_fn(X)
        if not np.any(ok):
            continue
        masks, X = masks[ok], X[ok]
        r = ratio_fn(X)
        lo = float(r.min())
        if lo < best_val * (1 - _TIE_RTOL):
            best_val = lo
            best = []
        if lo <= best_val * (1 + _TIE_RTOL) + 1e-300:
            tie = masks[r <= best_val * (1 + _TIE_RTOL) + 1e-300]
            best.extend(int(m) for m in tie)
    if not best:
        raise PreconditionError("no feasible cut")
    # the running minimum may have decreased after some ties were recorded
    return best_val, min((_subset_key(m, n) for m in best))[1]


def bottleneck_ratio(A, S: SpectralData | np.ndarray) -> CutReport:
    """Exact bottleneck ratio of a column-stochastic ``A`` by enumeration.

    ``S`` is the :class:`SpectralData` of ``A`` or directly its stationary
    vector ``v`` (summing to 1). Cuts with ``v(S) = 1/2`` exactly are feasible.
    """
    A = np.asarray(A, dtype=float)
    v = np.asarray(S.v if isinstance(S, SpectralData) else S, dtype=float)
    n = A.shape[0]
    _check_size(n)
    if np.max(np.abs(A.sum(axis=0) - 1.0)) > 1e-10:
        raise PreconditionError("bottleneck_ratio expects a column-stochastic matrix")
    flow = A * v[None, :]  # flow[j, i] = A[j, i] v[i], mass moving i -> j

    def ratio(X):
        Q = np.sum(X * ((1.0 - X) @ flow), axis=1)
        return Q / (X @ v)

    h, members = _argmin_cut(n, ratio, lambda X: X @ v <= 0.5 + 1e-15)
    # recompute the winner exactly to drop chunk-level rounding
    x = np.zeros(n)
    x[list(members)] = 1.0
    h = float(ratio(x[None, :])[0])
    return CutReport(h=h, argmin_S=members, lambda2_bound=1.0 - h * h / 2.0)


def cheeger_gap_check(A, S: SpectralData, tol: float = 1e-9):
    """``(lambda2, 1 - h**2/2, satisfied)`` for a reversible ``A``."""
    lam = reversible_eigenvalues(A, S)
    lambda2 = float(lam[1]) if lam.size > 1 else -math.inf
    bound = bottleneck_ratio(A, S).lambda2_bound
    return lambda2, bound, bool(lambda2 <= bound + tol)


def weighted_cut_bounds(C, adj, a: float, b: float) -> float:
    """Lower bound ``(a/b) min e(S, S^c) / vol(S)`` on the bottleneck ratio.

    The minimum runs over the same feasible family as :func:`bottleneck_ratio`
    (``v(S) <= 1/2`` with ``v`` the column sums of ``C`` over their total);
    ``e`` and ``vol`` are counted on the unweighted ``adj``.
    """
    C = np.asarray(C, dtype=float)
    adj = (np.asarray(adj) > 0).astype(float)
    n = adj.shape[0]
    _check_size(n)
    colsum = C.sum(axis=0)
    v = colsum / colsum.sum()
    deg = adj.sum(axis=0)

    def ratio(X):
        e = np.sum(X * ((1.0 - X) @ adj), axis=1)
        return e / (X @ deg)

    best, _ = _argmin_cut(n, ratio, lambda X: X @ v <= 0.5 + 1e-15)
    return (a / b) * best


def isoperimetric_number(adj) -> tuple:
    """Exact ``min e(S, S^c) / |S|`` over ``|S| <= n/2`` and a minimizing set."""
    adj = (np.asarray(adj) > 0).astype(float)
    n = adj.shape[0]
    _check_size(n)

    def ratio(X):
        return np.sum(X * ((1.0 - X) @ adj), axis=1) / X.sum(axis=1)

    return _argmin_cut(n, ratio, lambda X: X.sum(axis=1) <= n / 2)


def sampled_isoperimetric_upper(adj, samples: int, rng: np.random.Generator) -> float:
    """Smallest ``e(S, S^c)/|S|`` over random sets with ``|S| <= n/2``.

    Every sampled value is an upper bound on the isoperimetric number, so the
    result can refute but never certify a claimed lower bound.
    """
    adj = (np.asarray(adj) > 0).astype(float)
    n = adj.shape[0]
    best = math.inf
    for _ in range(samples):
        size = int(rng.integers(1, n // 2 + 1))
        x = np.zeros(n)
        x[rng.choice(n, size, replace=False)] = 1.0
        best = min(best, float(x @ ((1.0 - x) @ adj)) / size)
    return best


@dataclass(frozen=True)
class ArrayGapBound:
    n: int
    dim: int
    h_lower: float | None
    lambda2_upper: float | None
    K: float | None
    # control-node threshold exponent: m = o(n**exponent / log n)
    exponent: float


def array_gap_bound(k: int, dim: int, a: float, b: float) -> ArrayGapBound:
    """Analytic bottleneck and gap bounds for a weighted ``k``-ary array.

    For ``dim == 3``: ``h >= (a / (3 b)) n**(-1/3)`` (isoperimetric number at
    least ``2 n**(-1/3)``, degree at most 6) and ``lambda_2 <= 1 - K n**(-2/3)``
    with ``K = a**2 / (18 b**2)``. Other dimensions only get the exponent.
    """
    if k < 2 or dim < 1:
        raise PreconditionError("need k >= 2 and dim >= 1")
    if not 0 < a <= b:
        raise PreconditionError("need 0 < a <= b")
    n = k**dim
    exponent = 1.0 - 2.0 / dim
    if dim != 3:
        return ArrayGapBound(n=n, dim=dim, h_lower=None, lambda2_upper=None, K=None, exponent=exponent)
    K = a * a / (18.0 * b * b)
    return ArrayGapBound(
        n=n,
        dim=dim,
        h_lower=(a / (3.0 * b)) * n ** (-1.0 / 3.0),
        lambda2_upper=1.0 - K * n ** (-2.0 / 3.0),
        K=K,
        exponent=exponent,
    )


def asymptotic_log_bound(n: int, m: int, a: float, b: float, alpha: float) -> float:
    """Log of the explicit energy bound for the lazy weighted 3-D array.

    Uses heterogeneity ``<= 2b/a`` and ``sigma2 <= ((1-alpha) B(n) + alpha)**2``
    with ``B(n) = 1 - K n**(-2/3)``, valid once that branch dominates
    ``(2 alpha - 1)**2``.
    """
    if not 0 < alpha < 1:
        raise PreconditionError("alpha must lie in (0, 1)")
    if not 1 <= m <= n:
        raise PreconditionError("need 1 <= m <= n")
    K = a * a / (18.0 * b * b)
    B = 1.0 - K * n ** (-2.0 / 3.0)
    gap_branch = ((1.0 - alpha) * B + alpha) ** 2
    flip_branch = (2.0 * alpha - 1.0) ** 2
    if gap_branch < flip_branch:
        raise PreconditionError(
            f"n = {n} too small: the (2 alpha - 1)^2 = {flip_branch:.6g} branch dominates "
            f"((1 - alpha) B + alpha)^2 = {gap_branch:.6g}"
        )
    s = gap_branch
    return math.log(2.0 * b / a) + (n / m - 2.0) * math.log(s) - math.log1p(-s)
