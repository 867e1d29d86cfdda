"""Dense nonnegative weight matrices and their structural predicates.

A weight matrix ``A`` encodes a weighted digraph with an edge ``j -> i``
whenever ``A[i, j] > 0``. Entries count as edges only when strictly
positive; no near-zero threshold is applied.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ConvergenceError, PreconditionError

__all__ = [
    "StructuralReport",
    "as_weight_matrix",
    "is_irreducible",
    "is_pattern_primitive",
    "period",
    "stability_report",
    "spectral_norm",
    "read_matrix",
    "write_matrix",
]


def as_weight_matrix(a) -> np.ndarray:
    """Validate ``a`` as a square nonnegative real matrix and return a float copy."""
    arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise PreconditionError(f"weight matrix must be square with n >= 1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("weight matrix has non-finite entries")
    if np.any(arr < 0):
        raise PreconditionError("weight matrix has negative entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StructuralReport:
    irreducible: bool
    marginally_stable: bool
    strictly_stable: bool
    spectral_radius: float
    product_pattern_primitive: bool
    positive_diagonal: bool
    # True when some eigenvalue sits within tolerance of the unit circle,
    # i.e. the marginal-stability verdict rests on the numeric rank test.
    near_unit_circle: bool = False


def is_irreducible(A) -> bool:
    """True iff the nonzero pattern of ``A`` is strongly connected."""
    A = np.asarray(A)
    if A.shape[0] == 1:
        return True
    ncomp, _ = connected_components(A > 0, directed=True, connection="strong")
    return ncomp == 1


def period(A) -> int:
    """Period (gcd of cycle lengths) of an irreducible pattern.

    Uses BFS levels from node 0: the period is the gcd of
    ``level[u] + 1 - level[v]`` over all edges ``u -> v``.
    """
    P = np.asarray(A) > 0
    n = P.shape[0]
    level = np.full(n, -1, dtype=np.int64)
    level[0] = 0
    queue = deque([0])
    succ = [np.flatnonzero(P[:, j]) for j in range(n)]  # edges j -> i
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    if np.any(level < 0):
        raise PreconditionError("period is only defined for irreducible patterns")
    g = 0
    for u in range(n):
        for v in succ[u]:
            g = math.gcd(g, int(abs(level[u] + 1 - level[v])))
    return g


def is_pattern_primitive(M) -> bool:
    """True iff the nonzero pattern of ``M`` is irreducible and aperiodic."""
    M = np.asarray(M)
    if not is_irreducible(M):
        return False
    if M.shape[0] == 1:
        return bool(M[0, 0] > 0)
    return period(M) == 1


def spectral_norm(A) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(A, dtype=float), 2))


def _eigenvalue_clusters(eigs, tol):
    clusters = []
    for lam in eigs:
        for c in clusters:
            if abs(c[0] - lam) <= tol:
                c.append(lam)
                break
        else:
            clusters.append([lam])
    return clusters


def stability_report(A, tol: float = 1e-9) -> StructuralReport:
    """Spectral radius and stability flags of ``A``.

    Marginal stability needs ``rho <= 1 + tol`` and every eigenvalue with
    ``|lambda| >= 1 - tol`` semisimple. Semisimplicity is checked by comparing
    the algebraic multiplicity of each eigenvalue cluster against
    ``n - rank(A - lambda I)`` at rank tolerance ``1e-8 * ||A||_2``.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    A = as_weight_matrix(A)
    n = A.shape[0]
    try:
        eigs = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue solver failed: {exc}", iterations=None) from exc
    rho = float(np.max(np.abs(eigs)))
    norm2 = spectral_norm(A)
    strictly = rho < 1 - tol
    marginal = rho <= 1 + tol
    outer = eigs[np.abs(eigs) >= 1 - tol]
    near = bool(np.any(np.abs(np.abs(eigs) - 1) <= tol))
    if marginal and outer.size:
        # defective eigenvalues split by ~sqrt(eps); cluster generously
        for cluster in _eigenvalue_clusters(outer, 1e-6):
            lam = complex(np.mean(cluster))
            alg = int(np.sum(np.abs(eigs - lam) <= 1e-6))
            rank = np.linalg.matrix_rank(A - lam * np.eye(n), tol=1e-8 * max(norm2, 1.0))
            if n - rank != alg:
                marginal = False
                break
    positive_diag = bool(np.all(np.diag(A) > 0))
    return StructuralReport(
        irreducible=is_irreducible(A),
        marginally_stable=bool(marginal),
        strictly_stable=bool(strictly),
        spectral_radius=rho,
        product_pattern_primitive=is_pattern_primitive(A @ A.T),
        positive_diagonal=positive_diag,
        near_unit_circle=near,
    )


def write_matrix(path, A) -> None:
    """Write ``A`` as a header line ``n`` followed by ``n`` rows of 17-digit reals."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    lines = [str(n)]
    lines += [" ".join(f"{x:.17g}" for x in row) for row in A]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    """Read a matrix written by :func:`write_matrix`."""
    tokens = Path(path).read_text().split()
    if not tokens:
        raise PreconditionError(f"{path}: empty matrix file")
    n = int(tokens[0])
    values = tokens[1:]
    if len(values) != n * n:
        raise PreconditionError(f"{path}: expected {n * n} entries, found {len(values)}")
    return as_weight_matrix(np.array(values, dtype=float).reshape(n, n))
