"""Random and structured graph generators and the random-walk pipeline.

Pipeline: topology (0/1 symmetric adjacency) -> edge weights ``C`` ->
column-stochastic ``A = C diag(1^T C)^-1`` -> lazy ``A_alpha = (1-alpha) A + alpha I``.

Randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence``, both of which are specified and produce identical streams
on every platform. :func:`make_rng` derives independent substreams from a
master seed plus any number of integer keys.

Barabasi-Albert variant used here: start from a clique on ``d + 1`` nodes;
each new node picks ``d`` distinct existing targets, each drawn with
probability proportional to current degree (a duplicate draw is discarded
and redrawn). No self-loops, no multi-edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import NetGramianError, PreconditionError
from .spectral import SpectralData

__all__ = [
    "GraphModelConfig",
    "Pipeline",
    "Centralities",
    "make_rng",
    "barabasi_albert",
    "erdos_renyi",
    "kary_array",
    "generate_topology",
    "assign_weights",
    "to_column_stochastic",
    "lazy",
    "centralities",
    "build_pipeline",
    "edge_weight_range",
]

ER_MAX_ATTEMPTS = 1000


class RejectionCapError(NetGramianError):
    """Connected Erdos-Renyi sampling exhausted its attempts."""


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """PCG64 generator for the stream identified by ``(seed, *keys)``."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in keys)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class GraphModelConfig:
    model: str  # "BA", "ER" or "KARY"
    n: int = 0
    d: int = 2
    c: float = 4.0
    k: int = 2
    dim: int = 3
    weight_range: tuple = (0.5, 4.0)
    weight_mode: str = "symmetric"
    alpha: float = 0.5
    seed: int = 0

    def __post_init__(self):
        model = self.model.upper()
        object.__setattr__(self, "model", model)
        if model == "BA":
            if self.d < 2:
                raise PreconditionError("BA requires d >= 2")
            if self.n < self.d + 1:
                raise PreconditionError("BA requires n >= d + 1")
        elif model == "ER":
            if self.c <= 1:
                raise PreconditionError("ER requires c > 1")
            if self.n < 2:
                raise PreconditionError("ER requires n >= 2")
        elif model == "KARY":
            if self.k < 2 or self.dim < 1:
                raise PreconditionError("KARY requires k >= 2 and dim >= 1")
        else:
            raise PreconditionError(f"unknown model {self.model!r}")
        a, b = self.weight_range
        if not 0 < a < b:
            raise PreconditionError("weight range needs 0 < a < b")
        if self.weight_mode not in ("symmetric", "asymmetric"):
            raise PreconditionError(f"unknown weight mode {self.weight_mode!r}")
        if not 0 < self.alpha < 1:
            raise PreconditionError("alpha must lie in (0, 1)")

    @property
    def size(self) -> int:
        return self.k**self.dim if self.model == "KARY" else self.n


def barabasi_albert(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    adj = np.zeros((n, n))
    adj[: d + 1, : d + 1] = 1.0
    np.fill_diagonal(adj, 0.0)
    # each node appears once per incident edge: uniform picks are degree-biased
    ends = [i for i in range(d + 1) for _ in range(d)]
    for new in range(d + 1, n):
        targets = []
        while len(targets) < d:
            t = ends[int(rng.integers(len(ends)))]
            if t not in targets:
                targets.append(t)
        for t in targets:
            adj[new, t] = adj[t, new] = 1.0
            ends.append(t)
        ends.extend([new] * d)
    return adj


def _is_connected(adj) -> bool:
    ncomp, _ = connected_components(adj > 0, directed=False)
    return ncomp == 1


def erdos_renyi(n: int, c: float, rng: np.random.Generator,
                max_attempts: int = ER_MAX_ATTEMPTS) -> np.ndarray:
    """ER(n, c log n / n) conditioned on connectivity by whole-graph rejection."""
    p = min(1.0, c * math.log(n) / n)
    iu = np.triu_indices(n, 1)
    for _ in range(max_attempts):
        adj = np.zeros((n, n))
        adj[iu] = rng.random(iu[0].size) < p
        adj = adj + adj.T
        if _is_connected(adj):
            return adj
    raise RejectionCapError(f"no connected ER({n}, {p:.4g}) sample in {max_attempts} attempts")


def kary_array(k: int, dim: int) -> np.ndarray:
    """Cartesian product of ``dim`` paths on ``k`` nodes (``n = k**dim``)."""
    path = np.eye(k, k=1) + np.eye(k, k=-1)
    eye = np.eye(k)
    adj = np.zeros((k**dim, k**dim))
    for axis in range(dim):
        term = np.ones((1, 1))
        for j in range(dim):
            term = np.kron(term, path if j == axis else eye)
        adj += term
    return adj


def generate_topology(cfg: GraphModelConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """0/1 symmetric adjacency of a connected graph drawn from ``cfg``."""
    rng = make_rng(cfg.seed) if rng is None else rng
    if cfg.model == "BA":
        return barabasi_albert(cfg.n, cfg.d, rng)
    if cfg.model == "ER":
        return erdos_renyi(cfg.n, cfg.c, rng)
    return kary_array(cfg.k, cfg.dim)


def assign_weights(adj, a: float, b: float, mode: str, rng: np.random.Generator) -> np.ndarray:
    """Edge weights uniform on ``[a, b]``, drawn in sorted ``(i, j), i < j`` order.

    ``symmetric`` draws one weight per undirected edge; ``asymmetric`` draws
    ``C[i, j]`` then ``C[j, i]`` independently for each edge.
    """
    if not 0 < a < b:
        raise PreconditionError("weight range needs 0 < a < b")
    adj = np.asarray(adj)
    n = adj.shape[0]
    i, j = np.nonzero(np.triu(adj, 1))
    C = np.zeros((n, n))
    if mode == "symmetric":
        w = rng.uniform(a, b, size=i.size)
        C[i, j] = w
        C[j, i] = w
    elif mode == "asymmetric":
        w = rng.uniform(a, b, size=(i.size, 2))
        C[i, j] = w[:, 0]
        C[j, i] = w[:, 1]
    else:
        raise PreconditionError(f"unknown weight mode {mode!r}")
    return C


def to_column_stochastic(C) -> np.ndarray:
    """``C diag(1^T C)^-1``."""
    C = np.asarray(C, dtype=float)
    sums = C.sum(axis=0)
    if np.any(sums <= 0):
        raise PreconditionError(f"zero column(s) {np.flatnonzero(sums <= 0).tolist()}")
    return C / sums[None, :]


def lazy(A, alpha: float) -> np.ndarray:
    """``(1 - alpha) A + alpha I``."""
    if not 0 < alpha < 1:
        raise PreconditionError("alpha must lie in (0, 1)")
    A = np.asarray(A, dtype=float)
    return (1.0 - alpha) * A + alpha * np.eye(A.shape[0])


def edge_weight_range(C):
    """Smallest and largest nonzero entries of ``C``."""
    nz = np.asarray(C)[np.asarray(C) > 0]
    return float(nz.min()), float(nz.max())


@dataclass(frozen=True)
class Centralities:
    degree: np.ndarray
    eigen: np.ndarray
    pagerank_order: tuple

    @property
    def heterogeneity(self) -> float:
        return float(self.eigen.max() / self.eigen.min())


def centralities(C, A, S: SpectralData) -> Centralities:
    """Weighted degree (column sums of ``C``), eigenvector centrality ``v`` and
    the node order by decreasing ``v`` (undamped PageRank; ties by index)."""
    degree = np.asarray(C, dtype=float).sum(axis=0)
    order = tuple(int(i) for i in sorted(range(S.n), key=lambda i: (-S.v[i], i)))
    return Centralities(degree=degree, eigen=S.v, pagerank_order=order)


@dataclass(frozen=True, eq=False)
class Pipeline:
    adj: np.ndarray
    C: np.ndarray
    A: np.ndarray
    A_alpha: np.ndarray


def build_pipeline(cfg: GraphModelConfig, rng: np.random.Generator | None = None) -> Pipeline:
    """Topology, weights, stochastic and lazy matrices for one realization."""
    rng = make_rng(cfg.seed) if rng is None else rng
    adj = generate_topology(cfg, rng)
    a, b = cfg.weight_range
    C = assign_weights(adj, a, b, cfg.weight_mode, rng)
    A = to_column_stochastic(C)
    return Pipeline(adj=adj, C=C, A=A, A_alpha=lazy(A, cfg.alpha))
