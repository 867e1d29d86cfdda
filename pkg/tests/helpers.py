"""Random test-matrix generators shared by the test modules."""
import numpy as np

from netgramian.graph_models import assign_weights, to_column_stochastic


def random_irreducible(rng, n, density=0.3, symmetric=False, positive_diagonal=False):
    """Nonnegative irreducible matrix: a random Hamiltonian cycle plus extra edges."""
    perm = rng.permutation(n)
    pattern = np.zeros((n, n), dtype=bool)
    pattern[perm, np.roll(perm, 1)] = True
    pattern |= rng.random((n, n)) < density
    if symmetric:
        pattern |= pattern.T
    np.fill_diagonal(pattern, positive_diagonal)
    A = np.where(pattern, rng.uniform(0.1, 1.0, (n, n)), 0.0)
    if symmetric:
        A = np.triu(A) + np.triu(A, 1).T
    return A


def normalize_radius(A, radius=1.0):
    return A * (radius / np.max(np.abs(np.linalg.eigvals(A))))


def random_connected_adjacency(rng, n, density=0.3):
    A = random_irreducible(rng, n, density, symmetric=True)
    return (A > 0).astype(float)


def random_symmetric_pipeline(rng, n, a=0.5, b=2.0, density=0.3):
    adj = random_connected_adjacency(rng, n, density)
    C = assign_weights(adj, a, b, "symmetric", rng)
    return adj, C, to_column_stochastic(C)


def lazy_directed_ring(n=3):
    P = np.roll(np.eye(n), 1, axis=0)
    return 0.5 * np.eye(n) + 0.5 * P
