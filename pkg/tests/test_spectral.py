import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import lazy_directed_ring, normalize_radius, random_irreducible, random_symmetric_pipeline
from netgramian.errors import PreconditionError, StructuralError
from netgramian.graph_models import to_column_stochastic
from netgramian.spectral import (
    check_contraction,
    check_reversal_contraction,
    check_transpose_contraction,
    is_reversible,
    kernel_condition,
    leading_eigenpair,
    project_out,
    reversal,
    reversible_eigenvalues,
    symmetrize,
    symmetrized_product,
)

C3 = np.array([[0.0, 1, 0], [1, 0, 2], [0, 2, 0]])


def perron_by_eig(A):
    vals, vecs = np.linalg.eig(A)
    i = np.argmax(vals.real)
    v = np.abs(vecs[:, i].real)
    return vals[i].real, v / v.sum()


def test_two_cycle():
    S = leading_eigenpair(np.array([[0.0, 1], [1, 0]]))
    assert S.lambda1 == pytest.approx(1.0)
    np.testing.assert_allclose(S.v, [0.5, 0.5])
    np.testing.assert_allclose(S.pi, [0.5, 0.5])
    assert S.heterogeneity == pytest.approx(1.0)


def test_stochasticized_path():
    A = to_column_stochastic(C3)
    S = leading_eigenpair(A)
    np.testing.assert_allclose(S.v, [1 / 6, 1 / 2, 1 / 3], atol=1e-12)
    col = C3.sum(axis=0)
    np.testing.assert_allclose(S.v, col / C3.sum(), atol=1e-12)
    assert S.heterogeneity == pytest.approx(3.0, rel=1e-10)


def test_reducible_input_rejected():
    with pytest.raises(StructuralError):
        leading_eigenpair(np.array([[1.0, 1], [0, 1]]))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 20), st.booleans(), st.integers(0, 2**32 - 1))
def test_spectral_invariants(n, symmetric, seed):
    rng = np.random.default_rng(seed)
    A = normalize_radius(random_irreducible(rng, n, 0.3, symmetric=symmetric))
    S = leading_eigenpair(A)
    norm = np.linalg.norm(A, 2)
    assert np.all(S.v > 0) and np.all(S.w > 0)
    assert S.v.sum() == pytest.approx(1.0)
    assert S.pi.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(S.pi, S.w / S.v)
    assert np.linalg.norm(A @ S.v - S.lambda1 * S.v) <= 1e-10 * norm * np.linalg.norm(S.v)
    assert np.linalg.norm(A.T @ S.w - S.lambda1 * S.w) <= 1e-10 * norm * np.linalg.norm(S.w)
    lam, v = perron_by_eig(A)
    assert S.lambda1 == pytest.approx(lam, rel=1e-10)
    np.testing.assert_allclose(S.v, v, atol=1e-9)
    assert abs(S.sigma[0] - S.lambda1**2) <= 1e-9 * max(1.0, S.lambda1**2)
    assert np.all(np.diff(S.sigma) <= 1e-15)
    assert np.all(S.sigma >= 0)
    assert S.heterogeneity >= 1.0
    # reversal is an involution and keeps the Perron vectors
    AR = reversal(A, S)
    from netgramian.spectral import SpectralData
    np.testing.assert_allclose(reversal(AR, SpectralData(S.lambda1, S.v, S.w, S.pi, S.sigma, 1.0)), A,
                               atol=1e-12)
    np.testing.assert_allclose(AR @ S.v, S.lambda1 * S.v, atol=1e-10)
    np.testing.assert_allclose(AR.T @ S.w, S.lambda1 * S.w, atol=1e-10)
    # r = Pi^1/2 v is the top eigenvector of A^S
    AS, _ = symmetrized_product(A, S)
    r = np.sqrt(S.pi) * S.v
    np.testing.assert_allclose(AS @ r, S.lambda1**2 * r, atol=1e-10 * np.linalg.norm(r))


def test_deterministic():
    rng = np.random.default_rng(4)
    A = normalize_radius(random_irreducible(rng, 15, 0.2))
    S1, S2 = leading_eigenpair(A), leading_eigenpair(A)
    np.testing.assert_array_equal(S1.v, S2.v)
    np.testing.assert_array_equal(S1.sigma, S2.sigma)


def test_doubly_stochastic_heterogeneity_one():
    A = lazy_directed_ring(5)
    S = leading_eigenpair(A)
    assert S.heterogeneity == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(reversal(A, S), A.T, atol=1e-12)


def test_lazy_ring_sigma_and_reversal():
    A = lazy_directed_ring(3)
    S = leading_eigenpair(A)
    _, sigma = symmetrized_product(A, S)
    np.testing.assert_allclose(sigma, [1.0, 0.25, 0.25], atol=1e-12)
    P = np.roll(np.eye(3), 1, axis=0)
    np.testing.assert_allclose(reversal(A, S), 0.5 * np.eye(3) + 0.5 * P.T, atol=1e-12)
    assert not is_reversible(A, S)


def test_rank_one_sigma():
    A = np.full((2, 2), 0.5)
    S = leading_eigenpair(A)
    np.testing.assert_allclose(S.sigma, [1.0, 0.0], atol=1e-12)


def test_symmetric_c_gives_reversible():
    rng = np.random.default_rng(5)
    for _ in range(20):
        _, C, A = random_symmetric_pipeline(rng, int(rng.integers(3, 15)))
        S = leading_eigenpair(A)
        assert is_reversible(A, S)
        np.testing.assert_allclose(reversal(A, S), A, atol=1e-12)
        Sym = symmetrize(A, S)
        np.testing.assert_allclose(Sym, Sym.T, atol=1e-12)
        lam = reversible_eigenvalues(A, S)
        np.testing.assert_allclose(np.sort(lam), np.sort(np.linalg.eigvals(A).real), atol=1e-9)
        assert lam[0] == pytest.approx(1.0)
        assert lam[-1] >= -1 - 1e-12
        assert S.sigma2 == pytest.approx(max(lam[1] ** 2, lam[-1] ** 2), abs=1e-9)


def test_symmetrize_symmetric_stochastic_is_identity_map():
    A = np.array([[0.2, 0.5, 0.3], [0.5, 0.1, 0.4], [0.3, 0.4, 0.3]])
    S = leading_eigenpair(A)
    np.testing.assert_allclose(symmetrize(A, S), A, atol=1e-12)


def test_symmetrize_path_matrix():
    A = to_column_stochastic(C3)
    S = leading_eigenpair(A)
    Sym = symmetrize(A, S)
    assert np.max(np.abs(Sym - Sym.T)) <= 1e-12
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(Sym)), np.sort(np.linalg.eigvals(A).real), atol=1e-9)


def test_symmetrize_rejects_nonreversible():
    A = lazy_directed_ring(3)
    with pytest.raises(PreconditionError):
        symmetrize(A, leading_eigenpair(A))


def test_is_reversible_rejects_non_stochastic():
    A = np.array([[0.0, 2.0], [1.0, 0.0]])
    with pytest.raises(PreconditionError):
        is_reversible(A, leading_eigenpair(A))


def test_two_state_chains_always_reversible():
    rng = np.random.default_rng(6)
    for _ in range(200):
        p, q = rng.uniform(0.01, 1.0, 2)
        A = np.array([[1 - p, q], [p, 1 - q]])
        assert is_reversible(A, leading_eigenpair(A))


def test_contraction_t0_equal():
    A = lazy_directed_ring(3)
    S = leading_eigenpair(A)
    lhs, rhs = check_contraction(A, S, np.array([1.0, -1.0, 0.0]), 0)
    assert lhs == pytest.approx(rhs)


def test_contraction_lazy_ring():
    A = lazy_directed_ring(3)
    S = leading_eigenpair(A)
    y = np.array([1.0, -1.0, 0.0])
    lhs, rhs = check_contraction(A, S, y, 5)
    lhs0, _ = check_contraction(A, S, y, 0)
    assert rhs == pytest.approx(0.25**5 * lhs0)
    assert lhs <= rhs * (1 + 1e-9)


def test_contraction_requires_orthogonality():
    A = lazy_directed_ring(3)
    with pytest.raises(PreconditionError):
        check_contraction(A, leading_eigenpair(A), np.array([1.0, 0.0, 0.0]), 2)


def test_one_step_contractions():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(2, 12))
        A = normalize_radius(random_irreducible(rng, n, 0.3))
        S = leading_eigenpair(A)
        x = rng.normal(size=n)
        x -= (x @ S.w) / (S.w @ S.w) * S.w
        lhs, rhs = check_reversal_contraction(A, S, x)
        assert lhs <= rhs * (1 + 1e-9) + 1e-15
        y = project_out(rng.normal(size=n), S.v)
        lhs, rhs = check_transpose_contraction(A, S, y)
        assert lhs <= rhs * (1 + 1e-9) + 1e-15


def test_kernel_condition_examples():
    A = lazy_directed_ring(4)
    S = leading_eigenpair(A)
    assert kernel_condition(A, S) and S.heterogeneity == pytest.approx(1.0)
    A = to_column_stochastic(C3)
    S = leading_eigenpair(A)
    assert not kernel_condition(A, S)
    assert S.heterogeneity == pytest.approx(3.0)
    rng = np.random.default_rng(8)
    A = normalize_radius(random_irreducible(rng, 7, 0.4, symmetric=True))
    assert kernel_condition(A, leading_eigenpair(A))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 12), st.sampled_from(["sym", "asym", "doubly"]), st.integers(0, 2**32 - 1))
def test_kernel_condition_equivalence(n, kind, seed):
    rng = np.random.default_rng(seed)
    if kind == "doubly":
        perms = [np.eye(n)[rng.permutation(n)] for _ in range(3)]
        weights = rng.dirichlet(np.ones(3))
        A = sum(w * P for w, P in zip(weights, perms))
        if not np.all(np.linalg.matrix_power(np.eye(n) + A, n) > 0):
            A = 0.5 * A + 0.5 * lazy_directed_ring(n)
    else:
        A = normalize_radius(random_irreducible(rng, n, 0.3, symmetric=kind == "sym"))
    S = leading_eigenpair(A)
    assert kernel_condition(A, S) == (abs(S.heterogeneity - 1.0) <= 1e-8)
