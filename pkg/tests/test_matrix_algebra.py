import numpy as np
import pytest

from matprox import (
    DiagonalEmbedding,
    FiniteMetricSpace,
    identity,
    is_self_adjoint,
    jordan_product,
    lie_product,
    matrix_from_pairs,
    matrix_to_pairs,
    operator_norm,
    operator_norms,
    pinch,
    random_hermitian,
    trace_state,
)
from matprox.errors import InputShapeError, NotInSubalgebraError
from matprox.oracles import power_iteration_norm

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def euclidean_space(n: int, seed: int = 0) -> FiniteMetricSpace:
    rng = np.random.default_rng(seed)
    return FiniteMetricSpace.from_points(rng.normal(size=(n, 3)))


# ---------------------------------------------------------------------------
# Operator norm.
# ---------------------------------------------------------------------------


def test_norm_of_identity():
    for n in (1, 2, 7):
        assert operator_norm(identity(n)) == 1.0


def test_norm_of_diagonal_matrix():
    f = np.array([0.5, -3.0, 2.0])
    assert operator_norm(np.diag(f).astype(complex)) == 3.0


def test_norm_matches_power_iteration_oracle():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert operator_norm(a) == pytest.approx(power_iteration_norm(a), abs=1e-9)


def test_norm_submultiplicative_and_cstar_identity():
    rng = np.random.default_rng(6)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) + 1e-9
        assert operator_norm(a.conj().T @ a) == pytest.approx(
            operator_norm(a) ** 2, rel=1e-9
        )


def test_operator_norms_batches_match_single_calls():
    rng = np.random.default_rng(7)
    stack = rng.normal(size=(10, 4, 4)) + 1j * rng.normal(size=(10, 4, 4))
    batched = operator_norms(stack)
    singles = [operator_norm(m) for m in stack]
    assert np.allclose(batched, singles, atol=1e-12)


# ---------------------------------------------------------------------------
# Jordan and Lie products.
# ---------------------------------------------------------------------------


def test_jordan_with_identity_is_identity_map():
    rng = np.random.default_rng(8)
    a = random_hermitian(rng, 4)
    assert np.allclose(jordan_product(identity(4), a), a, atol=1e-14)


def test_lie_of_commuting_diagonals_vanishes():
    a = np.diag(np.array([1.0, 2.0, 3.0])).astype(complex)
    b = np.diag(np.array([-1.0, 0.5, 4.0])).astype(complex)
    assert np.max(np.abs(lie_product(a, b))) == 0.0


def test_pauli_products():
    assert np.max(np.abs(jordan_product(PAULI_X, PAULI_Y))) == 0.0
    assert np.allclose(lie_product(PAULI_X, PAULI_Y), PAULI_Z, atol=1e-15)


def test_products_preserve_self_adjointness():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        a = random_hermitian(rng, n)
        b = random_hermitian(rng, n)
        assert is_self_adjoint(jordan_product(a, b), tol=1e-12)
        assert is_self_adjoint(lie_product(a, b), tol=1e-12)


def test_product_dimension_mismatch():
    with pytest.raises(InputShapeError):
        jordan_product(identity(2), identity(3))
    with pytest.raises(InputShapeError):
        lie_product(identity(2), identity(3))


# ---------------------------------------------------------------------------
# Trace state.
# ---------------------------------------------------------------------------


def test_trace_state_normalization_and_diagonal():
    assert trace_state(identity(5)) == 1.0
    f = np.array([1.0, 2.0, 6.0])
    assert trace_state(np.diag(f).astype(complex)) == pytest.approx(3.0)


def test_trace_state_is_tracial_and_positive():
    rng = np.random.default_rng(10)
    for _ in range(100):
        n = int(rng.integers(2, 8))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert abs(trace_state(a @ b) - trace_state(b @ a)) <= 1e-12
        assert trace_state(a.conj().T @ a).real >= 0.0


# ---------------------------------------------------------------------------
# Diagonal embedding.
# ---------------------------------------------------------------------------


def test_embed_constant_one_is_identity():
    rho = DiagonalEmbedding(euclidean_space(4))
    assert np.array_equal(rho.embed(np.ones(4)), identity(4))


def test_embed_extract_round_trip_exact():
    rho = DiagonalEmbedding(euclidean_space(5))
    rng = np.random.default_rng(11)
    for _ in range(20):
        f = rng.uniform(-2, 2, size=5)
        assert np.array_equal(rho.extract(rho.embed(f)).real, f)


def test_embedding_is_multiplicative_unital_adjoint_preserving():
    rho = DiagonalEmbedding(euclidean_space(6))
    rng = np.random.default_rng(12)
    for _ in range(20):
        f = rng.uniform(-1, 1, size=6) + 1j * rng.uniform(-1, 1, size=6)
        g = rng.uniform(-1, 1, size=6) + 1j * rng.uniform(-1, 1, size=6)
        assert np.max(np.abs(rho.embed(f) @ rho.embed(g) - rho.embed(f * g))) <= 1e-12
        assert np.max(np.abs(rho.embed(f).conj().T - rho.embed(f.conj()))) == 0.0


def test_extract_rejects_offdiagonal_mass():
    rho = DiagonalEmbedding(euclidean_space(3))
    bad = identity(3)
    bad[0, 1] = 1e-6
    with pytest.raises(NotInSubalgebraError):
        rho.extract(bad)


# ---------------------------------------------------------------------------
# Pinching.
# ---------------------------------------------------------------------------


def test_pinch_fixes_diagonals_and_kills_offdiagonal():
    d = np.diag(np.array([1.0, 2.0, 3.0])).astype(complex)
    assert np.array_equal(pinch(d), d)
    hollow = np.array([[0, 1], [1, 0]], dtype=complex)
    assert np.max(np.abs(pinch(hollow))) == 0.0


def test_pinch_axioms_on_random_matrices():
    rng = np.random.default_rng(13)
    for n in range(2, 17):
        for a in (random_hermitian(rng, n) for _ in range(60)):
            e = pinch(a)
            assert np.array_equal(pinch(e), e)
            assert abs(trace_state(e) - trace_state(a)) <= 1e-12
            assert operator_norm(e) <= operator_norm(a) + 1e-12


def test_pinch_contractivity_thousand_samples_per_dimension():
    rng = np.random.default_rng(17)
    for n in range(2, 17):
        g = rng.normal(size=(1000, n, n)) + 1j * rng.normal(size=(1000, n, n))
        stack = (g + g.conj().transpose(0, 2, 1)) / 2.0
        diag_norms = np.max(np.abs(np.diagonal(stack, axis1=1, axis2=2)), axis=1)
        assert np.max(diag_norms - operator_norms(stack)) <= 1e-12


def test_pinch_positivity_on_psd_inputs():
    rng = np.random.default_rng(14)
    for _ in range(100):
        n = int(rng.integers(2, 10))
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        psd = g @ g.conj().T
        assert np.min(np.diag(pinch(psd)).real) >= -1e-12


def test_pinch_bimodule_over_diagonals():
    rng = np.random.default_rng(15)
    for _ in range(50):
        n = int(rng.integers(2, 8))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        f = np.diag(rng.uniform(-1, 1, size=n)).astype(complex)
        g = np.diag(rng.uniform(-1, 1, size=n)).astype(complex)
        assert np.max(np.abs(pinch(f @ a @ g) - f @ pinch(a) @ g)) <= 1e-12


def _diagonal_expectation_from_constraints(n: int) -> tuple[np.ndarray, int]:
    """Solve for a linear map onto the diagonal that is a bimodule projection
    over diagonal matrix units and preserves the trace.

    Unknown v[i, j, r] is the r-th diagonal entry of the image of the matrix
    unit e_ij.  Returns the solution and the rank of the constraint system.
    """
    dim = n**3

    def col(i: int, j: int, r: int) -> int:
        return (i * n + j) * n + r

    rows = []
    rhs = []
    for k in range(n):
        for l in range(n):
            for i in range(n):
                for j in range(n):
                    for r in range(n):
                        row = np.zeros(dim)
                        if k == i and l == j:
                            row[col(i, j, r)] += 1.0
                        if k == l and r == k:
                            row[col(i, j, k)] -= 1.0
                        if np.any(row):
                            rows.append(row)
                            rhs.append(0.0)
    for i in range(n):
        for j in range(n):
            row = np.zeros(dim)
            for r in range(n):
                row[col(i, j, r)] = 1.0
            rows.append(row)
            rhs.append(1.0 if i == j else 0.0)
    a = np.asarray(rows)
    b = np.asarray(rhs)
    solution, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    return solution.reshape(n, n, n), int(rank)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pinch_is_the_unique_trace_preserving_expectation(n):
    solution, rank = _diagonal_expectation_from_constraints(n)
    assert rank == n**3  # the constraints pin the map completely
    expected = np.zeros((n, n, n))
    for i in range(n):
        expected[i, i, i] = 1.0
    assert np.allclose(solution, expected, atol=1e-10)


# ---------------------------------------------------------------------------
# Wire format.
# ---------------------------------------------------------------------------


def test_matrix_pairs_round_trip():
    rng = np.random.default_rng(16)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.array_equal(matrix_from_pairs(matrix_to_pairs(a)), a)


def test_matrix_from_pairs_validates_shape():
    with pytest.raises(InputShapeError):
        matrix_from_pairs([[[0.0, 0.0]], [[0.0, 0.0]]])
