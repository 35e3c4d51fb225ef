import numpy as np
import pytest

from conftest import random_hermitian
from discordium.counterexample import COUNTEREXAMPLE_MATRIX
from discordium.errors import DimensionMismatch, NegativeEigenvalue, NotHermitian
from discordium.linalg import (
    distance,
    hermitian_eig,
    jacobi_eig,
    kron,
    matrix_function_on_support,
    partial_trace,
    support_cutoff,
    trace_distance,
)

# The 4x4 counterexample matrix is [[D, O], [O, D]] with 2x2 symmetric
# blocks, so its spectrum is the union of the spectra of D + O and D - O;
# both are of the form a*I + b*X with eigenvalues a +- b. Hand evaluation
# gives exactly {0.36, 0.10} and {0.42, 0.12}.
COUNTEREXAMPLE_SPECTRUM = np.array([0.10, 0.12, 0.36, 0.42])


class TestHermitianEig:
    def test_identity(self):
        vals, _ = hermitian_eig(np.eye(2))
        assert np.allclose(vals, [1.0, 1.0])

    def test_diagonal_sorted_ascending(self):
        vals, _ = hermitian_eig(np.diag([0.75, 0.25]))
        assert np.allclose(vals, [0.25, 0.75])

    def test_counterexample_matrix_spectrum(self):
        vals, _ = hermitian_eig(COUNTEREXAMPLE_MATRIX)
        assert np.allclose(vals, COUNTEREXAMPLE_SPECTRUM, atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("dim", [2, 3, 5, 8])
    def test_reconstruction_and_orthonormality(self, dim, seed):
        m = random_hermitian(dim, np.random.default_rng(seed))
        vals, vecs = hermitian_eig(m)
        resid = np.linalg.norm((vecs * vals) @ vecs.conj().T - m)
        assert resid <= 1e-10 * max(1.0, np.linalg.norm(m))
        assert np.linalg.norm(vecs.conj().T @ vecs - np.eye(dim)) <= 1e-10


class TestJacobiEig:
    def test_counterexample_matrix_spectrum(self):
        vals, _ = jacobi_eig(COUNTEREXAMPLE_MATRIX)
        assert np.allclose(vals, COUNTEREXAMPLE_SPECTRUM, atol=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    @pytest.mark.parametrize("dim", [2, 3, 4, 7])
    def test_agrees_with_lapack(self, dim, seed):
        m = random_hermitian(dim, np.random.default_rng(100 + seed))
        jv, jw = jacobi_eig(m)
        lv, _ = hermitian_eig(m)
        assert np.allclose(jv, lv, atol=1e-10)
        resid = np.linalg.norm((jw * jv) @ jw.conj().T - m)
        assert resid <= 1e-10 * max(1.0, np.linalg.norm(m))
        assert np.linalg.norm(jw.conj().T @ jw - np.eye(dim)) <= 1e-10

    def test_method_switch(self):
        m = random_hermitian(4, np.random.default_rng(5))
        assert np.allclose(
            hermitian_eig(m, method="jacobi").eigenvalues,
            hermitian_eig(m).eigenvalues,
            atol=1e-10,
        )


class TestMatrixFunctionOnSupport:
    def test_sqrt_on_singular_diagonal(self):
        out = matrix_function_on_support(np.diag([4.0, 0.0]), np.sqrt)
        assert np.allclose(out, np.diag([2.0, 0.0]))

    def test_inverse_sqrt_only_on_support(self):
        out = matrix_function_on_support(np.diag([4.0, 0.0]), lambda x: x ** -0.5)
        assert np.allclose(out, np.diag([0.5, 0.0]))

    @pytest.mark.parametrize("seed", range(5))
    def test_sqrt_squares_back(self, seed):
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        m = g @ g.conj().T
        root = matrix_function_on_support(m, np.sqrt)
        assert np.linalg.norm(root @ root - m) <= 1e-9 * np.linalg.norm(m)

    def test_identity_function_is_identity_on_full_support(self):
        rng = np.random.default_rng(77)
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        m = g @ g.conj().T + 0.5 * np.eye(4)
        out = matrix_function_on_support(m, lambda x: x)
        assert np.allclose(out, m, atol=1e-12)

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NegativeEigenvalue):
            matrix_function_on_support(np.diag([1.0, -0.5]), np.sqrt)


class TestKron:
    def test_identity(self):
        assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_block_placement(self):
        x = np.array([[0.0, 1.0], [1.0, 0.0]])
        out = kron(np.diag([1.0, 0.0]), x)
        expected = np.zeros((4, 4))
        expected[:2, :2] = x
        assert np.allclose(out, expected)

    @pytest.mark.parametrize("seed", range(4))
    def test_trace_multiplicative(self, seed):
        rng = np.random.default_rng(seed)
        a = random_hermitian(3, rng)
        b = random_hermitian(2, rng)
        assert np.isclose(np.trace(kron(a, b)), np.trace(a) * np.trace(b))


class TestPartialTrace:
    def test_product_state(self):
        rng = np.random.default_rng(1)
        a = random_hermitian(2, rng)
        b = random_hermitian(3, rng)
        out = partial_trace(kron(a, b), 2, 3, keep="A")
        assert np.allclose(out, a * np.trace(b), atol=1e-12)
        out_b = partial_trace(kron(a, b), 2, 3, keep="B")
        assert np.allclose(out_b, b * np.trace(a), atol=1e-12)

    def test_maximally_entangled_reduction(self):
        v = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
        out = partial_trace(np.outer(v, v), 2, 2, keep="A")
        assert np.allclose(out, np.eye(2) / 2)

    @pytest.mark.parametrize("seed", range(4))
    def test_trace_preserved(self, seed):
        m = random_hermitian(6, np.random.default_rng(seed))
        assert np.isclose(np.trace(partial_trace(m, 2, 3, keep="A")), np.trace(m))
        assert np.isclose(np.trace(partial_trace(m, 3, 2, keep="B")), np.trace(m))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            partial_trace(np.eye(5), 2, 3, keep="A")


class TestDistance:
    def test_zero_on_equal(self):
        m = random_hermitian(3, np.random.default_rng(0))
        assert distance(m, m) == 0.0
        assert distance(m, m, norm="trace") == 0.0

    def test_orthogonal_pure_states_trace_norm(self):
        assert np.isclose(distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), "trace"), 2.0)
        assert np.isclose(trace_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), 1.0)

    @pytest.mark.parametrize("norm", ["frobenius", "trace"])
    @pytest.mark.parametrize("seed", range(4))
    def test_triangle_inequality(self, norm, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (random_hermitian(3, rng) for _ in range(3))
        assert distance(a, c, norm) <= distance(a, b, norm) + distance(b, c, norm) + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            distance(np.eye(2), np.eye(3))


def test_support_cutoff_floor():
    assert support_cutoff(np.array([1e-3])) == 1e-10
    assert np.isclose(support_cutoff(np.array([50.0])), 5e-9)
