import numpy as np
import pytest

from qslbounds.errors import InvalidState, NotHermitian
from qslbounds.matcore import (
    DensityOperator,
    eig_hermitian,
    matrix_abs,
    maximally_mixed,
    pure_state,
    random_density_operator,
    random_unitary,
    trace_norm,
)


def random_hermitian(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (g + g.conj().T)


class TestEigHermitian:
    def test_diagonal(self):
        dec = eig_hermitian(np.diag([3.0, 1.0]).astype(complex))
        assert np.allclose(dec.eigenvalues, [1.0, 3.0])
        assert np.allclose(np.abs(dec.eigenvectors), np.eye(2)[:, ::-1])

    def test_pauli_x(self):
        sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        dec = eig_hermitian(sx)
        assert np.allclose(dec.eigenvalues, [-1.0, 1.0])

    def test_reconstruction_random_6x6(self):
        rng = np.random.default_rng(42)
        a = random_hermitian(6, rng)
        dec = eig_hermitian(a)
        err = np.max(np.abs(a - dec.reconstruct()))
        assert err < 1e-9 * np.max(np.abs(a))
        unitarity = np.max(np.abs(dec.eigenvectors.conj().T @ dec.eigenvectors - np.eye(6)))
        assert unitarity < 1e-9

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


class TestTraceNorm:
    def test_zero(self):
        assert trace_norm(np.zeros((3, 3), dtype=complex)) == 0.0

    def test_diag(self):
        assert trace_norm(np.diag([0.5, -0.5]).astype(complex)) == pytest.approx(1.0, abs=1e-14)

    def test_orthogonal_pure_difference(self):
        rho = pure_state(np.array([1.0, 0.0])).matrix
        sigma = pure_state(np.array([0.0, 1.0])).matrix
        assert trace_norm(rho - sigma) == pytest.approx(2.0, abs=1e-12)

    def test_norm_axioms_on_random_triples(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            a = random_hermitian(4, rng)
            b = random_hermitian(4, rng)
            s = rng.standard_normal()
            assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-9
            assert trace_norm(s * a) == pytest.approx(abs(s) * trace_norm(a), rel=1e-9, abs=1e-12)


class TestMatrixAbs:
    def test_diag(self):
        assert np.allclose(matrix_abs(np.diag([-2.0, 3.0]).astype(complex)), np.diag([2.0, 3.0]))

    def test_idempotent_on_psd(self):
        rho = random_density_operator(4, 3).matrix
        assert np.max(np.abs(matrix_abs(rho) - rho)) < 1e-10

    def test_square_identity(self):
        rng = np.random.default_rng(5)
        a = random_hermitian(5, rng)
        lhs = matrix_abs(a) @ matrix_abs(a)
        assert np.max(np.abs(lhs - a @ a)) < 1e-9

    def test_output_psd(self):
        rng = np.random.default_rng(6)
        a = random_hermitian(5, rng)
        w = np.linalg.eigvalsh(matrix_abs(a))
        assert np.min(w) > -1e-12


class TestDensityOperator:
    def test_scalar_dim_1(self):
        rho = random_density_operator(1, 0)
        assert rho.dim == 1
        assert rho.matrix[0, 0] == pytest.approx(1.0)

    def test_seed_determinism(self):
        a = random_density_operator(4, 123).matrix
        b = random_density_operator(4, 123).matrix
        assert np.array_equal(a, b)
        c = random_density_operator(4, 124).matrix
        assert not np.array_equal(a, c)

    def test_invariant_sweep(self):
        # 1000 Ginibre samples at dim 4 all satisfy the state invariants.
        for seed in range(1000):
            rho = random_density_operator(4, seed)
            assert abs(np.trace(rho.matrix) - 1.0) < 1e-10
            assert np.max(np.abs(rho.matrix - rho.matrix.conj().T)) < 1e-10
            assert np.min(rho.eigenvalues) >= 0.0
            assert np.sum(rho.eigenvalues) == pytest.approx(1.0, abs=1e-9)

    def test_clips_tiny_negative_eigenvalue(self):
        rho = DensityOperator(np.diag([1.0 + 5e-13, -5e-13]).astype(complex))
        assert np.min(rho.eigenvalues) >= 0.0
        assert np.trace(rho.matrix) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_large_negative_eigenvalue(self):
        with pytest.raises(InvalidState):
            DensityOperator(np.diag([1.0 + 1e-6, -1e-6]).astype(complex))

    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidState):
            DensityOperator(np.diag([0.6, 0.6]).astype(complex))

    def test_immutable(self):
        rho = maximally_mixed(2)
        with pytest.raises(AttributeError):
            rho.dim = 3
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 2.0


def test_random_unitary_is_unitary():
    rng = np.random.default_rng(9)
    u = random_unitary(5, rng)
    assert np.max(np.abs(u.conj().T @ u - np.eye(5))) < 1e-10
