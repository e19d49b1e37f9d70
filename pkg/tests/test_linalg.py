import numpy as np
import pytest

from conftest import random_density_matrix, rk4_unitary
from qdcascade.linalg import (
    HBAR_UEV_PS,
    IDENTITY_2,
    IDENTITY_4,
    SIGMA_Y,
    SIGMA_Z,
    InvalidDensityMatrixError,
    NotHermitianError,
    NotPSDError,
    assert_density_matrix,
    eig_hermitian,
    sqrt_psd,
    tensor,
    unitary_exp,
)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + a.conj().T)


class TestTensor:
    def test_identity(self):
        assert np.array_equal(tensor(IDENTITY_2, IDENTITY_2), IDENTITY_4)

    def test_sigma_z_identity(self):
        assert np.array_equal(tensor(SIGMA_Z, IDENTITY_2), np.diag([1, 1, -1, -1]).astype(complex))

    def test_basis_order(self):
        h = np.array([1.0, 0.0])
        v = np.array([0.0, 1.0])
        assert np.array_equal(tensor(h, v), np.array([0, 1, 0, 0], dtype=complex))

    def test_trace_multiplicative(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            assert abs(np.trace(tensor(a, b)) - np.trace(a) * np.trace(b)) < 1e-12


class TestEigHermitian:
    def test_diagonal(self):
        w, v = eig_hermitian(np.diag([1.0, -1.0]))
        assert np.allclose(w, [1.0, -1.0])
        assert np.allclose(v, IDENTITY_2)

    def test_sigma_y_spectrum_and_phase_convention(self):
        w, v = eig_hermitian(SIGMA_Y)
        assert np.allclose(w, [1.0, -1.0])
        assert np.allclose(v[:, 0], np.array([1.0, 1j]) / np.sqrt(2), atol=1e-12)
        assert np.allclose(v[:, 1], np.array([1.0, -1j]) / np.sqrt(2), atol=1e-12)

    def test_reconstruction_random_4x4(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            m = random_hermitian(rng, 4)
            w, v = eig_hermitian(m)
            assert np.abs(v @ np.diag(w) @ v.conj().T - m).max() < 1e-9
            # descending order, eigenvalue sum equals the trace
            assert np.all(np.diff(w) <= 1e-12)
            assert abs(w.sum() - np.trace(m).real) < 1e-9
            assert np.abs(v.conj().T @ v - IDENTITY_4).max() < 1e-9

    def test_residual_per_pair(self):
        rng = np.random.default_rng(3)
        m = random_hermitian(rng, 4)
        w, v = eig_hermitian(m)
        scale = np.linalg.norm(m)
        for i in range(4):
            assert np.linalg.norm(m @ v[:, i] - w[i] * v[:, i]) < 1e-9 * scale

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestUnitaryExp:
    def test_zero_time(self):
        h = np.array([[0.3, 0.2j], [-0.2j, -0.3]])
        assert np.allclose(unitary_exp(h, 0.0), IDENTITY_2)

    def test_diagonal_phase(self):
        h = np.diag([0.65, -0.65]).astype(complex)
        t = np.pi * HBAR_UEV_PS / 1.3
        u = unitary_exp(h, t)
        assert np.allclose(u, np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]), atol=1e-12)

    def test_matches_rk4_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            h = 0.5 * (a + a.conj().T)
            t = rng.uniform(10.0, 150.0)
            oracle = rk4_unitary(h, t, n_steps=15000)  # step <= 0.01 ps
            assert np.abs(unitary_exp(h, t) - oracle).max() < 1e-8

    def test_unitarity(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = 0.5 * (a + a.conj().T)
        u = unitary_exp(h, 321.0)
        assert np.abs(u.conj().T @ u - IDENTITY_2).max() < 1e-12

    def test_group_property(self):
        rng = np.random.default_rng(13)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = 0.5 * (a + a.conj().T)
        t1, t2 = 123.4, 567.8
        assert np.abs(unitary_exp(h, t1) @ unitary_exp(h, t2) - unitary_exp(h, t1 + t2)).max() < 1e-10


class TestSqrtPSD:
    def test_identity(self):
        assert np.allclose(sqrt_psd(IDENTITY_4), IDENTITY_4)

    def test_diagonal(self):
        assert np.allclose(sqrt_psd(np.diag([4.0, 1.0, 0.0, 0.0])), np.diag([2.0, 1.0, 0.0, 0.0]))

    def test_reconstruction_random_psd(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            m = random_density_matrix(rng) * rng.uniform(0.5, 3.0)
            r = sqrt_psd(m)
            assert np.abs(r @ r - m).max() < 1e-8
            assert np.abs(r - r.conj().T).max() < 1e-12

    def test_clamps_noise_eigenvalues(self):
        r = sqrt_psd(np.diag([1.0, 1.0, 1.0, -5e-11]))
        assert np.all(np.linalg.eigvalsh(r) >= -1e-12)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPSDError):
            sqrt_psd(np.diag([1.0, 1.0, 1.0, -1e-6]))


class TestDensityMatrixValidation:
    def test_accepts_valid(self):
        rng = np.random.default_rng(21)
        assert_density_matrix(random_density_matrix(rng))

    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidDensityMatrixError):
            assert_density_matrix(np.diag([0.5, 0.5, 0.5, 0.0]))

    def test_rejects_non_hermitian(self):
        rho = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
        rho[0, 1] = 0.1
        with pytest.raises(InvalidDensityMatrixError):
            assert_density_matrix(rho)

    def test_rejects_negative(self):
        with pytest.raises(InvalidDensityMatrixError):
            assert_density_matrix(np.diag([1.1, 0.0, 0.0, -0.1]))
