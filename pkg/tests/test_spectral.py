"""The dense symmetric eigensolver against independent oracles."""

import numpy as np
import pytest

import trademap.spectral as spectral_mod
from oracles import charpoly_eigenvalues, naive_normalized_laplacian
from trademap.errors import AsymmetricMatrixError, ConvergenceError
from trademap.spectral import Spectrum, fix_signs, symmetric_eigen, tridiagonalize

FIXTURE_AFFINITY = np.array([
    [0.0, 1.0, 0.01],
    [1.0, 0.0, 2.0],
    [0.01, 2.0, 0.0],
])


def random_symmetric(rng, n, scale=1.0):
    s = rng.normal(size=(n, n)) * scale
    return (s + s.T) / 2.0


def rebuild_tridiagonal(diag, offdiag):
    n = diag.size
    t = np.zeros((n, n))
    t[np.arange(n), np.arange(n)] = diag
    if n > 1:
        t[np.arange(n - 1), np.arange(1, n)] = offdiag
        t[np.arange(1, n), np.arange(n - 1)] = offdiag
    return t


class TestTridiagonalize:
    def test_already_tridiagonal_passes_through(self):
        t = rebuild_tridiagonal(np.array([1.0, 2.0, 3.0]), np.array([0.5, -0.25]))
        diag, offdiag, q = tridiagonalize(t)
        assert np.allclose(diag, [1.0, 2.0, 3.0], atol=0.0)
        assert np.allclose(np.abs(offdiag), [0.5, 0.25], atol=0.0)
        assert np.max(np.abs(q.T @ q - np.eye(3))) <= 1e-10

    def test_tiny_inputs_unchanged(self):
        diag, offdiag, q = tridiagonalize(np.array([[4.0]]))
        assert diag[0] == 4.0 and offdiag.size == 0 and q[0, 0] == 1.0
        s = np.array([[2.0, -1.0], [-1.0, 2.0]])
        diag, offdiag, q = tridiagonalize(s)
        assert np.array_equal(diag, [2.0, 2.0])
        assert np.array_equal(offdiag, [-1.0])
        assert np.array_equal(q, np.eye(2))

    def test_reconstruction_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            s = random_symmetric(rng, 6)
            diag, offdiag, q = tridiagonalize(s)
            t = rebuild_tridiagonal(diag, offdiag)
            assert np.max(np.abs(q @ t @ q.T - s)) <= 1e-10
            assert np.max(np.abs(q.T @ q - np.eye(6))) <= 1e-10

    def test_asymmetric_input_rejected_with_indices(self):
        s = np.eye(4)
        s[1, 3] = 0.5
        with pytest.raises(AsymmetricMatrixError) as info:
            tridiagonalize(s)
        assert set(info.value.indices) == {1, 3}

    def test_sub_tolerance_asymmetry_accepted(self):
        s = np.eye(3)
        s[0, 1] = 1e-14
        diag, _, _ = tridiagonalize(s)
        assert diag.size == 3


class TestSymmetricEigen:
    def test_two_node_laplacian(self):
        spectrum = symmetric_eigen(np.array([[1.0, -1.0], [-1.0, 1.0]]))
        assert np.allclose(spectrum.eigenvalues, [0.0, 2.0], atol=1e-14)
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        assert np.allclose(
            spectrum.eigenvectors[:, 0], [inv_sqrt2, inv_sqrt2], atol=1e-12
        )
        # sign rule: tie in magnitude, lowest index positive
        assert np.allclose(
            spectrum.eigenvectors[:, 1], [inv_sqrt2, -inv_sqrt2], atol=1e-12
        )

    def test_diagonal_matrix(self):
        spectrum = symmetric_eigen(np.diag([3.0, 1.0, 2.0]))
        assert np.array_equal(spectrum.eigenvalues, [1.0, 2.0, 3.0])
        assert np.array_equal(
            spectrum.eigenvectors,
            np.eye(3)[:, [1, 2, 0]],
        )

    def test_one_by_one(self):
        spectrum = symmetric_eigen(np.array([[-2.5]]))
        assert spectrum.eigenvalues[0] == -2.5
        assert spectrum.eigenvectors[0, 0] == 1.0

    def test_fixture_laplacian_against_charpoly(self):
        lap = naive_normalized_laplacian(FIXTURE_AFFINITY)
        spectrum = symmetric_eigen(lap)
        expected = charpoly_eigenvalues(lap)
        assert np.max(np.abs(spectrum.eigenvalues - expected)) <= 1e-10
        assert abs(spectrum.eigenvalues[0]) <= 1e-12

    def test_small_matrices_against_charpoly(self):
        rng = np.random.default_rng(9)
        for n in (2, 3, 4):
            for _ in range(20):
                s = random_symmetric(rng, n)
                spectrum = symmetric_eigen(s)
                expected = charpoly_eigenvalues(s)
                assert np.max(np.abs(spectrum.eigenvalues - expected)) <= 1e-9

    def test_residual_orthonormality_trace(self):
        rng = np.random.default_rng(10)
        for seed in range(40):
            n = int(rng.integers(1, 51))
            scale = float(10.0 ** rng.integers(-3, 4))
            s = random_symmetric(rng, n, scale)
            spectrum = symmetric_eigen(s)
            smax = max(1.0, float(np.max(np.abs(s))))
            assert spectrum.residual_bound <= 1e-8 * smax
            v = spectrum.eigenvectors
            assert np.max(np.abs(v.T @ v - np.eye(n))) <= 1e-10
            assert abs(spectrum.eigenvalues.sum() - np.trace(s)) <= 1e-8 * n * smax
            assert np.all(np.diff(spectrum.eigenvalues) >= 0.0)

    def test_laplacian_spectrum_range(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(3, 40))
            a = rng.random((n, n)) + 0.01
            a = a + a.T
            np.fill_diagonal(a, 0.0)
            spectrum = symmetric_eigen(naive_normalized_laplacian(a))
            assert spectrum.eigenvalues[0] >= -1e-9
            assert spectrum.eigenvalues[-1] <= 2.0 + 1e-9

    def test_determinism(self):
        rng = np.random.default_rng(12)
        s = random_symmetric(rng, 17)
        first = symmetric_eigen(s)
        second = symmetric_eigen(s)
        assert first.eigenvalues.tobytes() == second.eigenvalues.tobytes()
        assert first.eigenvectors.tobytes() == second.eigenvectors.tobytes()

    def test_convergence_cap_raises(self, monkeypatch):
        monkeypatch.setattr(spectral_mod, "_MAX_SWEEPS", 0)
        rng = np.random.default_rng(13)
        with pytest.raises(ConvergenceError, match="eigenvalue 0"):
            symmetric_eigen(random_symmetric(rng, 8))


class TestFixSigns:
    def test_flips_negative_pivot(self):
        spectrum = Spectrum(
            np.array([1.0]), np.array([[-0.8], [0.6]]), 0.0
        )
        fixed = fix_signs(spectrum)
        assert np.array_equal(fixed.eigenvectors, [[0.8], [-0.6]])

    def test_positive_pivot_unchanged(self):
        spectrum = Spectrum(np.array([1.0]), np.array([[0.6], [0.8]]), 0.0)
        assert np.array_equal(
            fix_signs(spectrum).eigenvectors, spectrum.eigenvectors
        )

    def test_tie_resolves_to_lowest_index(self):
        column = np.array([-0.5, 0.5, 0.5, -0.5])
        spectrum = Spectrum(np.array([1.0]), column[:, None], 0.0)
        fixed = fix_signs(spectrum)
        assert fixed.eigenvectors[0, 0] == 0.5

    def test_idempotent_and_residual_preserving(self):
        rng = np.random.default_rng(14)
        spectrum = symmetric_eigen(random_symmetric(rng, 9))
        once = fix_signs(spectrum)
        twice = fix_signs(once)
        assert once.eigenvectors.tobytes() == twice.eigenvectors.tobytes()
        assert once.residual_bound == spectrum.residual_bound
