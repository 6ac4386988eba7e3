"""
Tests for PPT and absolute-separability checks.
"""

import numpy as np
import pytest

from src.errors import DomainError
from src.quantum.septest import (
    absolutely_separable, classify, partial_transpose, ppt_determinant, ppt_separable,
)
from src.quantum.statespace import ANGLE_SCALES, DIMENSION, assemble_block, conjugate_diagonal

BELL = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)


def werner(p):
    return p * np.outer(BELL, BELL) + (1.0 - p) * np.eye(4) / 4.0


@pytest.fixture
def rng():
    return np.random.default_rng(33)


def random_unitaries(rng, n, size):
    z = (rng.normal(size=(size, n, n)) + 1j * rng.normal(size=(size, n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (phases / np.abs(phases))[..., None, :]


def local_unitaries(rng, size):
    u_a = random_unitaries(rng, 2, size)
    u_b = random_unitaries(rng, 2, size)
    return np.einsum("nij,nkl->nikjl", u_a, u_b).reshape(size, 4, 4)


class TestPartialTranspose:
    """Test the partial transpose over the second qubit."""

    def test_product_state(self):
        a = np.array([[0.6, 0.2 + 0.1j], [0.2 - 0.1j, 0.4]])
        b = np.array([[0.3, 0.1j], [-0.1j, 0.7]])
        assert np.allclose(partial_transpose(np.kron(a, b)), np.kron(a, b.T))

    def test_involution(self, rng):
        rho = assemble_block(rng.random((10, DIMENSION))).rho
        assert np.array_equal(partial_transpose(partial_transpose(rho)), rho)


class TestPPT:
    """Test the Peres-Horodecki check."""

    def test_bell_state_entangled(self):
        assert not ppt_separable(np.outer(BELL, BELL))

    def test_maximally_mixed_separable(self):
        assert ppt_separable(np.eye(4) / 4.0)

    @pytest.mark.parametrize("p, expected", [(0.0, True), (0.3, True), (1.0 / 3.0, True), (0.34, False), (1.0, False)])
    def test_werner_threshold(self, p, expected):
        assert ppt_separable(werner(p)) is expected
        assert ppt_separable(werner(p), mode="eigen") is expected

    def test_determinant_sign_at_boundary(self):
        assert abs(ppt_determinant(werner(1.0 / 3.0))) < 1e-15

    def test_modes_agree(self, rng):
        rho = assemble_block(rng.random((5000, DIMENSION))).rho
        det = ppt_determinant(rho)
        clear = np.abs(det) > 1e-13
        by_det = ppt_separable(rho, mode="determinant")
        by_eig = ppt_separable(rho, mode="eigen")
        assert np.array_equal(by_det[clear], by_eig[clear])
        assert 0 < by_det.sum() < len(rho)

    def test_local_unitaries_keep_verdict(self, rng):
        rho = assemble_block(rng.random((2000, DIMENSION))).rho
        before = ppt_separable(rho)
        clear = np.abs(ppt_determinant(rho)) > 1e-13
        for _ in range(5):
            u = local_unitaries(rng, len(rho))
            moved = u @ rho @ np.conj(np.swapaxes(u, -1, -2))
            assert np.array_equal(ppt_separable(moved)[clear], before[clear])

    def test_local_unitary_keeps_werner_verdict(self, rng):
        u = local_unitaries(rng, 1)[0]
        for p, expected in ((0.3, True), (0.5, False)):
            moved = u @ werner(p) @ u.conj().T
            assert ppt_separable(moved) is expected

    @pytest.mark.slow
    def test_modes_agree_at_scale(self, rng):
        for _ in range(10):
            rho = assemble_block(rng.random((10_000, DIMENSION))).rho
            clear = np.abs(ppt_determinant(rho)) > 1e-13
            by_det = ppt_separable(rho, mode="determinant", check=False)
            by_eig = ppt_separable(rho, mode="eigen", check=False)
            assert np.array_equal(by_det[clear], by_eig[clear])

    def test_rejects_non_hermitian(self):
        rho = np.eye(4, dtype=complex) / 4.0
        rho[0, 1] = 0.1
        with pytest.raises(DomainError):
            ppt_separable(rho)

    def test_unknown_mode(self):
        with pytest.raises(DomainError):
            ppt_separable(np.eye(4) / 4.0, mode="trace")


class TestAbsoluteSeparability:
    """Test the spectral absolute-separability condition."""

    def test_maximally_mixed(self):
        assert absolutely_separable([0.25, 0.25, 0.25, 0.25])

    def test_pure(self):
        assert not absolutely_separable([1.0, 0.0, 0.0, 0.0])

    def test_order_independent(self):
        lam = np.array([0.1, 0.4, 0.2, 0.3])
        assert absolutely_separable(lam) == absolutely_separable(np.sort(lam)[::-1])

    def test_vectorized(self):
        flags = absolutely_separable(np.array([[0.25] * 4, [0.7, 0.1, 0.1, 0.1]]))
        assert list(flags) == [True, False]

    def test_implies_ppt_under_unitaries(self, rng):
        spectra = 0.25 + 0.05 * (rng.random((400, 4)) - 0.5)
        spectra /= spectra.sum(axis=1, keepdims=True)
        spectra = spectra[absolutely_separable(spectra)]
        assert len(spectra) > 0
        for _ in range(10):
            angles = rng.random((len(spectra), 12)) * ANGLE_SCALES
            rho = conjugate_diagonal(angles, spectra)
            assert np.all(ppt_separable(rho, check=False))

    @pytest.mark.slow
    def test_implies_ppt_at_scale(self, rng):
        candidates = 0.5 * rng.dirichlet(np.ones(4), size=200_000) + 0.125
        spectra = candidates[absolutely_separable(candidates)][:10_000]
        assert len(spectra) == 10_000
        for _ in range(10):
            angles = rng.random((len(spectra), 12)) * ANGLE_SCALES
            rho = conjugate_diagonal(angles, spectra)
            assert np.all(ppt_separable(rho, check=False))

    def test_classify(self):
        flags = classify(np.eye(4) / 4.0, np.full(4, 0.25))
        assert flags.separable and flags.absolutely_separable
