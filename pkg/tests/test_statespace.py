"""
Tests for the SU(4) Euler-angle state construction.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from src.errors import DomainError
from src.quantum.statespace import (
    ANGLE_SCALES, DIMENSION, assemble_block, assemble_state, bloch_radii_block,
    eigen_from_unit, haar_weight, log_haar_weight, reduced_bloch_radii, reduced_states,
)


def _generator(kind):
    g = np.zeros((4, 4), dtype=complex)
    if kind == "l3":
        g[0, 0], g[1, 1] = 1.0, -1.0
    else:
        i, j = kind
        g[i, j], g[j, i] = -1j, 1j
    return g


EULER_ORDER = ["l3", (0, 1), "l3", (0, 2), "l3", (0, 3), "l3", (0, 1), "l3", (0, 2), "l3", (0, 1)]


def _explicit_unitary(angles):
    u = np.eye(4, dtype=complex)
    for kind, a in zip(EULER_ORDER, angles):
        u = u @ expm(1j * a * _generator(kind))
    return u


@pytest.fixture
def rng():
    return np.random.default_rng(20190101)


class TestEigenvalues:
    """Test the unit-cube to simplex map."""

    def test_sort_and_difference(self):
        lam = eigen_from_unit([0.9, 0.2, 0.5])
        assert lam == pytest.approx([0.2, 0.3, 0.4, 0.1])

    def test_batch_on_simplex(self, rng):
        lam = eigen_from_unit(rng.random((500, 3)))
        assert lam.shape == (500, 4)
        assert np.all(lam >= 0.0)
        assert np.allclose(lam.sum(axis=1), 1.0)


class TestHaarWeight:
    """Test the Haar density over the Euler angles."""

    def test_log_matches_direct(self, rng):
        angles = rng.random((200, 12)) * ANGLE_SCALES
        assert np.allclose(np.exp(log_haar_weight(angles)), haar_weight(angles), rtol=1e-12, atol=0.0)

    def test_vanishes_on_boundary(self):
        angles = np.full(12, np.pi / 4)
        angles[1] = 0.0
        assert haar_weight(angles) == 0.0
        assert log_haar_weight(angles) == -np.inf

    def test_peak_factor_at_quarter_pi(self):
        angles = np.full(12, np.pi / 4)
        expected = (0.5 ** 0.5) ** 4 * (0.5 ** 0.5) ** 6 * (0.5 ** 0.5) ** 4
        assert haar_weight(angles) == pytest.approx(expected)


class TestAssembly:
    """Test density-matrix assembly."""

    def test_matches_explicit_product(self, rng):
        u = rng.random(DIMENSION)
        state = assemble_state(u)
        unitary = _explicit_unitary(state.angles)
        expected = unitary @ np.diag(state.spectrum) @ unitary.conj().T
        assert np.allclose(state.rho, expected, atol=1e-13)

    def test_is_density_matrix(self, rng):
        block = assemble_block(rng.random((300, DIMENSION)))
        rho = block.rho
        assert np.allclose(rho, np.conj(np.swapaxes(rho, 1, 2)), atol=1e-14)
        assert np.allclose(np.trace(rho, axis1=1, axis2=2), 1.0, atol=1e-14)
        eig = np.linalg.eigvalsh(rho)
        assert np.allclose(eig, np.sort(block.spectrum, axis=1), atol=1e-12)

    def test_block_state_accessor(self, rng):
        block = assemble_block(rng.random((5, DIMENSION)))
        state = block.state(3)
        assert len(block) == 5
        assert np.array_equal(state.rho, block.rho[3])
        assert state.haar_weight == pytest.approx(float(haar_weight(block.angles[3])))

    def test_rejects_wrong_width(self):
        with pytest.raises(ValueError):
            assemble_block(np.zeros((2, 14)))


class TestReducedStates:
    """Test partial traces and Bloch radii."""

    def test_product_state(self):
        a = np.array([[0.7, 0.1], [0.1, 0.3]], dtype=complex)
        b = np.array([[0.5, 0.2j], [-0.2j, 0.5]], dtype=complex)
        rho_a, rho_b = reduced_states(np.kron(a, b))
        assert np.allclose(rho_a, a)
        assert np.allclose(rho_b, b)

    def test_bloch_radii(self):
        a = np.array([[0.7, 0.1], [0.1, 0.3]], dtype=complex)
        b = np.array([[0.5, 0.2j], [-0.2j, 0.5]], dtype=complex)
        radii = reduced_bloch_radii(np.kron(a, b))
        assert radii.r_a == pytest.approx(np.hypot(0.4, 0.2))
        assert radii.r_b == pytest.approx(0.4)

    def test_maximally_mixed_and_pure(self):
        r_a, r_b = bloch_radii_block(np.stack([np.eye(4) / 4, np.diag([1.0, 0, 0, 0])]))
        assert r_a == pytest.approx([0.0, 1.0], abs=1e-7)
        assert r_b == pytest.approx([0.0, 1.0], abs=1e-7)

    def test_radii_in_unit_interval(self, rng):
        block = assemble_block(rng.random((200, DIMENSION)))
        r_a, r_b = bloch_radii_block(block.rho)
        assert np.all((r_a >= 0.0) & (r_a <= 1.0 + 1e-12))
        assert np.all((r_b >= 0.0) & (r_b <= 1.0 + 1e-12))

    @pytest.mark.parametrize("signs", [(1, 0, 0, 1), (1, 0, 0, -1), (0, 1, 1, 0), (0, 1, -1, 0)])
    def test_bell_states_maximally_mixed(self, signs):
        psi = np.array(signs, dtype=complex) / np.sqrt(2.0)
        radii = reduced_bloch_radii(np.outer(psi, psi.conj()))
        assert radii.r_a == pytest.approx(0.0, abs=1e-7)
        assert radii.r_b == pytest.approx(0.0, abs=1e-7)

    def test_rounding_below_half_purity_clamped(self):
        r_a, r_b = bloch_radii_block(np.eye(4) / 4 * (1.0 - 1e-14))
        assert r_a == 0.0
        assert r_b == 0.0

    def test_malformed_state_rejected(self):
        with pytest.raises(DomainError, match="purity"):
            bloch_radii_block(0.15 * np.eye(4))
