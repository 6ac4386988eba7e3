"""
Separability tests for two-qubit states.

PPT: for two qubits at most one eigenvalue of the partial transpose can be
negative, so the sign of det(rho^PT) decides separability. The eigenvalue
mode is kept for cross-checking.

Absolute separability depends on the spectrum only:
l1 <= l3 + 2 sqrt(l2 l4) with l sorted descending.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from src.config.config_main import estimation_config
from src.errors import DomainError

HERMITIAN_TOL = 1e-8
EIGEN_ATOL = 1e-13

BoolLike = Union[bool, np.ndarray]


@dataclass(frozen=True)
class SepFlags:
    separable: BoolLike
    absolutely_separable: BoolLike


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """Transpose over the second qubit: block-wise transpose of the four 2x2 blocks."""
    rho = np.asarray(rho)
    r = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    return r.swapaxes(-3, -1).reshape(rho.shape)


def ppt_determinant(rho: np.ndarray) -> np.ndarray:
    return np.linalg.det(partial_transpose(rho)).real


def _check_hermitian(rho: np.ndarray) -> None:
    deviation = np.max(np.abs(rho - np.conj(np.swapaxes(rho, -1, -2))))
    if deviation > HERMITIAN_TOL:
        raise DomainError(f"input is not Hermitian (max |rho - rho^dagger| = {deviation:.3e})")


def ppt_separable(
    rho: np.ndarray,
    mode: str = "determinant",
    atol: float = None,
    check: bool = True,
) -> BoolLike:
    """
    Peres-Horodecki test on one (4,4) state or a batch (N,4,4).

    Args:
        rho: Density matrix or batch of density matrices
        mode: 'determinant' (hot path) or 'eigen'
        atol: Boundary tolerance; det = 0 counts as separable
        check: Verify Hermiticity first

    Returns:
        True where the partial transpose is positive semidefinite
    """
    rho = np.asarray(rho)
    if check:
        _check_hermitian(rho)

    if mode == "determinant":
        tol = estimation_config.ppt_atol if atol is None else atol
        result = ppt_determinant(rho) >= -tol
    elif mode == "eigen":
        tol = EIGEN_ATOL if atol is None else atol
        pt = partial_transpose(rho)
        pt = 0.5 * (pt + np.conj(np.swapaxes(pt, -1, -2)))
        result = np.linalg.eigvalsh(pt)[..., 0] >= -tol
    else:
        raise DomainError(f"unknown PPT mode '{mode}'")

    return bool(result) if np.ndim(result) == 0 else result


def absolutely_separable(spectrum: np.ndarray) -> BoolLike:
    lam = -np.sort(-np.asarray(spectrum, dtype=np.float64), axis=-1)
    bound = lam[..., 2] + 2.0 * np.sqrt(np.clip(lam[..., 1] * lam[..., 3], 0.0, None))
    result = lam[..., 0] <= bound
    return bool(result) if np.ndim(result) == 0 else result


def classify(rho: np.ndarray, spectrum: np.ndarray, check: bool = False) -> SepFlags:
    return SepFlags(
        separable=ppt_separable(rho, check=check),
        absolutely_separable=absolutely_separable(spectrum),
    )
