"""
Two-qubit state space in SU(4) Euler coordinates

A 15-coordinate unit-cube point becomes a density matrix
rho = U diag(lambda) U^dagger, with

    U = e^{i l3 a1} e^{i l2 a2} e^{i l3 a3} e^{i l5 a4} e^{i l3 a5} e^{i l10 a6}
        e^{i l3 a7} e^{i l2 a8} e^{i l3 a9} e^{i l5 a10} e^{i l3 a11} e^{i l2 a12}

(l_k the SU(4) Gell-Mann generators; the trailing diagonal factors of the full
group element cancel against diag(lambda)). Coordinates 0..11 are the angles,
12..14 the spectrum.

Angle ranges, coordinate k scaled by ANGLE_SCALES[k]:
    a2, a4, a6, a8, a10, a12 (rotations)        -> [0, pi/2]
    a1, a3, a11 (l3 phases)                    -> [0, pi]
    a5, a7, a9  (l3 phases ahead of l5 / l10)   -> [0, 2*pi]
A half-period shift of a1, a3 or a11 multiplies rho by diag(-1,-1,1,1), which
is local on the left or cancels, so [0, pi] is enough for them. A shift of
a5, a7 or a9 does not reduce to a local unitary, so those take their full
period.

The Haar density over these angles is

    sin(2a2) sin(a4) cos^3(a4) sin^5(a6) cos(a6)
    * sin(2a8) sin^3(a10) cos(a10) * sin(2a12)

The last factor is the SU(2) density of the l2 rotation on levels 1-2.
It equals 1 at a12 = pi/4.
"""

from dataclasses import dataclass

import numpy as np

from src.errors import DomainError

ANGLE_COUNT = 12
SPECTRUM_COORDS = 3
DIMENSION = ANGLE_COUNT + SPECTRUM_COORDS
PURITY_SLACK = 1e-12

HALF_PI = 0.5 * np.pi
ANGLE_SCALES = np.array([
    np.pi, HALF_PI, np.pi, HALF_PI, 2.0 * np.pi, HALF_PI,
    2.0 * np.pi, HALF_PI, 2.0 * np.pi, HALF_PI, np.pi, HALF_PI,
])

# (generator, angle index); generator is 'l3' or a rotation plane (i, j)
_EULER_SEQUENCE = (
    ("l3", 0), ((0, 1), 1), ("l3", 2), ((0, 2), 3), ("l3", 4), ((0, 3), 5),
    ("l3", 6), ((0, 1), 7), ("l3", 8), ((0, 2), 9), ("l3", 10), ((0, 1), 11),
)


@dataclass(frozen=True)
class SampledState:
    rho: np.ndarray
    angles: np.ndarray
    spectrum: np.ndarray
    haar_weight: float


@dataclass(frozen=True)
class BlochRadii:
    r_a: float
    r_b: float


@dataclass
class StateBlock:
    """Vectorized counterpart of SampledState for a block of points."""
    rho: np.ndarray          # (N, 4, 4) complex
    angles: np.ndarray       # (N, 12)
    spectrum: np.ndarray     # (N, 4)
    log_haar: np.ndarray     # (N,)

    def __len__(self) -> int:
        return self.rho.shape[0]

    def state(self, i: int) -> SampledState:
        return SampledState(
            rho=self.rho[i],
            angles=self.angles[i],
            spectrum=self.spectrum[i],
            haar_weight=float(np.exp(self.log_haar[i])),
        )


def eigen_from_unit(u: np.ndarray) -> np.ndarray:
    """
    Sort-and-difference map from [0,1]^3 to the probability simplex.

    Accepts shape (3,) or (N, 3); uniform u gives the flat (Lebesgue)
    distribution on the simplex.
    """
    u = np.asarray(u, dtype=np.float64)
    s = np.sort(u, axis=-1)
    zeros = np.zeros(s.shape[:-1] + (1,))
    ones = np.ones(s.shape[:-1] + (1,))
    return np.diff(np.concatenate([zeros, s, ones], axis=-1), axis=-1)


def scale_angles(u: np.ndarray) -> np.ndarray:
    return np.asarray(u, dtype=np.float64) * ANGLE_SCALES


def log_haar_weight(angles: np.ndarray) -> np.ndarray:
    """Log of the Haar density; -inf where a factor vanishes."""
    a = np.asarray(angles, dtype=np.float64)
    factors = (
        np.sin(2.0 * a[..., 1]),
        np.sin(a[..., 3]),
        np.cos(a[..., 3]) ** 3,
        np.sin(a[..., 5]) ** 5,
        np.cos(a[..., 5]),
        np.sin(2.0 * a[..., 7]),
        np.sin(a[..., 9]) ** 3,
        np.cos(a[..., 9]),
        np.sin(2.0 * a[..., 11]),
    )
    with np.errstate(divide="ignore"):
        return sum(np.log(np.clip(f, 0.0, None)) for f in factors)


def haar_weight(angles: np.ndarray) -> np.ndarray:
    a = np.asarray(angles, dtype=np.float64)
    w = (
        np.sin(2.0 * a[..., 1]) * np.sin(a[..., 3]) * np.sin(a[..., 5]) ** 5
        * np.sin(2.0 * a[..., 7]) * np.sin(a[..., 9]) ** 3
        * np.cos(a[..., 3]) ** 3 * np.cos(a[..., 5]) * np.cos(a[..., 9])
        * np.sin(2.0 * a[..., 11])
    )
    return np.clip(w, 0.0, None)


def _conjugate_phase(m: np.ndarray, a: np.ndarray) -> None:
    """m <- G m G^dagger for G = diag(e^{ia}, e^{-ia}, 1, 1), in place."""
    p = np.exp(1j * a)[:, None]
    m[:, 0, :] *= p
    m[:, 1, :] *= p.conj()
    m[:, :, 0] *= p.conj()
    m[:, :, 1] *= p


def _conjugate_rotation(m: np.ndarray, i: int, j: int, theta: np.ndarray) -> None:
    """m <- R m R^T for the real rotation with R[i,i]=R[j,j]=c, R[i,j]=s, R[j,i]=-s."""
    c = np.cos(theta)[:, None]
    s = np.sin(theta)[:, None]
    row_i, row_j = m[:, i, :].copy(), m[:, j, :].copy()
    m[:, i, :] = c * row_i + s * row_j
    m[:, j, :] = c * row_j - s * row_i
    col_i, col_j = m[:, :, i].copy(), m[:, :, j].copy()
    m[:, :, i] = c * col_i + s * col_j
    m[:, :, j] = c * col_j - s * col_i


def conjugate_diagonal(angles: np.ndarray, spectrum: np.ndarray) -> np.ndarray:
    """U diag(spectrum) U^dagger for a batch, applying the factors right to left."""
    n = angles.shape[0]
    rho = np.zeros((n, 4, 4), dtype=np.complex128)
    idx = np.arange(4)
    rho[:, idx, idx] = spectrum

    for generator, k in reversed(_EULER_SEQUENCE):
        if generator == "l3":
            _conjugate_phase(rho, angles[:, k])
        else:
            _conjugate_rotation(rho, generator[0], generator[1], angles[:, k])
    return rho


def assemble_block(u: np.ndarray) -> StateBlock:
    """Map an (N, 15) block of unit-cube points to density matrices."""
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    if u.shape[1] != DIMENSION:
        raise ValueError(f"expected {DIMENSION} coordinates per point, got {u.shape[1]}")

    angles = scale_angles(u[:, :ANGLE_COUNT])
    spectrum = eigen_from_unit(u[:, ANGLE_COUNT:])
    rho = conjugate_diagonal(angles, spectrum)
    return StateBlock(rho=rho, angles=angles, spectrum=spectrum, log_haar=log_haar_weight(angles))


def assemble_state(u: np.ndarray) -> SampledState:
    return assemble_block(np.asarray(u)[None, :]).state(0)


def reduced_states(rho: np.ndarray):
    """Partial traces (rho_A, rho_B) of one (4,4) or a batch of (N,4,4) states."""
    rho = np.asarray(rho)
    r = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    rho_a = np.einsum("...ijkj->...ik", r)
    rho_b = np.einsum("...ijil->...jl", r)
    return rho_a, rho_b


def _bloch_radius(sub: np.ndarray) -> np.ndarray:
    purity = np.einsum("...ij,...ji->...", sub, sub).real
    arg = 2.0 * purity - 1.0
    if np.any(arg < -PURITY_SLACK):
        raise DomainError(f"reduced state purity below 1/2 (2 tr rho^2 - 1 = {np.min(arg):.3e})")
    return np.sqrt(np.clip(arg, 0.0, None))


def bloch_radii_block(rho: np.ndarray):
    rho_a, rho_b = reduced_states(rho)
    return _bloch_radius(rho_a), _bloch_radius(rho_b)


def reduced_bloch_radii(state) -> BlochRadii:
    rho = state.rho if isinstance(state, SampledState) else np.asarray(state)
    r_a, r_b = bloch_radii_block(rho)
    return BlochRadii(r_a=float(r_a), r_b=float(r_b))
