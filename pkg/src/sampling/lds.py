"""
Generalized golden-ratio quasirandom sequence

Points are (alpha0 + n * alpha) mod 1 with alpha_k = 1 / phi_d**k, where phi_d
is the real root > 1 of x**(d+1) = x + 1 (d=1 golden ratio, d=2 plastic
constant).

Every coordinate is held as a 64-bit fixed-point fraction (numerator over
2**64). Multiplication by n wraps modulo 2**64, which is exactly the mod-1
reduction, so point(n) is bit-identical whether reached by direct indexing or
by stepping, for any n below 2**64.
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, Tuple

import numpy as np
from mpmath import mp, mpf, findroot, floor as mp_floor

from src.errors import DomainError

logger = logging.getLogger(__name__)

MAX_DIMENSION = 64
FIXED_ONE = 1 << 64
_MASK = FIXED_ONE - 1
_FLOAT_SHIFT = np.uint64(11)
_FLOAT_SCALE = 2.0 ** -53


@dataclass(frozen=True)
class PhiRoot:
    d: int
    value: float

    @property
    def residual(self) -> float:
        return self.value ** (self.d + 1) - self.value - 1.0


@dataclass(frozen=True)
class AlphaVector:
    """frac(1/phi_d**k), k = 1..d, as numerators over 2**64."""
    numerators: Tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.numerators)

    def as_array(self) -> np.ndarray:
        return np.array(self.numerators, dtype=np.uint64)

    def as_float(self) -> np.ndarray:
        return np.array([n / FIXED_ONE for n in self.numerators])


@dataclass(frozen=True)
class QuasirandomStream:
    alpha: AlphaVector
    alpha0: int
    cursor: int = 0

    @property
    def d(self) -> int:
        return self.alpha.d

    @property
    def alpha0_fraction(self) -> float:
        return self.alpha0 / FIXED_ONE

    def advance(self, steps: int = 1) -> "QuasirandomStream":
        if self.cursor + steps >= FIXED_ONE or self.cursor + steps < 0:
            raise DomainError(f"cursor {self.cursor} + {steps} leaves the 64-bit index range")
        return replace(self, cursor=self.cursor + steps)

    def current(self) -> np.ndarray:
        return point(self, self.cursor)


def solve_phi(d: int) -> PhiRoot:
    """Real root > 1 of x**(d+1) = x + 1, by bisection on [1, 2] then Newton polish."""
    if not isinstance(d, (int, np.integer)) or d < 1 or d > MAX_DIMENSION:
        raise DomainError(f"sequence dimension must be in 1..{MAX_DIMENSION}, got {d}")

    def g(x: float) -> float:
        return x ** (d + 1) - x - 1.0

    lo, hi = 1.0, 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid

    x = 0.5 * (lo + hi)
    for _ in range(4):
        dg = (d + 1) * x ** d - 1.0
        step = g(x) / dg
        x -= step
        if abs(step) < 1e-17 * x:
            break

    return PhiRoot(d=int(d), value=x)


def alpha_vector(d: int) -> AlphaVector:
    """Fixed-point alpha for dimension d, computed at 40 significant digits."""
    phi = solve_phi(d)
    with mp.workdps(40):
        root = findroot(lambda x: x ** (d + 1) - x - 1, mpf(phi.value))
        numerators = []
        for k in range(1, d + 1):
            value = root ** (-k)
            frac = value - mp_floor(value)
            numerators.append(int(mp_floor(frac * FIXED_ONE)) & _MASK)
    return AlphaVector(numerators=tuple(numerators))


def to_fixed(alpha0: float) -> int:
    """Exact fixed-point image of a fraction in [0, 1]; 1 wraps to 0."""
    if not 0.0 <= alpha0 <= 1.0:
        raise DomainError(f"alpha0 must lie in [0, 1], got {alpha0}")
    return int(Fraction(alpha0) * FIXED_ONE) & _MASK


def make_stream(d: int, alpha0: float = 0.5) -> QuasirandomStream:
    stream = QuasirandomStream(alpha=alpha_vector(d), alpha0=to_fixed(alpha0))
    logger.debug(f"Built d={d} stream, alpha0={alpha0}, alpha={stream.alpha.as_float()}")
    return stream


def _fixed_to_float(fixed: np.ndarray) -> np.ndarray:
    # Top 53 bits only, so the result is exact and strictly below 1
    return (fixed >> _FLOAT_SHIFT).astype(np.float64) * _FLOAT_SCALE


def point(stream: QuasirandomStream, n: int) -> np.ndarray:
    """Coordinates of point n: (alpha0 + n*alpha) mod 1."""
    if n < 0 or n >= FIXED_ONE:
        raise DomainError(f"index {n} outside the 64-bit range")
    fixed = np.uint64(stream.alpha0) + np.uint64(n) * stream.alpha.as_array()
    return _fixed_to_float(fixed)


def fill_block(stream: QuasirandomStream, start: int, count: int) -> np.ndarray:
    """Rows start..start+count-1 as a (count, d) array."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if start < 0 or start + count > FIXED_ONE:
        raise DomainError(f"block [{start}, {start + count}) overflows the 64-bit index range")

    idx = np.arange(count, dtype=np.uint64) + np.uint64(start)
    fixed = np.uint64(stream.alpha0) + idx[:, None] * stream.alpha.as_array()[None, :]
    return _fixed_to_float(fixed)


def walk(stream: QuasirandomStream, count: int) -> Iterator[np.ndarray]:
    """Yield count points from the cursor on, by repeated fixed-point addition."""
    alpha = stream.alpha.as_array()
    state = np.uint64(stream.alpha0) + np.uint64(stream.cursor) * alpha
    for _ in range(count):
        yield _fixed_to_float(state)
        state = state + alpha
