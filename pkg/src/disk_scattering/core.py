"""SU(1,1) transfer matrices for lossless one-dimensional scatterers.

A transfer matrix relates the right/left mover amplitudes on the two sides of
a scatterer,

    (A+, A-)^T = M (B+, B-)^T,      M = [[alpha, beta], [conj(beta), conj(alpha)]],

with |alpha|^2 - |beta|^2 = 1.  Only ``alpha`` and ``beta`` are stored, so the
SU(1,1) shape cannot be broken by construction; the determinant condition is
checked with a relative tolerance that scales with |alpha|^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantError, PerfectReflectionError

#: Relative tolerance for construction-time determinant / flux checks.
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class TransferMatrix:
    """Element of SU(1,1) given by its first row ``(alpha, beta)``.

    ``tol`` is the relative tolerance the determinant was checked against.
    Products carry the sum of their factors' tolerances.
    """

    alpha: complex
    beta: complex
    tol: float = field(default=DEFAULT_TOL, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if not (cmath.isfinite(self.alpha) and cmath.isfinite(self.beta)):
            raise InvariantError(f"non-finite matrix entries {self.alpha!r}, {self.beta!r}")
        scale = max(1.0, abs(self.alpha) ** 2)
        if abs(self.det - 1.0) > self.tol * scale:
            raise InvariantError(
                f"|alpha|^2 - |beta|^2 = {self.det!r} violates det M = 1 "
                f"(relative tolerance {self.tol:g})"
            )

    @classmethod
    def identity(cls) -> TransferMatrix:
        return cls(1.0, 0.0)

    @classmethod
    def from_array(cls, m, tol: float = DEFAULT_TOL) -> TransferMatrix:
        """Build from a full 2x2 array, checking that it has the SU(1,1) shape."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise InvariantError(f"expected a 2x2 matrix, got shape {m.shape}")
        scale = max(1.0, abs(m[0, 0]))
        if abs(m[1, 1] - m[0, 0].conjugate()) > tol * scale or abs(
            m[1, 0] - m[0, 1].conjugate()
        ) > tol * scale:
            raise InvariantError("matrix is not of the form [[a, b], [b*, a*]]")
        return cls(m[0, 0], m[0, 1], tol)

    @property
    def matrix(self) -> np.ndarray:
        """The full 2x2 complex matrix."""
        a, b = self.alpha, self.beta
        return np.array([[a, b], [b.conjugate(), a.conjugate()]])

    @property
    def det(self) -> float:
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2

    @property
    def trace(self) -> float:
        return 2.0 * self.alpha.real

    @property
    def det_residual(self) -> float:
        return abs(self.det - 1.0)

    def inverse(self) -> TransferMatrix:
        # inverse of [[a, b], [b*, a*]] with unit determinant
        return TransferMatrix(self.alpha.conjugate(), -self.beta, self.tol)

    def negated(self) -> TransferMatrix:
        """-M, which induces the same disk map as M."""
        return TransferMatrix(-self.alpha, -self.beta, self.tol)

    def apply(self, right: WaveAmplitudePair) -> WaveAmplitudePair:
        """Amplitudes on the left side given those on the right side."""
        a, b = self.alpha, self.beta
        return WaveAmplitudePair(
            a * right.plus + b * right.minus,
            b.conjugate() * right.plus + a.conjugate() * right.minus,
        )

    def __matmul__(self, other: TransferMatrix) -> TransferMatrix:
        if not isinstance(other, TransferMatrix):
            return NotImplemented
        return compose(self, other)


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Reflection and transmission amplitudes for a wave incident from the left."""

    r: complex
    t: complex
    tol: float = field(default=DEFAULT_TOL, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "r", complex(self.r))
        object.__setattr__(self, "t", complex(self.t))
        if self.t == 0:
            raise InvariantError("t = 0: a perfect mirror has no transfer matrix")
        if self.flux_residual > self.tol:
            raise InvariantError(
                f"|r|^2 + |t|^2 = {abs(self.r) ** 2 + abs(self.t) ** 2!r} "
                f"violates flux conservation (tolerance {self.tol:g})"
            )

    @property
    def flux_residual(self) -> float:
        return abs(abs(self.r) ** 2 + abs(self.t) ** 2 - 1.0)

    @property
    def r_prime(self) -> complex:
        """Reflection amplitude for incidence from the right."""
        return -self.r.conjugate() * self.t / self.t.conjugate()

    @property
    def t_prime(self) -> complex:
        return self.t


@dataclass(frozen=True)
class RealTransferMatrix:
    """Transfer matrix in the (psi, psi') basis; an element of SL(2, R)."""

    a: float
    b: float
    c: float
    d: float

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])


@dataclass(frozen=True)
class WaveAmplitudePair:
    """Right-mover (``plus``) and left-mover (``minus``) coefficients on one side."""

    plus: complex
    minus: complex

    @property
    def ratio(self) -> complex:
        """minus / plus, the point that represents this state in the unit disk."""
        return self.minus / self.plus


def transfer_from_amplitudes(amps: ScatteringAmplitudes) -> TransferMatrix:
    """alpha = 1/t, beta = r*/t*."""
    t = amps.t
    return TransferMatrix(1.0 / t, amps.r.conjugate() / t.conjugate(), max(amps.tol, DEFAULT_TOL))


def amplitudes_from_transfer(m: TransferMatrix) -> ScatteringAmplitudes:
    """t = 1/alpha, r = beta*/alpha."""
    return ScatteringAmplitudes(
        m.beta.conjugate() / m.alpha, 1.0 / m.alpha, max(m.tol, DEFAULT_TOL)
    )


def compose(m1: TransferMatrix, m2: TransferMatrix) -> TransferMatrix:
    """Matrix product m1 @ m2: system 1 on the left, system 2 on the right."""
    a1, b1, a2, b2 = m1.alpha, m1.beta, m2.alpha, m2.beta
    return TransferMatrix(
        a1 * a2 + b1 * b2.conjugate(),
        a1 * b2 + b1 * a2.conjugate(),
        m1.tol + m2.tol,
    )


def composed_amplitudes(
    a1: ScatteringAmplitudes, a2: ScatteringAmplitudes
) -> ScatteringAmplitudes:
    """Amplitudes of system 1 followed (to the right) by system 2.

    Uses the multiple-reflection form directly instead of the matrix
    product.  Raises PerfectReflectionError if the denominator vanishes.
    """
    phase = cmath.exp(2j * cmath.phase(a1.t))
    denom = 1.0 + a1.r.conjugate() * a2.r * phase
    if abs(denom) < 1e-300 or abs(denom) < 1e-14 * (1.0 + abs(a1.r) * abs(a2.r)):
        raise PerfectReflectionError("1 + r1* r2 exp(2i arg t1) vanishes")
    return ScatteringAmplitudes(
        (a1.r + a2.r * phase) / denom,
        a1.t * a2.t / denom,
        a1.tol + a2.tol,
    )


def to_real_representation(m: TransferMatrix, k: float) -> RealTransferMatrix:
    """Conjugate by U = [[1, 1], [ik, -ik]] into the (psi, psi') basis."""
    if not k > 0:
        raise InvariantError(f"wavenumber must be positive, got {k!r}")
    a, b = m.alpha, m.beta
    return RealTransferMatrix(
        a.real + b.real,
        (a.imag - b.imag) / k,
        -k * (a.imag + b.imag),
        a.real - b.real,
    )


def from_real_representation(
    rm: RealTransferMatrix, k: float, tol: float = DEFAULT_TOL
) -> TransferMatrix:
    if not k > 0:
        raise InvariantError(f"wavenumber must be positive, got {k!r}")
    scale = max(1.0, abs(rm.a * rm.d), abs(rm.b * rm.c))
    if abs(rm.det - 1.0) > tol * scale:
        raise InvariantError(f"det = {rm.det!r} is not 1 (relative tolerance {tol:g})")
    im_sum = -rm.c / k  # Im alpha + Im beta
    im_diff = k * rm.b  # Im alpha - Im beta
    alpha = complex(0.5 * (rm.a + rm.d), 0.5 * (im_sum + im_diff))
    beta = complex(0.5 * (rm.a - rm.d), 0.5 * (im_sum - im_diff))
    return TransferMatrix(alpha, beta, tol)


def chebyshev_u(n: int, x: float) -> tuple[float, float]:
    """(U_{n-1}(x), U_{n-2}(x)) by the three-term recurrence; U_{-1} = 0."""
    u_prev, u = 0.0, 1.0  # U_{-1}, U_0
    for _ in range(n - 1):
        u_prev, u = u, 2.0 * x * u - u_prev
    return u, u_prev


def transfer_power(m: TransferMatrix, n: int) -> TransferMatrix:
    """M^n via Cayley-Hamilton: M^n = U_{n-1}(x) M - U_{n-2}(x) I, x = Tr M / 2.

    Exact at the parabolic points x = +-1 where diagonalisation fails.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvariantError(f"power must be a positive integer, got {n!r}")
    u1, u2 = chebyshev_u(int(n), m.alpha.real)
    return TransferMatrix(u1 * m.alpha - u2, u1 * m.beta, m.tol * n)


def random_transfer(rng: np.random.Generator, scale: float = 1.5) -> TransferMatrix:
    """A random SU(1,1) element with |beta| drawn from an exponential of mean ``scale``."""
    mod_b = rng.exponential(scale)
    phase_a, phase_b = rng.uniform(-math.pi, math.pi, size=2)
    mod_a = math.sqrt(1.0 + mod_b * mod_b)
    return TransferMatrix(cmath.rect(mod_a, phase_a), cmath.rect(mod_b, phase_b))
