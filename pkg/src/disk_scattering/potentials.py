"""Piecewise-constant potentials and a direct Schroedinger-integration oracle.

Amplitudes are referenced to the edges of each segment: the right-hand
mover is ``B+ exp(ik(x - b))`` and the left-hand one ``A+ exp(ik(x - a))``.
With that choice a field-free gap of length d has
``M = diag(exp(-ikd), exp(ikd))`` and segment matrices multiply directly.

Sign convention for the barrier: ``kappa = sqrt(2m(V0 - E))/hbar`` is the
decay constant below the barrier top; above it ``kappa_bar =
sqrt(2m(E - V0))/hbar`` is the inner wavenumber.  Both regimes are evaluated
from one expression in ``q2 = 2m(V0 - E)/hbar^2`` that is analytic across
``q2 = 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import (
    DEFAULT_TOL,
    RealTransferMatrix,
    ScatteringAmplitudes,
    TransferMatrix,
    compose,
    from_real_representation,
    transfer_from_amplitudes,
)
from .errors import InvariantError, OracleToleranceError

#: |E - V0| below this fraction of max(E, V0) uses the E = V0 limit formulas.
PARABOLIC_GUARD = 1e-8


@dataclass(frozen=True)
class UnitConvention:
    """hbar and particle mass.  The defaults (hbar = 1, 2m = 1) make k^2 = E."""

    hbar: float = 1.0
    mass: float = 0.5

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise InvariantError("hbar and mass must be positive")

    def wavenumber_squared(self, energy: float) -> float:
        """2 m energy / hbar^2 (signed)."""
        return 2.0 * self.mass * energy / self.hbar**2

    def wavenumber(self, energy: float) -> float:
        return math.sqrt(self.wavenumber_squared(energy))


NATURAL_UNITS = UnitConvention()


@dataclass(frozen=True)
class PotentialSegment:
    height: float
    length: float

    def __post_init__(self):
        if not (math.isfinite(self.height) and math.isfinite(self.length)):
            raise InvariantError("segment height and length must be finite")
        if not self.length > 0:
            raise InvariantError(f"segment length must be positive, got {self.length!r}")


@dataclass(frozen=True)
class PotentialStack:
    """Adjacent segments ordered left to right.  Gaps are explicit zero-height segments."""

    segments: tuple[PotentialSegment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise InvariantError("a potential stack needs at least one segment")

    @property
    def total_length(self) -> float:
        return sum(s.length for s in self.segments)

    def is_mirror_symmetric(self, rtol: float = 1e-12) -> bool:
        return all(
            math.isclose(s.height, m.height, rel_tol=rtol, abs_tol=rtol)
            and math.isclose(s.length, m.length, rel_tol=rtol)
            for s, m in zip(self.segments, reversed(self.segments))
        )

    def sample(self, n: int) -> SampledPotential:
        """Cell averages of V on ``n`` uniform cells spanning the stack.

        A cell cut by a segment edge gets the length-weighted mean of the two
        heights, which keeps the integrated barrier area exact.
        """
        if n < 2:
            raise InvariantError("need at least two cells")
        total = self.total_length
        h = total / n
        cell_edges = np.arange(n + 1) * h
        cell_edges[-1] = total
        seg_edges = np.concatenate([[0.0], np.cumsum([s.length for s in self.segments])])
        seg_edges[-1] = total
        heights = np.array([s.height for s in self.segments])
        # integral of V from 0 to x is piecewise linear in x; difference it per cell
        cumulative = np.concatenate([[0.0], np.cumsum(heights * np.diff(seg_edges))])
        integral = np.interp(cell_edges, seg_edges, cumulative)
        v = np.diff(integral) / np.diff(cell_edges)
        x = cell_edges[:-1] + h / 2
        return SampledPotential(x, v)


@dataclass(frozen=True, eq=False)
class SampledPotential:
    """Potential sampled at the centres of uniform cells.

    Sample ``i`` holds V on ``[x_i - h/2, x_i + h/2]``; the potential is zero
    outside ``[x_0 - h/2, x_{n-1} + h/2]``, whose ends are the reference
    points ``a`` and ``b`` of the transfer matrix.
    """

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)
        if x.ndim != 1 or x.shape != v.shape:
            raise InvariantError("positions and values must be 1-D arrays of equal length")
        if x.size < 2:
            raise InvariantError("need at least two samples")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise InvariantError("samples must be finite")
        dx = np.diff(x)
        if np.any(dx <= 0):
            raise InvariantError("positions must be strictly increasing")
        if np.max(np.abs(dx - dx.mean())) > 1e-6 * dx.mean():
            raise InvariantError("positions must be uniformly spaced")

    @property
    def spacing(self) -> float:
        return float((self.x[-1] - self.x[0]) / (self.x.size - 1))

    @property
    def bounds(self) -> tuple[float, float]:
        h = self.spacing
        return float(self.x[0] - h / 2), float(self.x[-1] + h / 2)

    @classmethod
    def from_function(cls, func, a: float, b: float, n: int) -> SampledPotential:
        h = (b - a) / n
        x = a + (np.arange(n) + 0.5) * h
        return cls(x, np.asarray(func(x), dtype=float))

    @classmethod
    def load(cls, path) -> SampledPotential:
        """Read two whitespace-separated columns (position, V); ``#`` starts a comment."""
        data = np.loadtxt(Path(path), comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise InvariantError(f"{path}: expected two columns, found {data.shape[1]}")
        return cls(data[:, 0], data[:, 1])

    def save(self, path) -> None:
        np.savetxt(
            Path(path),
            np.column_stack([self.x, self.v]),
            header="position V",
            fmt="%.17g",
        )


def _check_energy(energy: float) -> None:
    if not (math.isfinite(energy) and energy > 0):
        raise InvariantError(f"energy must be positive (scattering states only), got {energy!r}")


def _sinh_over(q2: float, length: float) -> tuple[float, float]:
    """(sinh(qL)/q, cosh(qL)) for q = sqrt(q2), continued to q2 < 0 as (sin, cos)."""
    if q2 > 0:
        q = math.sqrt(q2)
        return math.sinh(q * length) / q, math.cosh(q * length)
    if q2 < 0:
        q = math.sqrt(-q2)
        return math.sin(q * length) / q, math.cos(q * length)
    return length, 1.0


def barrier_amplitudes(
    energy: float, seg: PotentialSegment, units: UnitConvention = NATURAL_UNITS
) -> ScatteringAmplitudes:
    """Reflection and transmission amplitudes of a rectangular barrier or well."""
    _check_energy(energy)
    k2 = units.wavenumber_squared(energy)
    k = math.sqrt(k2)
    kl = k * seg.length
    if abs(energy - seg.height) < PARABOLIC_GUARD * max(energy, abs(seg.height)):
        r = 1.0 / (1.0 + 2j / kl)
        t = 1.0 / (1.0 + kl / 2j)
        return ScatteringAmplitudes(r, t, 1e-12)
    q2 = units.wavenumber_squared(seg.height - energy)
    s, c = _sinh_over(q2, seg.length)
    denom = (k2 - q2) * s + 2j * k * c
    return ScatteringAmplitudes((k2 + q2) * s / denom, 2j * k / denom, 1e-12)


def barrier_transfer(
    energy: float, seg: PotentialSegment, units: UnitConvention = NATURAL_UNITS
) -> TransferMatrix:
    return transfer_from_amplitudes(barrier_amplitudes(energy, seg, units))


def free_transfer(
    energy: float, length: float, units: UnitConvention = NATURAL_UNITS
) -> TransferMatrix:
    """Field-free propagation over ``length``: diag(exp(-ikd), exp(ikd))."""
    _check_energy(energy)
    if not length >= 0:
        raise InvariantError(f"gap length must be non-negative, got {length!r}")
    return TransferMatrix(cmath.exp(-1j * units.wavenumber(energy) * length), 0.0)


def segment_transfer(
    energy: float, seg: PotentialSegment, units: UnitConvention = NATURAL_UNITS
) -> TransferMatrix:
    if seg.height == 0:
        return free_transfer(energy, seg.length, units)
    return barrier_transfer(energy, seg, units)


def stack_transfer(
    energy: float, stack: PotentialStack, units: UnitConvention = NATURAL_UNITS
) -> TransferMatrix:
    """Product of segment matrices in spatial order (leftmost segment first)."""
    result = segment_transfer(energy, stack.segments[0], units)
    for seg in stack.segments[1:]:
        result = compose(result, segment_transfer(energy, seg, units))
    return result


def numerical_real_transfer(
    energy: float, pot: SampledPotential, units: UnitConvention = NATURAL_UNITS
) -> RealTransferMatrix:
    """Integrate psi'' = (2m/hbar^2)(V - E) psi from b back to a with classical RK4.

    One RK4 step of width h per cell.  Since V is constant inside a cell the
    step is the linear map ``I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24`` with
    ``A = [[0, 1], [w, 0]]``; applying it to the basis solutions (1, 0) and
    (0, 1) at ``b`` gives the columns of the (psi, psi') transfer matrix.
    """
    _check_energy(energy)
    h = -pot.spacing  # integrating right to left
    w = units.wavenumber_squared(pot.v - energy)
    hw = h * h * w
    # powers of hA = [[0, h], [h w, 0]]: (hA)^2 = hw I, so the series splits
    # into even and odd parts
    even = 1.0 + hw / 2.0 + hw * hw / 24.0
    odd = 1.0 + hw / 6.0
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    # accumulate P_0 P_1 ... P_{n-1}; P_i = [[even, h odd], [h w odd, even]]
    for e_i, o_i, w_i in zip(even[::-1].tolist(), odd[::-1].tolist(), w[::-1].tolist()):
        p12 = h * o_i
        p21 = h * w_i * o_i
        a, b, c, d = (
            e_i * a + p12 * c,
            e_i * b + p12 * d,
            p21 * a + e_i * c,
            p21 * b + e_i * d,
        )
    return RealTransferMatrix(a, b, c, d)


def numerical_transfer(
    energy: float,
    pot: SampledPotential,
    units: UnitConvention = NATURAL_UNITS,
    det_tol: float = 1e-8,
) -> TransferMatrix:
    """Transfer matrix of a sampled potential by direct integration.

    Raises OracleToleranceError when |det - 1| exceeds ``det_tol``, which
    signals a grid too coarse for this energy.
    """
    rm = numerical_real_transfer(energy, pot, units)
    residual = abs(rm.det - 1.0)
    if residual > det_tol:
        raise OracleToleranceError(
            f"integrated det = {rm.det!r} misses 1 by {residual:.3e} > {det_tol:g}; refine the grid",
            residual,
        )
    return from_real_representation(rm, units.wavenumber(energy), tol=max(det_tol, DEFAULT_TOL))


def parse_cell(spec: str) -> PotentialStack:
    """Parse ``"V0:L;V0:L;..."`` into a PotentialStack."""
    segments = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            height, length = (float(s) for s in part.split(":"))
        except ValueError as exc:
            raise InvariantError(f"bad segment {part!r}; expected 'V0:L'") from exc
        segments.append(PotentialSegment(height, length))
    return PotentialStack(tuple(segments))


def stack_from_pairs(pairs: Sequence[tuple[float, float]]) -> PotentialStack:
    return PotentialStack(tuple(PotentialSegment(v, l) for v, l in pairs))
