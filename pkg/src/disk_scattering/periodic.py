"""Finite periodic structures: N copies of one cell.

Starting from ``z0 = 0`` (nothing incident from the right), the point
``z_N = Phi[M^N, 0]`` is the reflection amplitude of the N-cell structure.
Hyperbolic and parabolic cells drive it to the unit circle, exponentially
and as O(N^-2) respectively; elliptic cells keep it on a closed orbit.

The reflectance formulas use ``cosh(xi) = Re alpha`` for the cell, which is
half the canonical A_C parameter of the same matrix.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import TransferMatrix, chebyshev_u
from .errors import InvariantError
from .geometry import (
    ActionClassification,
    ActionKind,
    canonical_form,
    classify,
    eigenvalue_at,
    kind_from_trace,
    mobius,
    normalized,
    reduce_to_canonical,
)
from .potentials import NATURAL_UNITS, PotentialStack, UnitConvention, stack_transfer


class BandStatus(str, enum.Enum):
    ALLOWED = "allowed"
    FORBIDDEN = "forbidden"
    EDGE = "edge"


@dataclass(frozen=True)
class PeriodicResult:
    n: int
    z: complex
    reflectance: float
    kind: ActionClassification


@dataclass(frozen=True)
class BandPoint:
    energy: float
    half_trace: float
    status: BandStatus


def _check_n(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvariantError(f"number of periods must be a positive integer, got {n!r}")


def iterate_disk(m: TransferMatrix, n: int, z0: complex = 0j) -> list[complex]:
    """[z_1, ..., z_n] with z_j = Phi[M, z_{j-1}]."""
    _check_n(n)
    points = []
    z = complex(z0)
    for _ in range(n):
        z = complex(mobius(m, z))
        points.append(z)
    return points


def attracting_ratio(m: TransferMatrix, cls: ActionClassification | None = None) -> complex:
    """chi = (alpha + beta z_f-) / (alpha + beta z_f+), |chi| < 1 for a hyperbolic cell."""
    cls = cls or classify(m)
    m = normalized(m)
    zp, zm = cls.fixed_points
    return eigenvalue_at(m, zm) / eigenvalue_at(m, zp)


def closed_form_zN(m: TransferMatrix, n: int) -> complex:
    """z_N from 0 without iterating.

    Hyperbolic and parabolic cells use the fixed-point closed forms.
    Elliptic cells go through the canonical rotation: with C M C^-1 =
    K_C(theta), z_N = C^-1 applied to (C 0) rotated by N theta.
    """
    _check_n(n)
    cls = classify(m)
    if cls.is_identity:
        return 0j
    if cls.kind is ActionKind.HYPERBOLIC:
        zp, zm = cls.fixed_points
        chi = attracting_ratio(m, cls)
        if abs(chi) > 1.0:
            zp, zm, chi = zm, zp, 1.0 / chi
        chi_n = chi**n
        return (1.0 - chi_n) / (1.0 - chi_n * (zp / zm)) * zp
    if cls.kind is ActionKind.PARABOLIC:
        b = normalized(m).beta
        zf = cls.fixed_points[0]
        nbz = n * b * zf
        return nbz * zf / (nbz - 1.0)
    c, _ = reduce_to_canonical(m)
    rotated = mobius(canonical_form(ActionKind.ELLIPTIC, n * cls.parameter), mobius(c, 0j))
    return complex(mobius(c.inverse(), rotated))


def _sinh_ratio(xi: float, n: int) -> float:
    """sinh(xi) / sinh(n xi), safe for large n xi."""
    return math.exp(-(n - 1) * xi) * math.expm1(-2.0 * xi) / math.expm1(-2.0 * n * xi)


def _reflectance_parts(m: TransferMatrix, n: int) -> tuple[float, float]:
    """(|beta|^2, g^2) with |z_N|^2 = |beta|^2 / (|beta|^2 + g^2)."""
    _check_n(n)
    cls = classify(m)
    b2 = abs(m.beta) ** 2
    if cls.kind is ActionKind.HYPERBOLIC:
        xi = math.acosh(abs(m.alpha.real))
        return b2, _sinh_ratio(xi, n) ** 2
    if cls.kind is ActionKind.PARABOLIC:
        return b2, 1.0 / (n * n)
    raise InvariantError("closed-form reflectance needs a hyperbolic or parabolic cell")


def reflectance_N(m: TransferMatrix, n: int) -> float:
    """|z_N|^2 of a hyperbolic or parabolic cell from the closed formulas."""
    b2, g2 = _reflectance_parts(m, n)
    return b2 / (b2 + g2)


def transmittance_N(m: TransferMatrix, n: int) -> float:
    """1 - |z_N|^2, computed without cancellation for large N."""
    b2, g2 = _reflectance_parts(m, n)
    return g2 / (b2 + g2)


def reflectance_any(m: TransferMatrix, n: int) -> float:
    """|z_N|^2 for any cell, from the Chebyshev form of M^N."""
    _check_n(n)
    u, _ = chebyshev_u(n, m.alpha.real)
    bn2 = (u * abs(m.beta)) ** 2
    return bn2 / (1.0 + bn2)


def periodic_series(
    m: TransferMatrix, n_max: int, closed_form: bool = True
) -> list[PeriodicResult]:
    """PeriodicResult for N = 1..n_max by closed form or by iteration."""
    _check_n(n_max)
    cls = classify(m)
    if closed_form:
        zs = [closed_form_zN(m, n) for n in range(1, n_max + 1)]
    else:
        zs = iterate_disk(m, n_max)
    return [PeriodicResult(n, z, abs(z) ** 2, cls) for n, z in enumerate(zs, start=1)]


def _band_status(half_trace: float) -> BandStatus:
    tr = 2.0 * half_trace
    kind = kind_from_trace(tr)
    if kind is ActionKind.PARABOLIC:
        return BandStatus.EDGE
    return BandStatus.FORBIDDEN if kind is ActionKind.HYPERBOLIC else BandStatus.ALLOWED


def cell_half_trace(energy: float, cell: PotentialStack, units: UnitConvention) -> float:
    return stack_transfer(energy, cell, units).alpha.real


def _evaluate(args) -> float:
    energy, cell, units = args
    return cell_half_trace(energy, cell, units)


def _bisect_edge(
    lo: float, hi: float, f_lo: float, cell: PotentialStack, units: UnitConvention
) -> float:
    """Root of |half_trace| - 1 in [lo, hi], refined to 1e-8 max(1, E)."""
    while hi - lo > 1e-8 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        f_mid = abs(cell_half_trace(mid, cell, units)) - 1.0
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def resolve_workers(workers: int | str | None) -> int:
    if workers in (None, "auto"):
        return os.cpu_count() or 1
    workers = int(workers)
    if workers < 1:
        raise InvariantError("worker count must be at least 1")
    return workers


def band_scan(
    cell: PotentialStack,
    energies: Sequence[float],
    units: UnitConvention = NATURAL_UNITS,
    workers: int | str | None = 1,
    refine_edges: bool = True,
) -> list[BandPoint]:
    """Band status of the unit cell at each energy, plus refined band edges.

    Where the status flips between allowed and forbidden across neighbouring
    samples, an extra ``edge`` point is inserted at the bisected crossing.
    Results are in energy order whatever the worker count.
    """
    energies = [float(e) for e in energies]
    if not energies:
        return []
    if any(e <= 0 for e in energies):
        raise InvariantError("scan energies must be positive")
    if any(b <= a for a, b in zip(energies, energies[1:])):
        raise InvariantError("scan energies must be strictly increasing")
    n_workers = min(resolve_workers(workers), len(energies))
    jobs = [(e, cell, units) for e in energies]
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            half_traces = list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * n_workers))))
    else:
        half_traces = [_evaluate(j) for j in jobs]

    points = [BandPoint(e, h, _band_status(h)) for e, h in zip(energies, half_traces)]
    if not refine_edges:
        return points
    out: list[BandPoint] = [points[0]]
    for prev, cur in zip(points, points[1:]):
        statuses = {prev.status, cur.status}
        if statuses == {BandStatus.ALLOWED, BandStatus.FORBIDDEN}:
            e = _bisect_edge(prev.energy, cur.energy, abs(prev.half_trace) - 1.0, cell, units)
            out.append(BandPoint(e, cell_half_trace(e, cell, units), BandStatus.EDGE))
        out.append(cur)
    return out


def band_edges(points: Sequence[BandPoint]) -> list[float]:
    return [p.energy for p in points if p.status is BandStatus.EDGE]

