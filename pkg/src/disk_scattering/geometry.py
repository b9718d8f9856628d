"""Transfer matrices acting on the unit disk.

A state with amplitude ratio ``z = minus/plus`` on the right of a scatterer is
mapped to ``(conj(beta) + conj(alpha) z) / (alpha + beta z)`` on the left.
The disk, its boundary and its exterior are each preserved, and the maps
are the orientation-preserving isometries of the hyperbolic disk.

M and -M give the same map.  Everything here that depends on a sign
(classification, canonical parameters, translation length) first flips M
so that Tr M >= 0.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import TransferMatrix, compose
from .errors import (
    BoundaryPointError,
    DegenerateError,
    InvariantError,
    NotHyperbolicError,
)

#: |(Tr M)^2 - 4| below this times max(1, (Tr M)^2) counts as parabolic.
CLASSIFY_TOL = 1e-9
#: Slack allowed on |z| <= 1 for points on the boundary.
DISK_SLACK = 1e-12
IDENTITY_TOL = 1e-12

DiskPoint = complex


class ActionKind(str, enum.Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"


@dataclass(frozen=True)
class ActionClassification:
    """Kind of disk action with its fixed points and canonical parameter.

    ``fixed_points`` holds one interior point (elliptic), the attracting and
    repelling boundary points in that order (hyperbolic), one boundary point
    (parabolic), or nothing for the identity.  ``parameter`` is theta, xi or
    nu for K_C, A_C and N_C respectively.
    """

    kind: ActionKind
    fixed_points: tuple[complex, ...]
    parameter: float
    trace: float

    @property
    def is_identity(self) -> bool:
        return self.kind is ActionKind.PARABOLIC and not self.fixed_points


@dataclass(frozen=True)
class Geodesic:
    """Oriented hyperbolic line, given by its ideal endpoints ``start`` -> ``end``."""

    start: complex
    end: complex

    def __post_init__(self):
        start, end = complex(self.start), complex(self.end)
        for p in (start, end):
            if abs(abs(p) - 1.0) > 1e-9:
                raise InvariantError(f"geodesic endpoint {p!r} is not on the unit circle")
        if abs(start - end) < 1e-12:
            raise InvariantError("geodesic endpoints must be distinct")
        # snap onto the circle so later formulas see |p| = 1 exactly
        object.__setattr__(self, "start", start / abs(start))
        object.__setattr__(self, "end", end / abs(end))

    @classmethod
    def from_angles(cls, start: float, end: float) -> Geodesic:
        return cls(cmath.exp(1j * start), cmath.exp(1j * end))

    @property
    def angles(self) -> tuple[float, float]:
        return cmath.phase(self.start), cmath.phase(self.end)

    def reversed(self) -> Geodesic:
        return Geodesic(self.end, self.start)

    def endpoint_distance(self, other: Geodesic) -> float:
        """max of the endpoint separations; zero iff the oriented lines coincide."""
        return max(abs(self.start - other.start), abs(self.end - other.end))


def check_disk_point(z, interior: bool = False) -> None:
    mod = np.abs(z)
    if interior:
        if np.any(mod >= 1.0):
            raise BoundaryPointError(f"point(s) not strictly inside the unit disk: |z| max {np.max(mod)!r}")
    elif np.any(mod > 1.0 + DISK_SLACK):
        raise InvariantError(f"point(s) outside the unit disk: |z| max {np.max(mod)!r}")


def mobius(m: TransferMatrix, z):
    """Disk action of ``m``.  Accepts a complex scalar or a numpy array."""
    den = m.alpha + m.beta * z
    if np.any(np.abs(den) < 1e-14 * abs(m.alpha)):
        raise DegenerateError("alpha + beta z vanishes; point is outside the disk")
    return (m.beta.conjugate() + m.alpha.conjugate() * z) / den


def normalized(m: TransferMatrix) -> TransferMatrix:
    """M or -M, whichever has non-negative trace."""
    return m.negated() if m.alpha.real < 0 else m


def kind_from_trace(tr: float) -> ActionKind:
    disc = tr * tr - 4.0
    if abs(disc) < CLASSIFY_TOL * max(1.0, tr * tr):
        return ActionKind.PARABOLIC
    return ActionKind.HYPERBOLIC if disc > 0 else ActionKind.ELLIPTIC


def action_kind(m: TransferMatrix) -> ActionKind:
    return kind_from_trace(m.trace)


def fixed_points(m: TransferMatrix) -> tuple[complex, complex]:
    """Both roots of beta z^2 + 2i Im(alpha) z - conj(beta) = 0.

    For Tr M >= 0 the first root takes the + sign on the square root; when
    the action is hyperbolic it is the attracting one.  Elliptic matrices get
    the interior root first.  Requires beta != 0.
    """
    m = normalized(m)
    a, b = m.alpha, m.beta
    if b == 0:
        raise DegenerateError("beta = 0: fixed points are 0 and infinity")
    tr = 2.0 * a.real
    disc = tr * tr - 4.0
    lin = -2j * a.imag
    if kind_from_trace(tr) is ActionKind.PARABOLIC:
        z = lin / (2.0 * b)
        z /= abs(z)
        return z, z
    if disc > 0:
        sq = math.sqrt(disc)
        return (lin + sq) / (2.0 * b), (lin - sq) / (2.0 * b)
    # elliptic: sqrt is imaginary and parallel to lin, so pick the
    # non-cancelling sign for the big root and get the small one from the
    # product of roots, -conj(b)/b
    sq = 1j * math.sqrt(-disc)
    big = lin + sq if a.imag <= 0 else lin - sq
    z_big = big / (2.0 * b)
    z_small = -b.conjugate() / (b * z_big)
    return z_small, z_big


def eigenvalue_at(m: TransferMatrix, z: complex) -> complex:
    """alpha + beta z: the eigenvalue of M on the eigenvector (1, z) at a fixed point."""
    return m.alpha + m.beta * z


def classify(m: TransferMatrix) -> ActionClassification:
    m = normalized(m)
    a, b = m.alpha, m.beta
    tr = m.trace
    kind = kind_from_trace(tr)
    if kind is ActionKind.PARABOLIC and abs(b) <= IDENTITY_TOL * abs(a):
        # rounding leftovers of a product that should be +-I
        return ActionClassification(kind, (), 0.0, tr)
    if b == 0:
        if kind is ActionKind.HYPERBOLIC:  # |alpha| = 1 forbids this
            raise InvariantError("diagonal SU(1,1) matrix cannot be hyperbolic")
        if kind is ActionKind.PARABOLIC:
            return ActionClassification(kind, (), 0.0, tr)
        return ActionClassification(kind, (0j,), 2.0 * cmath.phase(a), tr)
    zp, zm = fixed_points(m)
    if kind is ActionKind.ELLIPTIC:
        theta = 2.0 * cmath.phase(eigenvalue_at(m, zp))
        return ActionClassification(kind, (zp,), theta, tr)
    if kind is ActionKind.HYPERBOLIC:
        xi = 2.0 * math.acosh(tr / 2.0)
        # boundary points; det slightly off 1 moves the roots off the circle
        return ActionClassification(kind, (zp / abs(zp), zm / abs(zm)), xi, tr)
    # parabolic: conjugating by a rotation about 0 takes M to N_C(nu) with
    # nu = -2 Im(alpha)
    return ActionClassification(kind, (zp,), -2.0 * a.imag, tr)


def canonical_form(kind: ActionKind | str, parameter: float) -> TransferMatrix:
    """K_C(theta), A_C(xi) or N_C(nu)."""
    kind = ActionKind(kind)
    if kind is ActionKind.ELLIPTIC:
        return TransferMatrix(cmath.exp(0.5j * parameter), 0.0)
    if kind is ActionKind.HYPERBOLIC:
        return TransferMatrix(math.cosh(parameter / 2), 1j * math.sinh(parameter / 2))
    return TransferMatrix(1.0 - 0.5j * parameter, 0.5 * parameter)


def conjugate(c: TransferMatrix, m: TransferMatrix) -> TransferMatrix:
    """C M C^-1."""
    return compose(compose(c, m), c.inverse())


def boost_to_origin(w: complex) -> TransferMatrix:
    """The SU(1,1) element with real positive alpha whose disk map sends ``w`` to 0."""
    check_disk_point(w, interior=True)
    a = 1.0 / math.sqrt(1.0 - abs(w) ** 2)
    return TransferMatrix(a, -a * w.conjugate())


def rotation(phi: float) -> TransferMatrix:
    """K_C(phi): z -> z exp(-i phi)."""
    return TransferMatrix(cmath.exp(0.5j * phi), 0.0)


def geodesic_foot(g: Geodesic) -> complex:
    """Point of ``g`` closest (hyperbolically and Euclidean) to the origin."""
    s = g.start + g.end
    if abs(s) < 1e-12:
        return 0j
    # half the angle subtended by the endpoints at 0
    cos_half = abs(s) / 2.0
    sin_half = abs(g.start - g.end) / 2.0
    rho = cos_half / (1.0 + sin_half)
    return rho * s / abs(s)


def axis_conjugator(g: Geodesic) -> TransferMatrix:
    """C whose disk map sends ``g.end`` to -i, ``g.start`` to +i and the foot of g to 0.

    Under C the oriented line g becomes the diameter traversed from +i to
    -i, the direction in which A_C(xi) translates for xi > 0.
    """
    b = boost_to_origin(geodesic_foot(g))
    end = mobius(b, g.end)
    # rotation z -> z exp(-i phi) taking `end` to -i
    phi = cmath.phase(end) + math.pi / 2
    return compose(rotation(phi), b)


def reduce_to_canonical(m: TransferMatrix) -> tuple[TransferMatrix, ActionClassification]:
    """Find C with C M C^-1 equal (up to sign) to the canonical form of M's class.

    Gauge: elliptic -- C is the boost sending the fixed point to 0;
    hyperbolic -- C = rotation * boost, sending the attracting fixed point
    to -i, the repelling one to +i and the axis point nearest 0 to 0;
    parabolic -- C is the rotation about 0 taking the fixed point to +i.
    The identity gives C = I.
    """
    cls = classify(m)
    if cls.is_identity:
        return TransferMatrix.identity(), cls
    if cls.kind is ActionKind.ELLIPTIC:
        return boost_to_origin(cls.fixed_points[0]), cls
    if cls.kind is ActionKind.HYPERBOLIC:
        attracting, repelling = cls.fixed_points
        return axis_conjugator(Geodesic(repelling, attracting)), cls
    # z -> z exp(-i phi) sends the fixed point to +i
    phi = cmath.phase(cls.fixed_points[0]) - math.pi / 2
    return rotation(phi), cls


def one_parameter_family(m: TransferMatrix):
    """Return ``f(s)`` giving the member of m's one-parameter subgroup at parameter s.

    f(classify(m).parameter) equals m up to sign; f(0) is the identity.
    """
    c, cls = reduce_to_canonical(m)
    c_inv = c.inverse()

    def member(s: float) -> TransferMatrix:
        return conjugate(c_inv, canonical_form(cls.kind, s))

    return member


def orbit(m: TransferMatrix, z0: complex, samples: int) -> list[complex]:
    """Images of ``z0`` as the family parameter sweeps [0, parameter of m]."""
    if samples < 2:
        raise InvariantError("an orbit needs at least 2 samples")
    check_disk_point(z0)
    family = one_parameter_family(m)
    param = classify(m).parameter
    return [complex(mobius(family(s), z0)) for s in np.linspace(0.0, param, samples)]


def hyperbolic_distance(z1, z2):
    """Poincare-disk distance, 2 artanh(|z1 - z2| / |1 - conj(z1) z2|)."""
    check_disk_point(z1, interior=True)
    check_disk_point(z2, interior=True)
    ratio = np.abs(z1 - z2) / np.abs(1.0 - np.conj(z1) * z2)
    return 2.0 * np.arctanh(ratio)


def translation_length(m: TransferMatrix) -> float:
    """Distance by which a hyperbolic m moves points on its axis."""
    tr = normalized(m).trace
    if kind_from_trace(tr) is not ActionKind.HYPERBOLIC:
        raise NotHyperbolicError(f"translation length needs (Tr M)^2 > 4, got Tr M = {tr!r}")
    return 2.0 * math.log((tr + math.sqrt(tr * tr - 4.0)) / 2.0)


def interior_angle(vertex: complex, p: complex, q: complex) -> float:
    """Angle in [0, pi] at ``vertex`` between the geodesics to ``p`` and ``q``."""
    b = boost_to_origin(vertex)
    # geodesics through 0 are diameters, and the map is conformal
    u, v = mobius(b, p), mobius(b, q)
    return abs(cmath.phase(v / u))
