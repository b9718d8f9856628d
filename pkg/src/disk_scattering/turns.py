"""Hyperbolic turns: sliding oriented segments that stand for translations.

A hyperbolic translation by ``zeta`` along a geodesic is represented by an
oriented segment of length ``zeta/2`` on that geodesic, free to slide along
it.  Equivalently it is sqrt(M).  Two turns whose axes meet compose
head-to-tail: slide them until the head of the first-acting turn sits on
the tail of the second, then the free tail and head span the resultant.

Ordering follows the disk action: in ``compose_turns(t1, t2)`` the
translation of ``t2`` acts first, matching ``compose(M1, M2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TransferMatrix, compose
from .errors import InvariantError, NotHyperbolicError
from .geometry import (
    ActionClassification,
    ActionKind,
    Geodesic,
    axis_conjugator,
    canonical_form,
    check_disk_point,
    classify,
    conjugate,
    hyperbolic_distance,
    mobius,
    normalized,
    translation_length,
)


@dataclass(frozen=True)
class HyperbolicTurn:
    """Oriented axis (tail end -> head end) and the turn length zeta/2."""

    axis: Geodesic
    half_length: float

    def __post_init__(self):
        if not (math.isfinite(self.half_length) and self.half_length > 0):
            raise InvariantError(f"turn half-length must be positive, got {self.half_length!r}")

    @property
    def translation_length(self) -> float:
        return 2.0 * self.half_length


def sqrt_transfer(m: TransferMatrix) -> TransferMatrix:
    """Square root of a hyperbolic transfer matrix with the same fixed points.

    ``(M + s I) / sqrt(Tr M + 2 s)`` with ``s = sqrt(det M)``, after flipping
    M to Tr M > 2.  Using the computed det rather than 1 keeps the square
    exact to rounding even when the input carries det drift.
    """
    m = normalized(m)
    if classify(m).kind is not ActionKind.HYPERBOLIC:
        raise NotHyperbolicError(f"square root needs a hyperbolic matrix, Tr M = {m.trace!r}")
    s = math.sqrt(m.det)
    scale = 1.0 / math.sqrt(2.0 * (m.alpha.real + s))
    return TransferMatrix((m.alpha + s) * scale, m.beta * scale, m.tol)


def turn_from_transfer(m: TransferMatrix) -> HyperbolicTurn:
    cls = classify(m)
    if cls.kind is not ActionKind.HYPERBOLIC:
        raise NotHyperbolicError(f"only hyperbolic matrices have turns, got {cls.kind.value}")
    attracting, repelling = cls.fixed_points
    return HyperbolicTurn(Geodesic(repelling, attracting), cls.parameter / 2.0)


def transfer_from_turn(turn: HyperbolicTurn) -> TransferMatrix:
    c = axis_conjugator(turn.axis)
    return conjugate(c.inverse(), canonical_form(ActionKind.HYPERBOLIC, turn.translation_length))


def turn_matrix(turn: HyperbolicTurn) -> TransferMatrix:
    """sqrt of the translation, i.e. the matrix that moves axis points by the turn length."""
    c = axis_conjugator(turn.axis)
    return conjugate(c.inverse(), canonical_form(ActionKind.HYPERBOLIC, turn.half_length))


# --- reflections and point geometry ----------------------------------------


def _orthogonal_circle(g: Geodesic) -> tuple[complex, float] | None:
    """Centre and radius of the circle carrying g, or None for a diameter."""
    s = g.start + g.end
    if abs(s) < 1e-12:
        return None
    cos_half = abs(s) / 2.0
    centre = s / (2.0 * cos_half * cos_half)
    return centre, math.sqrt(max(0.0, abs(centre) ** 2 - 1.0))


def reflect_in_geodesic(z, g: Geodesic):
    """Mirror image of ``z`` in the hyperbolic line ``g`` (anti-conformal involution).

    Inversion in the Euclidean circle through g's endpoints orthogonal to
    the unit circle; Euclidean reflection when g is a diameter.
    """
    check_disk_point(z, interior=True)
    circ = _orthogonal_circle(g)
    if circ is None:
        u = g.start
        return u * u * np.conj(z)
    centre, radius = circ
    return centre + radius * radius / np.conj(z - centre)


def point_on_axis(g: Geodesic, s: float) -> complex:
    """Point at signed distance ``s`` along g from g's foot (the point nearest 0)."""
    c = axis_conjugator(g)
    return complex(mobius(c.inverse(), -1j * math.tanh(s / 2.0)))


def axis_coordinate(g: Geodesic, z: complex) -> float:
    """Signed position of a point of g along g, inverse of ``point_on_axis``."""
    w = mobius(axis_conjugator(g), z)
    return 2.0 * math.atanh(-w.imag)


def perpendicular_at(g: Geodesic, s: float) -> Geodesic:
    """Line orthogonal to g through ``point_on_axis(g, s)``."""
    c_inv = axis_conjugator(g).inverse()
    # in the canonical frame g is the imaginary diameter; its perpendicular
    # at the origin is the real diameter, carried along by A_C(s)
    shift = canonical_form(ActionKind.HYPERBOLIC, s)
    ends = [complex(mobius(c_inv, mobius(shift, e))) for e in (1.0 + 0j, -1.0 + 0j)]
    return Geodesic(*ends)


def distance_to_geodesic(z, g: Geodesic):
    """Hyperbolic distance from z to the line g.

    Conjugates g to the imaginary diameter, where
    sinh d = 2 |Re w| / (1 - |w|^2).
    """
    check_disk_point(z, interior=True)
    w = mobius(axis_conjugator(g), z)
    return np.arcsinh(2.0 * np.abs(np.real(w)) / (1.0 - np.abs(w) ** 2))


def two_reflection_map(g: Geodesic, length: float, offset: float = 0.0):
    """Return f(z) = reflection in Gamma2 of the reflection in Gamma1.

    Gamma1 and Gamma2 are perpendicular to g at positions ``offset`` and
    ``offset + length/2``; f is the translation by ``length`` along g.
    """
    first = perpendicular_at(g, offset)
    second = perpendicular_at(g, offset + length / 2.0)

    def apply(z):
        return reflect_in_geodesic(reflect_in_geodesic(z, first), second)

    return apply


def _to_klein(z: complex) -> complex:
    return 2.0 * z / (1.0 + abs(z) ** 2)


def _from_klein(k: complex) -> complex:
    return k / (1.0 + math.sqrt(max(0.0, 1.0 - abs(k) ** 2)))


def geodesic_intersection(g1: Geodesic, g2: Geodesic) -> complex | None:
    """Common point of two lines, or None when they do not meet inside the disk.

    In the Klein model lines are straight chords with the same endpoints.
    """
    p, d1 = g1.start, g1.end - g1.start
    q, d2 = g2.start, g2.end - g2.start
    cross = (d1.conjugate() * d2).imag
    if abs(cross) < 1e-14:
        return None
    s = ((q - p).conjugate() * d2).imag / cross
    k = p + s * d1
    if abs(k) >= 1.0 - 1e-15:
        return None
    return _from_klein(k)


def geodesic_through(z1: complex, z2: complex) -> Geodesic:
    """The line through two interior points, oriented from z1 towards z2."""
    check_disk_point(np.array([z1, z2]), interior=True)
    k1, k2 = _to_klein(z1), _to_klein(z2)
    d = k2 - k1
    if abs(d) < 1e-15:
        raise InvariantError("points coincide; the line through them is not unique")
    # solve |k1 + s d| = 1 for the two roots s- < 0 < s+
    a = abs(d) ** 2
    b = 2.0 * (k1.conjugate() * d).real
    c = abs(k1) ** 2 - 1.0
    root = math.sqrt(b * b - 4.0 * a * c)
    s_minus = (-b - root) / (2.0 * a)
    s_plus = (-b + root) / (2.0 * a)
    return Geodesic(k1 + s_minus * d, k1 + s_plus * d)


# --- composition ------------------------------------------------------------


def compose_turns(
    t1: HyperbolicTurn, t2: HyperbolicTurn
) -> HyperbolicTurn | ActionClassification:
    """Turn of the product M1 M2 (t2 acts first).

    When the product is not a translation the classification of the product
    is returned instead.
    """
    product = compose(transfer_from_turn(t1), transfer_from_turn(t2))
    cls = classify(product)
    if cls.kind is not ActionKind.HYPERBOLIC:
        return cls
    return turn_from_transfer(product)


def head_to_tail(t1: HyperbolicTurn, t2: HyperbolicTurn) -> HyperbolicTurn | None:
    """Geometric head-to-tail sum of two turns with intersecting axes.

    ``t2`` is slid so that its head sits on the intersection point, ``t1`` so
    that its tail does; the resultant runs from t2's tail to t1's head.
    Returns None when the axes do not meet (the construction does not
    apply) and raises when the resultant degenerates to a point.
    """
    meet = geodesic_intersection(t1.axis, t2.axis)
    if meet is None:
        return None
    s2 = axis_coordinate(t2.axis, meet)
    s1 = axis_coordinate(t1.axis, meet)
    tail = point_on_axis(t2.axis, s2 - t2.half_length)
    head = point_on_axis(t1.axis, s1 + t1.half_length)
    length = float(hyperbolic_distance(tail, head))
    if length < 1e-12:
        raise InvariantError("resultant turn has zero length (the product is the identity)")
    return HyperbolicTurn(geodesic_through(tail, head), length)


def hyperbolic_law_of_cosines(s1: float, s2: float, angle: float) -> float:
    """Third side from cosh z12 = cosh s1 cosh s2 + sinh s1 sinh s2 cos(angle).

    ``angle`` is the angle between the two sides taken head to tail (the
    exterior angle of the triangle), so angle = 0 means collinear and the
    lengths add.  For the interior angle C use ``pi - C``.
    """
    if s1 < 0 or s2 < 0:
        raise InvariantError("side lengths must be non-negative")
    if not 0.0 <= angle <= math.pi:
        raise InvariantError(f"angle must lie in [0, pi], got {angle!r}")
    # cosh(s1 + s2) - sinh s1 sinh s2 (1 - cos angle), written to avoid the
    # cancellation of acosh near 1
    ch = math.cosh(s1 + s2) - math.sinh(s1) * math.sinh(s2) * 2.0 * math.sin(angle / 2) ** 2
    return math.acosh(max(1.0, ch))


def turn_to_record(turn: HyperbolicTurn) -> dict:
    start, end = turn.axis.angles
    return {"start_angle": start, "end_angle": end, "half_length": turn.half_length}


def translation_of(turn: HyperbolicTurn) -> float:
    return translation_length(transfer_from_turn(turn))
