import cmath
import math

import numpy as np
import pytest

from disk_scattering.core import TransferMatrix, random_transfer
from disk_scattering.geometry import canonical_form, conjugate


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def matrix_distance(m1: TransferMatrix, m2: TransferMatrix) -> float:
    return max(abs(m1.alpha - m2.alpha), abs(m1.beta - m2.beta))


def projective_distance(m1: TransferMatrix, m2: TransferMatrix) -> float:
    """Distance between the disk maps, i.e. min over the sign of m2."""
    return min(matrix_distance(m1, m2), matrix_distance(m1, m2.negated()))


def random_hyperbolic(rng, conj_scale=0.8) -> TransferMatrix:
    c = random_transfer(rng, conj_scale)
    return conjugate(c, canonical_form("hyperbolic", rng.uniform(0.05, 3.0)))


def random_parabolic(rng, conj_scale=0.8) -> TransferMatrix:
    c = random_transfer(rng, conj_scale)
    return conjugate(c, canonical_form("parabolic", rng.uniform(-2.0, 2.0)))


def random_elliptic(rng, conj_scale=0.8) -> TransferMatrix:
    c = random_transfer(rng, conj_scale)
    return conjugate(c, canonical_form("elliptic", rng.uniform(-3.0, 3.0)))


def random_disk_points(rng, n, radius=0.999):
    rad = radius * np.sqrt(rng.uniform(0, 1, n))
    return rad * np.exp(1j * rng.uniform(-math.pi, math.pi, n))


def unit(angle):
    return cmath.exp(1j * angle)
