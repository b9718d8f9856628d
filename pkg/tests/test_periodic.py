import math

import numpy as np
import pytest

from disk_scattering.core import TransferMatrix, amplitudes_from_transfer, transfer_power
from disk_scattering.errors import InvariantError
from disk_scattering.geometry import ActionKind, canonical_form, classify, hyperbolic_distance, mobius
from disk_scattering.periodic import (
    BandStatus,
    attracting_ratio,
    band_edges,
    band_scan,
    cell_half_trace,
    closed_form_zN,
    iterate_disk,
    periodic_series,
    reflectance_N,
    reflectance_any,
    resolve_workers,
    transmittance_N,
)
from disk_scattering.potentials import NATURAL_UNITS, PotentialSegment, barrier_transfer, parse_cell

from conftest import random_elliptic, random_hyperbolic, random_parabolic

TUNNEL = barrier_transfer(0.5, PotentialSegment(1.0, 2.0))
FLAT = barrier_transfer(1.0, PotentialSegment(1.0, 2.0))
ABOVE = barrier_transfer(1.6, PotentialSegment(1.0, 2.0))


class TestIteration:
    def test_single_step_is_r(self):
        m = TUNNEL
        assert iterate_disk(m, 1) == [pytest.approx(amplitudes_from_transfer(m).r)]

    def test_matches_power(self):
        zs = iterate_disk(TUNNEL, 7)
        assert zs[-1] == pytest.approx(mobius(transfer_power(TUNNEL, 7), 0j), abs=1e-12)

    def test_hyperbolic_monotone_to_boundary(self):
        mods = np.abs(iterate_disk(TUNNEL, 30))
        assert np.all(np.diff(mods[:6]) > 0) and np.all(np.diff(mods) >= 0)
        assert mods[-1] > 1 - 1e-12

    def test_parabolic_to_boundary(self):
        mods = np.abs(iterate_disk(FLAT, 2000))
        assert mods[-1] > 0.999

    def test_elliptic_orbit_centred_on_fixed_point(self):
        zf = classify(ABOVE).fixed_points[0]
        zs = iterate_disk(ABOVE, 50)
        d = hyperbolic_distance(zf, 0j)
        assert np.allclose(hyperbolic_distance(zf, np.array(zs)), d, atol=1e-9)

    @pytest.mark.parametrize("n", [0, -1, 2.0])
    def test_bad_n(self, n):
        with pytest.raises(InvariantError):
            iterate_disk(TUNNEL, n)


class TestClosedForm:
    @pytest.mark.parametrize("m", [TUNNEL, FLAT, ABOVE])
    def test_first_period(self, m):
        assert closed_form_zN(m, 1) == pytest.approx(amplitudes_from_transfer(m).r, abs=1e-12)

    def test_hyperbolic_barrier_five(self):
        assert abs(closed_form_zN(TUNNEL, 5) - iterate_disk(TUNNEL, 5)[-1]) < 1e-10

    def test_parabolic_barrier_ten(self):
        assert abs(closed_form_zN(FLAT, 10) - iterate_disk(FLAT, 10)[-1]) < 1e-10

    @pytest.mark.parametrize("make", [random_hyperbolic, random_parabolic, random_elliptic])
    def test_random_cells(self, rng, make):
        for _ in range(30):
            m = make(rng)
            for n, z in enumerate(iterate_disk(m, 40), start=1):
                assert abs(closed_form_zN(m, n) - z) < 1e-10

    def test_negative_trace_cell(self, rng):
        m = random_hyperbolic(rng).negated()
        assert abs(closed_form_zN(m, 9) - iterate_disk(m, 9)[-1]) < 1e-10

    def test_identity(self):
        assert closed_form_zN(TransferMatrix.identity(), 4) == 0

    def test_attracting_ratio(self, rng):
        assert abs(attracting_ratio(random_hyperbolic(rng))) < 1

    def test_large_n_stays_finite(self):
        z = closed_form_zN(TUNNEL, 10_000)
        assert abs(abs(z) - 1) < 1e-12
        assert z == pytest.approx(classify(TUNNEL).fixed_points[0])

    def test_series(self):
        closed = periodic_series(TUNNEL, 12)
        iterated = periodic_series(TUNNEL, 12, closed_form=False)
        for a, b in zip(closed, iterated):
            assert a.n == b.n and abs(a.z - b.z) < 1e-10
            assert a.reflectance == pytest.approx(abs(a.z) ** 2, abs=1e-12) and a.reflectance <= 1
            assert a.kind.kind is ActionKind.HYPERBOLIC


class TestReflectance:
    def test_first_period_hyperbolic(self):
        r = amplitudes_from_transfer(TUNNEL).r
        b2 = abs(TUNNEL.beta) ** 2
        assert reflectance_N(TUNNEL, 1) == pytest.approx(b2 / (b2 + 1))
        assert reflectance_N(TUNNEL, 1) == pytest.approx(abs(r) ** 2, rel=1e-12)

    @pytest.mark.parametrize("m", [TUNNEL, FLAT])
    def test_matches_closed_form_points(self, m):
        for n in (1, 2, 5, 17, 60):
            assert reflectance_N(m, n) == pytest.approx(abs(closed_form_zN(m, n)) ** 2, abs=1e-12)
            assert transmittance_N(m, n) == pytest.approx(1 - reflectance_N(m, n), abs=1e-12)

    @pytest.mark.parametrize("m", [TUNNEL, FLAT, ABOVE])
    def test_chebyshev_route(self, m):
        for n in (1, 3, 8, 25):
            assert reflectance_any(m, n) == pytest.approx(abs(iterate_disk(m, n)[-1]) ** 2, abs=1e-12)

    def test_parabolic_law(self):
        b2 = abs(FLAT.beta) ** 2
        assert 100**2 * transmittance_N(FLAT, 100) * b2 == pytest.approx(1.0, abs=0.01)

    def test_hyperbolic_decay(self):
        xi = math.acosh(TUNNEL.alpha.real)
        ns = np.arange(10, 31)
        slope = np.polyfit(ns, np.log([transmittance_N(TUNNEL, int(n)) for n in ns]), 1)[0]
        assert slope == pytest.approx(-2 * xi, rel=0.02)

    def test_transmittance_without_cancellation(self):
        assert 0 < transmittance_N(TUNNEL, 200) < 1e-200

    def test_elliptic_rejected(self):
        with pytest.raises(InvariantError):
            reflectance_N(ABOVE, 3)


class TestBands:
    def test_single_barrier_split_at_height(self):
        cell = parse_cell("1:2")
        points = band_scan(cell, np.linspace(0.2, 1.8, 17))
        below = [p for p in points if p.energy < 1 - 1e-6]
        above = [p for p in points if p.energy > 1 + 1e-6]
        assert all(p.status is BandStatus.FORBIDDEN for p in below)
        assert all(p.status is BandStatus.ALLOWED for p in above)
        assert band_edges(points) == [pytest.approx(1.0, abs=1e-8)]

    def test_edge_at_sample(self):
        points = band_scan(parse_cell("1:2"), [0.5, 1.0, 1.5])
        assert [p.status for p in points] == [BandStatus.FORBIDDEN, BandStatus.EDGE, BandStatus.ALLOWED]

    def test_free_cell_all_allowed_or_edge(self):
        points = band_scan(parse_cell("0:1"), np.linspace(0.1, 5, 40))
        assert not any(p.status is BandStatus.FORBIDDEN for p in points)

    def test_kronig_penney_gaps(self):
        cell = parse_cell("0:1;3:0.5")
        points = band_scan(cell, np.linspace(0.05, 12, 300))
        edges = band_edges(points)
        assert len(edges) >= 3
        for e in edges:
            assert abs(abs(cell_half_trace(e, cell, NATURAL_UNITS)) - 1) < 1e-6

    def test_status_matches_half_trace(self):
        cell = parse_cell("0:1;3:0.5")
        for p in band_scan(cell, np.linspace(0.05, 12, 100), refine_edges=False):
            if p.status is BandStatus.FORBIDDEN:
                assert abs(p.half_trace) > 1
            elif p.status is BandStatus.ALLOWED:
                assert abs(p.half_trace) < 1

    def test_parallel_identical(self):
        cell = parse_cell("0:1;3:0.5")
        energies = np.linspace(0.05, 12, 64)
        assert band_scan(cell, energies, workers=1) == band_scan(cell, energies, workers=2)

    def test_validation(self):
        with pytest.raises(InvariantError):
            band_scan(parse_cell("1:1"), [0.0, 1.0])
        with pytest.raises(InvariantError):
            band_scan(parse_cell("1:1"), [1.0, 0.5])
        assert band_scan(parse_cell("1:1"), []) == []

    def test_workers(self):
        assert resolve_workers(3) == 3
        assert resolve_workers("auto") >= 1
        with pytest.raises(InvariantError):
            resolve_workers(0)

