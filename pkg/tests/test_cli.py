import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from disk_scattering.cli import main, parse_complex
from disk_scattering.errors import InvariantError
from disk_scattering.potentials import SampledPotential


def run(*args, code=0):
    result = CliRunner().invoke(main, list(args))
    assert result.exit_code == code, (result.output, result.exception)
    return result


def records(*args):
    return json.loads(run(*args).output)


def as_complex(d):
    return complex(d["re"], d["im"])


class TestParsing:
    @pytest.mark.parametrize("text,value", [
        ("0.3+0.2i", 0.3 + 0.2j), ("-1", -1), ("i", 1j), ("-0.5i", -0.5j), ("1e-3-2j", 1e-3 - 2j)])
    def test_complex(self, text, value):
        assert parse_complex(text) == value

    def test_bad_complex(self):
        with pytest.raises(InvariantError):
            parse_complex("abc")


class TestClassify:
    def test_identity(self):
        (rec,) = records("classify", "--r", "0", "--t", "1")
        assert rec["kind"] == "parabolic" and rec["parameter"] == 0 and rec["fixed_points"] == []

    def test_tunnelling_barrier(self):
        (rec,) = records("classify", "--barrier", "--E", "0.5", "--V0", "1.0", "--L", "2.0")
        assert rec["kind"] == "hyperbolic"
        assert len(rec["fixed_points"]) == 2

    def test_canonical(self):
        (rec,) = records("classify", "--canonical", "elliptic", "--param", "1.5")
        assert rec["kind"] == "elliptic" and rec["parameter"] == pytest.approx(1.5)

    def test_alpha_beta(self):
        (rec,) = records("classify", "--alpha", "1.25", "--beta", "0.75i")
        assert rec["kind"] == "hyperbolic"

    def test_cell(self):
        (rec,) = records("classify", "--cell", "1:1;0:1", "--E", "0.4")
        assert rec["det_residual"] < 1e-12

    def test_residuals_embedded(self):
        (rec,) = records("classify", "--r", "0.6i", "--t", "0.8")
        assert "det_residual" in rec and "flux_residual" in rec

    def test_flux_violation(self):
        result = run("classify", "--r", "0.5", "--t", "0.5", code=2)
        err = json.loads(result.output)
        assert err["error"] == "InvariantError"

    def test_no_source(self):
        run("classify", code=2)


class TestBarrier:
    def test_equal_energy(self):
        (rec,) = records("barrier", "--E", "1", "--V0", "1", "--L", "2")
        assert as_complex(rec["r"]) == pytest.approx(1 / (1 + 1j))
        assert as_complex(rec["t"]) == pytest.approx(1 / (1 - 1j))
        assert rec["kind"] == "parabolic"

    def test_free_gap(self):
        (rec,) = records("barrier", "--E", "1", "--V0", "0", "--L", "3")
        assert as_complex(rec["r"]) == 0
        assert rec["flux"] == pytest.approx(1.0, abs=1e-12)

    def test_units(self):
        (rec,) = records("--hbar", "2", "--mass", "1", "barrier", "--E", "2", "--V0", "0", "--L", "1")
        assert rec["k"] == pytest.approx(1.0)

    def test_bad_energy(self):
        run("barrier", "--E", "0", "--V0", "1", "--L", "1", code=2)


class TestCompose:
    FIG = ["--flux-tol", "1e-3", "--system", "-0.9521-0.0882i,0.2532-0.1468i",
           "--system", "-0.3307-0.52903i,0.6284-0.4647i"]

    def test_single_system(self):
        (rec,) = records("compose", "--system", "0.6i,0.8")
        assert as_complex(rec["r"]) == pytest.approx(0.6j) and as_complex(rec["t"]) == pytest.approx(0.8)

    def test_reference_pair_routes_agree(self):
        (rec,) = records("compose", *self.FIG)
        assert rec["matrix_route_deviation"] < 1e-12
        assert as_complex(rec["r"]) == pytest.approx(-0.98567 - 0.08854j, abs=1e-4)

    def test_order_swap(self):
        (a,) = records("compose", "--system", "0.6i,0.8", "--system", "0.6,0.8")
        (b,) = records("compose", "--system", "0.6,0.8", "--system", "0.6i,0.8")
        assert abs(as_complex(a["r"]) - as_complex(b["r"])) > 1e-3


class TestPeriodic:
    def test_first_period_is_r(self):
        (rec,) = records("periodic", "--barrier", "--E", "0.5", "--V0", "1", "--L", "2", "--N", "1")
        (bar,) = records("barrier", "--E", "0.5", "--V0", "1", "--L", "2")
        assert as_complex(rec["z"]) == pytest.approx(as_complex(bar["r"]))

    def test_closed_vs_iterate(self):
        args = ["periodic", "--barrier", "--E", "0.5", "--V0", "1", "--L", "2", "--N", "5"]
        closed, iterated = records(*args), records(*args, "--iterate")
        assert [r["N"] for r in closed] == [1, 2, 3, 4, 5]
        for a, b in zip(closed, iterated):
            assert as_complex(a["z"]) == pytest.approx(as_complex(b["z"]), abs=1e-10)

    def test_parabolic_scan(self):
        recs = records("periodic", "--barrier", "--E", "1", "--V0", "1", "--L", "2", "--N", "200")
        scaled = [r["N"] ** 2 * (1 - r["reflectance"]) for r in recs]
        assert scaled[-1] == pytest.approx(scaled[99], rel=0.01)


class TestOrbits:
    def test_elliptic_orbit(self):
        recs = records("orbit", "--canonical", "elliptic", "--param", "2", "--z0", "0.3+0.4i", "--samples", "12")
        assert len(recs) == 12
        assert all(abs(as_complex(r["z"])) == pytest.approx(0.5) for r in recs)

    def test_two_samples(self):
        recs = records("orbit", "--canonical", "hyperbolic", "--param", "1", "--z0", "0.1", "--samples", "2")
        assert as_complex(recs[0]["z"]) == pytest.approx(0.1)

    def test_iterates_to_boundary(self):
        recs = records("iterates", "--barrier", "--E", "0.5", "--V0", "1", "--L", "2", "--N", "20")
        assert abs(as_complex(recs[-1]["z"])) > 1 - 1e-9


class TestTurns:
    def test_records(self):
        recs = records("turns", "--system", "0.6i,0.8", "--system", "0.6,0.8")
        assert [r["role"] for r in recs] == ["system1", "system2", "product12", "product21"]
        assert recs[2]["half_length"] == pytest.approx(recs[3]["half_length"])
        assert recs[2]["start_angle"] != pytest.approx(recs[3]["start_angle"])

    def test_needs_two(self):
        run("turns", "--system", "0.6i,0.8", code=2)

    def test_elliptic_system(self):
        run("turns", "--system", "0,1", "--system", "0.6,0.8", code=2)


class TestBandScan:
    def test_barrier_split(self):
        recs = records("band-scan", "--cell", "1:2", "--E-min", "0.2", "--E-max", "1.8", "--samples", "9")
        edges = [r["E"] for r in recs if r["status"] == "edge"]
        assert edges == [pytest.approx(1.0, abs=1e-8)]

    def test_bad_range(self):
        run("band-scan", "--cell", "1:2", "--E-min", "2", "--E-max", "1", code=2)

    def test_csv(self):
        out = run("--format", "csv", "band-scan", "--cell", "1:2", "--E-min", "0.5", "--E-max", "1.5",
                  "--samples", "3").output
        lines = out.strip().splitlines()
        assert lines[0] == "E,half_trace,status"
        assert len(lines) == 4


class TestOracleCompare:
    def test_barrier(self):
        (rec,) = records("oracle-compare", "--cell", "1:2", "--E", "0.5")
        assert rec["max_deviation"] < 1e-6 and rec["reference"] == "stack"

    def test_free_file(self, tmp_path):
        x = np.linspace(0.0005, 2.9995, 3000)
        path = tmp_path / "free.txt"
        SampledPotential(x, np.zeros_like(x)).save(path)
        (rec,) = records("oracle-compare", "--potential-file", str(path), "--E", "1.2")
        assert rec["reference"] == "free" and rec["max_deviation"] < 1e-8

    def test_coarse_grid(self):
        result = run("oracle-compare", "--cell", "1:10", "--E", "40", "--grid", "4", code=3)
        assert "OracleToleranceError" in result.output

    def test_exactly_one_source(self):
        run("oracle-compare", "--E", "1", code=2)


class TestOutput:
    def test_precision(self):
        (rec,) = records("--precision", "6", "barrier", "--E", "0.3", "--V0", "1", "--L", "1")
        assert len(repr(rec["k"]).replace(".", "").lstrip("0")) <= 6

    def test_precision_bounds(self):
        run("--precision", "5", "barrier", "--E", "1", "--V0", "1", "--L", "1", code=2)

    def test_no_negative_zero(self):
        out = run("barrier", "--E", "1", "--V0", "0", "--L", "3").output
        assert "-0.0" not in out

    def test_deterministic(self):
        args = ["--workers", "2", "band-scan", "--cell", "0:1;3:0.5", "--E-min", "0.1", "--E-max", "10",
                "--samples", "50"]
        assert run(*args).output == run(*args).output

    def test_math_is_plain(self):
        (rec,) = records("barrier", "--E", "0.5", "--V0", "1", "--L", "1")
        assert math.isfinite(rec["trace"])
