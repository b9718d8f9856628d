"""Command-line interface.

Every command writes a list of flat-ish records to stdout as JSON (default)
or CSV.  Complex numbers become ``{"re": .., "im": ..}`` in JSON and
``name_re``/``name_im`` columns in CSV.  Errors go to stderr as a JSON
record; exit status is 2 for invalid input and 3 for numerical degeneracy.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import sys
from dataclasses import dataclass, field

import click
import numpy as np

from . import core, geometry, periodic, potentials, turns
from .core import ScatteringAmplitudes, TransferMatrix
from .errors import DegenerateError, InvariantError, OracleToleranceError, ScatteringError
from .geometry import ActionClassification, ActionKind
from .potentials import PotentialSegment, UnitConvention

EXIT_INPUT = 2
EXIT_NUMERIC = 3


@dataclass(frozen=True)
class RunConfig:
    units: UnitConvention = field(default_factory=UnitConvention)
    output_format: str = "json"
    precision: int = 12
    parallelism: int | str = 1

    def __post_init__(self):
        if not 6 <= self.precision <= 17:
            raise InvariantError("precision must lie in [6, 17]")
        if self.output_format not in ("json", "csv"):
            raise InvariantError(f"unknown format {self.output_format!r}")
        if self.parallelism != "auto" and int(self.parallelism) < 1:
            raise InvariantError("worker count must be at least 1")


# --- serialisation -----------------------------------------------------------


def _round(x: float, digits: int) -> float:
    if not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}") + 0.0  # + 0.0 turns -0.0 into 0.0


def _encode(value, digits: int):
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _round(float(value), digits)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _round(value.real, digits), "im": _round(value.imag, digits)}
    if isinstance(value, ActionKind):
        return value.value
    if isinstance(value, dict):
        return {k: _encode(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v, digits) for v in value]
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _flatten(record: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            keys = set(value)
            if keys == {"re", "im"}:
                flat[f"{name}_re"] = value["re"]
                flat[f"{name}_im"] = value["im"]
            else:
                flat.update(_flatten(value, f"{name}_"))
        elif isinstance(value, list):
            flat.update(_flatten({str(i): v for i, v in enumerate(value)}, f"{name}_"))
        else:
            flat[name] = value
    return flat


def render(records: list[dict], config: RunConfig) -> str:
    encoded = [_encode(r, config.precision) for r in records]
    if config.output_format == "json":
        return json.dumps(encoded, indent=2) + "\n"
    rows = [_flatten(r) for r in encoded]
    columns: list[str] = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def emit(records: list[dict]) -> None:
    config: RunConfig = click.get_current_context().find_root().obj
    click.echo(render(records, config), nl=False)


def _error_record(exc: Exception) -> dict:
    record = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, OracleToleranceError):
        record["det_residual"] = exc.det_residual
    return record


def handled(func):
    """Turn library errors into a JSON record on stderr and the documented exit code."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except InvariantError as exc:
            click.echo(json.dumps(_error_record(exc)), err=True)
            sys.exit(EXIT_INPUT)
        except (DegenerateError, ScatteringError) as exc:
            click.echo(json.dumps(_error_record(exc)), err=True)
            sys.exit(EXIT_NUMERIC)

    return wrapper


# --- input parsing -----------------------------------------------------------


def parse_complex(text: str) -> complex:
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise InvariantError(f"cannot parse complex number {text!r}") from exc


def parse_system(text: str, tol: float) -> ScatteringAmplitudes:
    """``"r,t"`` -> ScatteringAmplitudes."""
    parts = text.split(",")
    if len(parts) != 2:
        raise InvariantError(f"expected 'r,t', got {text!r}")
    return ScatteringAmplitudes(parse_complex(parts[0]), parse_complex(parts[1]), tol)


def _units() -> UnitConvention:
    return click.get_current_context().find_root().obj.units


def matrix_options(func):
    """Options selecting one transfer matrix."""
    opts = [
        click.option("--r", "r_text", help="Reflection amplitude, e.g. 0.3+0.2i."),
        click.option("--t", "t_text", help="Transmission amplitude."),
        click.option("--alpha", "alpha_text", help="Matrix entry alpha."),
        click.option("--beta", "beta_text", help="Matrix entry beta."),
        click.option("--barrier", is_flag=True, help="Rectangular barrier from --E --V0 --L."),
        click.option("--cell", "cell_text", help="Cell spec 'V0:L;V0:L;...'."),
        click.option("--canonical", type=click.Choice([k.value for k in ActionKind]), help="Canonical form kind."),
        click.option("--param", type=float, help="Canonical form parameter."),
        click.option("--E", "energy", type=float, help="Energy."),
        click.option("--V0", "height", type=float, help="Barrier height."),
        click.option("--L", "length", type=float, help="Barrier length."),
        click.option("--flux-tol", type=float, default=core.DEFAULT_TOL, show_default=True,
                     help="Flux tolerance for --r/--t input."),
    ]
    for opt in reversed(opts):
        func = opt(func)
    return func


def resolve_matrix(
    r_text=None, t_text=None, alpha_text=None, beta_text=None, barrier=False, cell_text=None,
    canonical=None, param=None, energy=None, height=None, length=None, flux_tol=core.DEFAULT_TOL,
) -> TransferMatrix:
    units = _units()
    if barrier:
        if None in (energy, height, length):
            raise InvariantError("--barrier needs --E, --V0 and --L")
        return potentials.barrier_transfer(energy, PotentialSegment(height, length), units)
    if cell_text is not None:
        if energy is None:
            raise InvariantError("--cell needs --E")
        return potentials.stack_transfer(energy, potentials.parse_cell(cell_text), units)
    if canonical is not None:
        if param is None:
            raise InvariantError("--canonical needs --param")
        return geometry.canonical_form(canonical, param)
    if r_text is not None or t_text is not None:
        if r_text is None or t_text is None:
            raise InvariantError("give both --r and --t")
        amps = ScatteringAmplitudes(parse_complex(r_text), parse_complex(t_text), flux_tol)
        return core.transfer_from_amplitudes(amps)
    if alpha_text is not None and beta_text is not None:
        return TransferMatrix(parse_complex(alpha_text), parse_complex(beta_text), max(flux_tol, core.DEFAULT_TOL))
    raise InvariantError("no system given: use --r/--t, --alpha/--beta, --barrier, --cell or --canonical")


# --- record builders ---------------------------------------------------------


def matrix_record(m: TransferMatrix) -> dict:
    amps = core.amplitudes_from_transfer(m)
    return {
        "alpha": m.alpha,
        "beta": m.beta,
        "r": amps.r,
        "t": amps.t,
        "trace": m.trace,
        "det_residual": m.det_residual,
        "flux_residual": amps.flux_residual,
    }


def classification_record(cls: ActionClassification) -> dict:
    return {
        "kind": cls.kind,
        "parameter": cls.parameter,
        "trace": cls.trace,
        "fixed_points": list(cls.fixed_points),
    }


def turn_record(turn: turns.HyperbolicTurn) -> dict:
    rec = turns.turn_to_record(turn)
    rec["translation_length"] = turn.translation_length
    return rec


def _point_records(points, extra=None) -> list[dict]:
    out = []
    for i, z in enumerate(points):
        rec = {"index": i, "z": z, "abs_z": abs(z)}
        if extra:
            rec.update(extra)
        out.append(rec)
    return out


# --- commands ----------------------------------------------------------------


@click.group()
@click.option("--format", "output_format", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--precision", type=click.IntRange(6, 17), default=12, show_default=True,
              help="Significant digits in the output.")
@click.option("--workers", default="1", show_default=True, help="Worker processes for scans, or 'auto'.")
@click.option("--hbar", type=float, default=1.0, show_default=True)
@click.option("--mass", type=float, default=0.5, show_default=True)
@click.pass_context
@handled
def main(ctx, output_format, precision, workers, hbar, mass):
    """One-dimensional scattering with SU(1,1) transfer matrices on the unit disk."""
    parallelism = workers if workers == "auto" else int(workers)
    ctx.obj = RunConfig(UnitConvention(hbar, mass), output_format, precision, parallelism)


@main.command("classify")
@matrix_options
@handled
def cmd_classify(**kwargs):
    """Elliptic / hyperbolic / parabolic classification with fixed points."""
    m = resolve_matrix(**kwargs)
    rec = classification_record(geometry.classify(m))
    rec.update(matrix_record(m))
    emit([rec])


@main.command("barrier")
@click.option("--E", "energy", type=float, required=True)
@click.option("--V0", "height", type=float, required=True)
@click.option("--L", "length", type=float, required=True)
@handled
def cmd_barrier(energy, height, length):
    """Amplitudes and transfer matrix of a rectangular barrier or well."""
    units = _units()
    seg = PotentialSegment(height, length)
    amps = potentials.barrier_amplitudes(energy, seg, units)
    m = core.transfer_from_amplitudes(amps)
    rec = {"E": energy, "V0": height, "L": length, "k": units.wavenumber(energy)}
    rec.update(matrix_record(m))
    rec["flux"] = abs(amps.r) ** 2 + abs(amps.t) ** 2
    rec["kind"] = geometry.classify(m).kind
    emit([rec])


@main.command("compose")
@click.option("--system", "systems", multiple=True, required=True,
              help="'r,t' of one system; repeat, leftmost first.")
@click.option("--flux-tol", type=float, default=core.DEFAULT_TOL, show_default=True)
@handled
def cmd_compose(systems, flux_tol):
    """Amplitudes of systems placed left to right."""
    parsed = [parse_system(s, flux_tol) for s in systems]
    amps = parsed[0]
    matrix = core.transfer_from_amplitudes(parsed[0])
    for nxt in parsed[1:]:
        amps = core.composed_amplitudes(amps, nxt)
        matrix = core.compose(matrix, core.transfer_from_amplitudes(nxt))
    via_matrix = core.amplitudes_from_transfer(matrix)
    emit([{
        "systems": len(parsed),
        "r": amps.r,
        "t": amps.t,
        "matrix_route_deviation": max(abs(amps.r - via_matrix.r), abs(amps.t - via_matrix.t)),
        "flux_residual": amps.flux_residual,
        "det_residual": matrix.det_residual,
        "kind": geometry.classify(matrix).kind,
    }])


@main.command("periodic")
@matrix_options
@click.option("--N", "n", type=click.IntRange(min=1), required=True, help="Number of periods.")
@click.option("--closed-form/--iterate", default=True, show_default=True)
@handled
def cmd_periodic(n, closed_form, **kwargs):
    """Reflection of N repeated cells, one record per N."""
    m = resolve_matrix(**kwargs)
    series = periodic.periodic_series(m, n, closed_form=closed_form)
    emit([
        {
            "N": res.n,
            "z": res.z,
            "reflectance": res.reflectance,
            "kind": res.kind.kind,
            "method": "closed-form" if closed_form else "iterate",
            "det_residual": m.det_residual,
        }
        for res in series
    ])


@main.command("orbit")
@matrix_options
@click.option("--z0", default="0", show_default=True, help="Starting point.")
@click.option("--samples", type=click.IntRange(min=2), default=50, show_default=True)
@handled
def cmd_orbit(z0, samples, **kwargs):
    """Orbit of z0 under the one-parameter family through the matrix."""
    m = resolve_matrix(**kwargs)
    points = geometry.orbit(m, parse_complex(z0), samples)
    emit(_point_records(points, {"kind": geometry.classify(m).kind}))


@main.command("iterates")
@matrix_options
@click.option("--N", "n", type=click.IntRange(min=1), required=True)
@click.option("--z0", default="0", show_default=True)
@handled
def cmd_iterates(n, z0, **kwargs):
    """Successive disk images z_1..z_N of z0."""
    m = resolve_matrix(**kwargs)
    start = parse_complex(z0)
    geometry.check_disk_point(start)
    points = periodic.iterate_disk(m, n, start)
    recs = _point_records(points, {"kind": geometry.classify(m).kind})
    for rec in recs:
        rec["index"] += 1
    emit(recs)


@main.command("turns")
@click.option("--system", "systems", multiple=True, required=True,
              help="'r,t' of a system; give exactly two.")
@click.option("--flux-tol", type=float, default=core.DEFAULT_TOL, show_default=True)
@handled
def cmd_turns(systems, flux_tol):
    """Hyperbolic turns of two systems and of their products in both orders."""
    if len(systems) != 2:
        raise InvariantError("turns needs exactly two --system options")
    m1, m2 = (core.transfer_from_amplitudes(parse_system(s, flux_tol)) for s in systems)
    records = []
    for label, m in (("system1", m1), ("system2", m2)):
        rec = {"role": label}
        rec.update(turn_record(turns.turn_from_transfer(m)))
        rec["trace"] = m.trace
        records.append(rec)
    for label, product in (("product12", core.compose(m1, m2)), ("product21", core.compose(m2, m1))):
        rec = {"role": label}
        cls = geometry.classify(product)
        if cls.kind is ActionKind.HYPERBOLIC:
            rec.update(turn_record(turns.turn_from_transfer(product)))
        rec.update({"kind": cls.kind, "trace": product.trace})
        amps = core.amplitudes_from_transfer(product)
        rec.update({"r": amps.r, "t": amps.t, "det_residual": product.det_residual})
        records.append(rec)
    emit(records)


@main.command("band-scan")
@click.option("--cell", "cell_text", required=True, help="Cell spec 'V0:L;V0:L;...'.")
@click.option("--E-min", "e_min", type=float, required=True)
@click.option("--E-max", "e_max", type=float, required=True)
@click.option("--samples", type=click.IntRange(min=2), default=200, show_default=True)
@click.option("--refine/--no-refine", default=True, show_default=True, help="Bisect band edges.")
@handled
def cmd_band_scan(cell_text, e_min, e_max, samples, refine):
    """Allowed / forbidden status of the cell over an energy grid."""
    if not 0 < e_min < e_max:
        raise InvariantError("need 0 < E-min < E-max")
    config: RunConfig = click.get_current_context().find_root().obj
    cell = potentials.parse_cell(cell_text)
    energies = np.linspace(e_min, e_max, samples)
    points = periodic.band_scan(cell, energies, config.units, config.parallelism, refine)
    emit([{"E": p.energy, "half_trace": p.half_trace, "status": p.status.value} for p in points])


@main.command("oracle-compare")
@click.option("--cell", "cell_text", help="Cell spec 'V0:L;...' to sample and compare.")
@click.option("--potential-file", type=click.Path(exists=True, dir_okay=False),
              help="Two-column (x, V) text file; cell-centred samples.")
@click.option("--E", "energy", type=float, required=True)
@click.option("--grid", type=click.IntRange(min=2), default=10000, show_default=True,
              help="Cells used to sample --cell.")
@click.option("--det-tol", type=float, default=1e-8, show_default=True)
@handled
def cmd_oracle_compare(cell_text, potential_file, energy, grid, det_tol):
    """Compare the integrated transfer matrix with the analytic one."""
    units = _units()
    if (cell_text is None) == (potential_file is None):
        raise InvariantError("give exactly one of --cell or --potential-file")
    if cell_text is not None:
        stack = potentials.parse_cell(cell_text)
        sampled = stack.sample(grid)
        reference = potentials.stack_transfer(energy, stack, units)
        label = "stack"
    else:
        sampled = potentials.SampledPotential.load(potential_file)
        a, b = sampled.bounds
        reference = None
        label = "free" if not np.any(sampled.v) else "none"
        if label == "free":
            reference = potentials.free_transfer(energy, b - a, units)
    numeric = potentials.numerical_transfer(energy, sampled, units, det_tol)
    rec = {"E": energy, "samples": int(sampled.x.size), "reference": label}
    rec.update({f"numeric_{k}": v for k, v in matrix_record(numeric).items()})
    if reference is not None:
        rec["max_deviation"] = max(abs(numeric.alpha - reference.alpha), abs(numeric.beta - reference.beta))
    emit([rec])


if __name__ == "__main__":  # pragma: no cover
    main()
