"""Command-line interface: ``closedma transform|fit|simulate|experiment``.

Exit codes: 0 success, 2 bad input or I/O, 3 coefficients outside the closed
invertible region, 4 fit succeeded but the estimate is on the boundary,
5 series too short for the requested order.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import (
    ClosedMAError,
    NonFiniteInputError,
    NotInClosedRegionError,
    OutsideClosedCubeError,
    TooShortSeriesError,
)
from .estimator import FitOptions, fit_ma
from .montecarlo import ExperimentConfig, SimSpec, run_experiment, simulate_ma
from .reparam import DEFAULT_EPSILON, b_pseudo_inverse, b_transform

EXIT_INPUT = 2
EXIT_REGION = 3
EXIT_BOUNDARY = 4
EXIT_TOO_SHORT = 5


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _document(command: str, **payload) -> dict:
    ctx = click.get_current_context()
    invocation = {k: v for k, v in ctx.params.items()}
    return {"tool": "closedma", "version": __version__, "command": command, "invocation": invocation, **payload}


def _emit(doc: dict) -> None:
    click.echo(json.dumps(doc, indent=2))


def parse_values(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"cannot parse {text!r} as comma-separated reals") from exc
    if not values:
        raise click.BadParameter("no values given")
    if not all(math.isfinite(v) for v in values):
        raise click.BadParameter("values must be finite")
    return values


def _values_callback(ctx, param, value):
    return None if value is None else parse_values(value)


def _ints_callback(ctx, param, value):
    if value is None:
        return None
    vals = parse_values(value)
    if any(v != int(v) for v in vals):
        raise click.BadParameter("expected integers")
    return [int(v) for v in vals]


def read_series(path: str | Path) -> np.ndarray:
    """Read a single-column CSV (optional ``z`` header) into a float array."""
    values = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            if len(cells) != 1:
                raise ValueError(f"line {lineno}: expected one column, got {len(cells)}")
            tok = cells[0]
            if lineno == 1 and not values and tok.lower() == "z":
                continue
            v = float(tok)
            if not math.isfinite(v):
                raise ValueError(f"line {lineno}: non-finite value {tok!r}")
            values.append(v)
    if not values:
        raise ValueError("no observations found")
    return np.array(values)


def write_series(path: str | Path, z: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("z\n")
        for v in z:
            fh.write(f"{float(v)!r}\n")


@click.group()
@click.version_option(__version__, prog_name="closedma")
def main():
    """Exact MA(q) maximum likelihood on the closed invertible region."""


@main.command()
@click.option("--direction", type=click.Choice(["forward", "inverse"]), required=True)
@click.option("--values", "values", required=True, callback=_values_callback,
              help="Comma-separated zeta (forward) or theta (inverse).")
@click.option("--epsilon", type=float, default=DEFAULT_EPSILON, show_default=True)
def transform(direction, values, epsilon):
    """Map zeta -> theta (forward) or theta -> zeta (inverse)."""
    if not epsilon > 0:
        _fail("epsilon must be positive", EXIT_INPUT)
    if direction == "forward":
        try:
            theta = b_transform(values)
        except (OutsideClosedCubeError, NonFiniteInputError) as exc:
            _fail(str(exc), EXIT_INPUT)
        _emit(_document("transform", direction=direction, zeta=values, theta=theta.tolist()))
        return
    try:
        zeta, report = b_pseudo_inverse(values, epsilon)
    except NotInClosedRegionError as exc:
        _fail(str(exc), EXIT_REGION)
    except NonFiniteInputError as exc:
        _fail(str(exc), EXIT_INPUT)
    _emit(_document("transform", direction=direction, theta=values, zeta=zeta.tolist(),
                    boundary=report.to_dict()))


@main.command()
@click.option("--input", "input_path", required=True, help="Single-column CSV series.")
@click.option("-q", "--q", "q", type=click.IntRange(min=1), required=True, help="MA order.")
@click.option("--epsilon", type=float, default=DEFAULT_EPSILON, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--n-starts", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--demean/--no-demean", default=False, show_default=True,
              help="Subtract the sample mean before fitting.")
def fit(input_path, q, epsilon, seed, n_starts, demean):
    """Fit an MA(q) model; exits 4 if the estimate is on the boundary."""
    try:
        z = read_series(input_path)
    except (OSError, ValueError) as exc:
        _fail(f"cannot read {input_path}: {exc}", EXIT_INPUT)
    if demean:
        z = z - z.mean()
    if not np.any(z != 0.0):
        _fail("series is identically zero", EXIT_INPUT)
    try:
        opts = FitOptions(q=q, epsilon=epsilon, n_starts=n_starts, seed=seed)
    except ValueError as exc:
        _fail(str(exc), EXIT_INPUT)
    try:
        res = fit_ma(z, opts)
    except TooShortSeriesError as exc:
        _fail(str(exc), EXIT_TOO_SHORT)
    except ClosedMAError as exc:
        _fail(str(exc), EXIT_INPUT)
    _emit(_document("fit", input=str(input_path), n=int(z.size), q=q, demean=demean, result=res.to_dict()))
    if res.boundary.on_boundary:
        sys.exit(EXIT_BOUNDARY)


@main.command()
@click.option("--theta", "theta", required=True, callback=_values_callback, help="Comma-separated theta.")
@click.option("-n", "--n", "n", type=int, required=True, help="Series length.")
@click.option("--sigma", type=float, default=1.0, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), required=True)
@click.option("--output", "-o", required=True, help="Destination CSV path.")
def simulate(theta, n, sigma, seed, output):
    """Simulate an MA(q) series and write it as CSV."""
    try:
        spec = SimSpec(theta=tuple(theta), n=n, seed=seed, sigma=sigma)
    except ValueError as exc:
        _fail(str(exc), EXIT_INPUT)
    z = simulate_ma(spec)
    try:
        write_series(output, z)
    except OSError as exc:
        _fail(f"cannot write {output}: {exc}", EXIT_INPUT)
    _emit(_document("simulate", output=str(output), theta=list(spec.theta), n=n, sigma=sigma, seed=seed))


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")
@click.option("--n-values", callback=_ints_callback, default=None)
@click.option("--theta1-values", callback=_values_callback, default=None)
@click.option("--q-values", callback=_ints_callback, default=None)
@click.option("--replications", type=int, default=None)
@click.option("--master-seed", type=int, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--n-starts", type=int, default=None)
@click.option("--jobs", type=click.IntRange(min=1), default=None,
              help="Worker processes (default $CLOSEDMA_JOBS or 1).")
@click.option("--output", "-o", required=True, help="CSV output path.")
@click.option("--json", "json_path", default=None, help="JSON report path (default: CSV path with .json).")
def experiment(config_path, n_values, theta1_values, q_values, replications, master_seed, epsilon,
               n_starts, jobs, output, json_path):
    """Run the boundary-frequency simulation and write CSV and JSON reports."""
    data = {}
    if config_path is not None:
        try:
            data = json.loads(Path(config_path).read_text())
        except (OSError, ValueError) as exc:
            _fail(f"cannot read config {config_path}: {exc}", EXIT_INPUT)
        if not isinstance(data, dict):
            _fail("config must be a JSON object", EXIT_INPUT)
    overrides = {
        "n_values": n_values,
        "theta1_values": theta1_values,
        "q_values": q_values,
        "replications": replications,
        "master_seed": master_seed,
        "epsilon": epsilon,
        "n_starts": n_starts,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = ExperimentConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        _fail(f"invalid config: {exc}", EXIT_INPUT)

    def progress(done, total):
        click.echo(f"[{done}/{total}] cells simulated", err=True)

    report = run_experiment(config, jobs=jobs, progress=progress)
    json_path = json_path or str(Path(output).with_suffix(".json"))
    try:
        Path(output).write_text(report.to_csv())
        Path(json_path).write_text(report.to_json())
    except OSError as exc:
        _fail(f"cannot write report: {exc}", EXIT_INPUT)
    click.echo(report.table(), err=True)
    click.echo(f"wrote {output} and {json_path}", err=True)


if __name__ == "__main__":
    main()
