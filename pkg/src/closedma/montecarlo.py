"""Seeded MA(q) simulation and the boundary-frequency experiment.

Every (n, theta_1, replication) unit draws from its own generator, seeded by
``SeedSequence(master_seed, spawn_key=(n, theta_code, r))`` where
``theta_code`` encodes the theta_1 value itself.  One simulated series is
fitted at every order in ``q_values``.  Any cell can be recomputed in
isolation and the report does not depend on scheduling.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import ClosedMAError
from .estimator import FitOptions, fit_ma
from .reparam import DEFAULT_EPSILON, as_theta

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "theta1", "q", "prop_boundary", "count", "reps", "failures")
JOBS_ENV = "CLOSEDMA_JOBS"


@dataclass(frozen=True)
class SimSpec:
    theta: tuple[float, ...]
    n: int
    seed: int
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(t) for t in as_theta(self.theta)))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def simulate_from_rng(theta, n: int, rng: np.random.Generator, sigma: float = 1.0) -> np.ndarray:
    """``z_t = a_t - sum_i theta_i a_{t-i}`` using ``n + q`` fresh innovations."""
    theta = as_theta(theta)
    q = theta.size
    a = rng.normal(0.0, sigma, size=n + q)
    z = a[q:].copy()
    for i in range(1, q + 1):
        z -= theta[i - 1] * a[q - i : q - i + n]
    return z


def simulate_ma(spec: SimSpec) -> np.ndarray:
    """Simulate a series of length ``spec.n``; no burn-in is needed for an MA."""
    rng = np.random.default_rng(spec.seed)
    return simulate_from_rng(spec.theta, spec.n, rng, spec.sigma)


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: tuple[int, ...] = (25, 50)
    theta1_values: tuple[float, ...] = (-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9)
    q_values: tuple[int, ...] = (1, 2, 3, 4)
    replications: int = 100
    epsilon: float = DEFAULT_EPSILON
    master_seed: int = 20060101
    n_starts: int = 5
    f_tol: float = 1e-9

    def __post_init__(self):
        for name in ("n_values", "theta1_values", "q_values"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.n_values or not self.theta1_values or not self.q_values:
            raise ValueError("n_values, theta1_values and q_values must be non-empty")
        if any(abs(t) >= 1 for t in self.theta1_values):
            raise ValueError("true MA(1) parameters must satisfy |theta1| < 1")
        codes = [theta_code(t) for t in self.theta1_values]
        if len(set(codes)) != len(codes) or len(set(self.n_values)) != len(self.n_values):
            raise ValueError("n_values and theta1_values must not repeat")
        if any(q < 1 for q in self.q_values):
            raise ValueError("fit orders must be >= 1")
        if any(n <= max(self.q_values) for n in self.n_values):
            raise ValueError("every n must exceed the largest fit order")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class CellResult:
    n: int
    theta1: float
    q: int
    count: int
    reps: int
    failures: int
    mean_fit_time: float

    @property
    def prop_boundary(self) -> float:
        fitted = self.reps - self.failures
        return self.count / fitted if fitted else float("nan")


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    cells: list[CellResult]
    provenance: dict = field(default_factory=dict)

    def cell(self, n: int, theta1: float, q: int) -> CellResult:
        for c in self.cells:
            if c.n == n and c.q == q and np.isclose(c.theta1, theta1):
                return c
        raise KeyError((n, theta1, q))

    def proportion(self, n: int, theta1: float, q: int) -> float:
        return self.cell(n, theta1, q).prop_boundary

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in self.cells:
            writer.writerow([c.n, repr(c.theta1), c.q, repr(c.prop_boundary), c.count, c.reps, c.failures])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "config": asdict(self.config),
            "columns": list(CSV_COLUMNS) + ["mean_fit_time"],
            "cells": [
                {
                    "n": c.n,
                    "theta1": c.theta1,
                    "q": c.q,
                    "prop_boundary": c.prop_boundary,
                    "count": c.count,
                    "reps": c.reps,
                    "failures": c.failures,
                    "mean_fit_time": c.mean_fit_time,
                }
                for c in self.cells
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True)

    def table(self) -> str:
        """Text rendering in the n / theta / MA(1..q) layout."""
        qs = self.config.q_values
        lines = ["   n   theta  " + "  ".join(f"MA({q})" for q in qs)]
        for n in self.config.n_values:
            for t in self.config.theta1_values:
                props = "  ".join(f"{self.proportion(n, t, q):5.2f}" for q in qs)
                lines.append(f"{n:4d}  {t:6.1f}  {props}")
        return "\n".join(lines)


def theta_code(theta1: float) -> int:
    """Non-negative integer key for a theta_1 value in (-1, 1), stable to 1e-6."""
    return int(round((theta1 + 1.0) * 1e6))


def unit_seed_sequence(master_seed: int, n: int, theta1: float, rep: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(n, theta_code(theta1), rep))


def _run_unit(args):
    config, n, theta_index, rep = args
    ss = unit_seed_sequence(config.master_seed, n, config.theta1_values[theta_index], rep)
    sim_ss, fit_ss = ss.spawn(2)
    z = simulate_from_rng((config.theta1_values[theta_index],), n, np.random.default_rng(sim_ss))
    fit_seed = int(fit_ss.generate_state(1, dtype=np.uint64)[0])
    out = []
    for q in config.q_values:
        opts = FitOptions(q=q, epsilon=config.epsilon, n_starts=config.n_starts, f_tol=config.f_tol, seed=fit_seed)
        t0 = time.perf_counter()
        try:
            res = fit_ma(z, opts)
        except ClosedMAError as exc:
            logger.warning("fit failed n=%d theta1=%s rep=%d q=%d: %s", n, config.theta1_values[theta_index], rep, q, exc)
            out.append((None, time.perf_counter() - t0))
            continue
        out.append((res.boundary.on_boundary, time.perf_counter() - t0))
    return out


def resolve_jobs(jobs: int | None) -> int:
    if jobs is None:
        jobs = int(os.environ.get(JOBS_ENV, "1"))
    return max(1, int(jobs))


def run_experiment(config: ExperimentConfig, jobs: int | None = None, progress=None) -> ExperimentReport:
    """Simulate MA(1) series and count boundary estimates for each fit order.

    Parameters
    ----------
    config : ExperimentConfig
    jobs : int, optional
        Worker processes; defaults to ``$CLOSEDMA_JOBS`` or 1.  The report is
        identical for any value.
    progress : callable, optional
        Called as ``progress(done, total)`` after each (n, theta_1) cell.
    """
    jobs = resolve_jobs(jobs)
    cells_units = [
        (n, ti, [(config, n, ti, r) for r in range(config.replications)])
        for n in config.n_values
        for ti in range(len(config.theta1_values))
    ]
    executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    cells = []
    try:
        for done, (n, ti, units) in enumerate(cells_units, 1):
            if executor is None:
                results = [_run_unit(u) for u in units]
            else:
                results = list(executor.map(_run_unit, units, chunksize=max(1, len(units) // (4 * jobs))))
            for qi, q in enumerate(config.q_values):
                per_q = [r[qi] for r in results]
                flags = [f for f, _ in per_q if f is not None]
                cells.append(
                    CellResult(
                        n=n,
                        theta1=float(config.theta1_values[ti]),
                        q=q,
                        count=int(sum(flags)),
                        reps=config.replications,
                        failures=len(per_q) - len(flags),
                        mean_fit_time=float(np.mean([t for _, t in per_q])),
                    )
                )
            if progress is not None:
                progress(done, len(cells_units))
    finally:
        if executor is not None:
            executor.shutdown()
    provenance = {
        "software": "closedma",
        "version": __version__,
        "master_seed": config.master_seed,
        "numpy": np.__version__,
    }
    return ExperimentReport(config=config, cells=cells, provenance=provenance)
