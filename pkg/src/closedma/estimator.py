"""Maximum likelihood fitting of MA(q) models over the closed unit cube.

The concentrated likelihood is maximized in the partial-parameter coordinates
with a bounded Nelder-Mead search.  Trial points are clipped onto
``[-1, 1]^q`` before evaluation, so an optimum on the non-invertible boundary
is reached exactly instead of being approached from inside.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import AllStartsFailedError, TooShortSeriesError, ZeroSeriesError
from .likelihood import as_series, innovations_loglikelihood, neg_loglik_theta
from .reparam import DEFAULT_EPSILON, BoundaryReport, _forward, b_transform, boundary_flags

TIE_TOL = 1e-12
# Coordinates this close to +-1 are also tried exactly on the face after the search.
SNAP_WINDOW = 1e-3
INWARD_STEPS = (0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4)
MAX_ESCAPES = 3


@dataclass(frozen=True)
class FitOptions:
    """Optimizer settings for :func:`fit_ma`.

    ``max_iters`` defaults to ``1000 * q`` when left as ``None``.
    """

    q: int
    epsilon: float = DEFAULT_EPSILON
    n_starts: int = 5
    f_tol: float = 1e-9
    x_tol: float = 1e-9
    max_iters: int | None = None
    seed: int = 0
    init_step: float = 0.25

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"q must be a positive integer, got {self.q}")
        if not (self.epsilon > 0 and self.f_tol > 0 and self.x_tol > 0 and self.init_step > 0):
            raise ValueError("epsilon, f_tol, x_tol and init_step must be positive")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    @property
    def iteration_cap(self) -> int:
        return self.max_iters if self.max_iters is not None else 1000 * self.q


@dataclass(frozen=True)
class FitResult:
    zeta_hat: np.ndarray
    theta_hat: np.ndarray
    sigma2_hat: float
    loglik: float
    boundary: BoundaryReport
    converged: bool
    n_evals: int
    start_index: int
    start_logliks: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "zeta_hat": self.zeta_hat.tolist(),
            "theta_hat": self.theta_hat.tolist(),
            "sigma2_hat": self.sigma2_hat,
            "loglik": self.loglik,
            "boundary": self.boundary.to_dict(),
            "converged": self.converged,
            "n_evals": self.n_evals,
            "start_index": self.start_index,
        }


def concentrated_loglik_zeta(z, zeta) -> float:
    """Concentrated log-likelihood at ``B(zeta)``; ``-inf`` if degenerate."""
    return -float(neg_loglik_theta(b_transform(zeta), as_series(z)))


def start_points(q: int, n_starts: int, seed: int) -> list[np.ndarray]:
    """Deterministic then random starting points.

    The origin comes first, then ``+0.5 e_k, -0.5 e_k`` for ``k = 1..q``, then
    uniform draws on ``[-0.9, 0.9]^q`` until ``n_starts`` points exist.
    """
    pts = [np.zeros(q)]
    for k in range(q):
        for sign in (1.0, -1.0):
            p = np.zeros(q)
            p[k] = 0.5 * sign
            pts.append(p)
    pts = pts[:n_starts]
    rng = np.random.default_rng(seed)
    while len(pts) < n_starts:
        pts.append(rng.uniform(-0.9, 0.9, size=q))
    return pts


def _initial_simplex(x0: np.ndarray, step: float) -> np.ndarray:
    q = x0.size
    simplex = np.tile(x0, (q + 1, 1))
    for k in range(q):
        # step toward the interior so no two vertices coincide after clipping
        simplex[k + 1, k] += -step if x0[k] > 0 else step
    return simplex


class _Objective:
    def __init__(self, z: np.ndarray):
        self.z = z
        self.n_evals = 0

    def __call__(self, zeta: np.ndarray) -> float:
        self.n_evals += 1
        zeta = np.clip(zeta, -1.0, 1.0)
        return float(neg_loglik_theta(_forward(zeta), self.z))


def _snap_to_faces(obj: _Objective, x: np.ndarray, fx: float, tol: float) -> tuple[np.ndarray, float]:
    """Move near-boundary coordinates onto the face unless that costs more than ``tol``.

    Differences below the optimizer's own tolerance are not resolvable, so
    such ties go to the face.
    """
    x = x.copy()
    for k in np.flatnonzero((np.abs(x) > 1.0 - SNAP_WINDOW) & (np.abs(x) < 1.0)):
        trial = x.copy()
        trial[k] = np.sign(x[k])
        ft = obj(trial)
        if ft <= fx + tol:
            x, fx = trial, ft
    return x, fx


def _probe_inward(obj: _Objective, x: np.ndarray, fx: float, tol: float):
    """Best strictly-better point found by stepping face coordinates inward.

    The clipped objective is flat outside the cube, so a simplex can stall on
    a face even when the likelihood still rises just inside it.
    """
    best = None
    for k in np.flatnonzero(np.abs(x) == 1.0):
        for step in INWARD_STEPS:
            trial = x.copy()
            trial[k] = np.sign(x[k]) * (1.0 - step)
            ft = obj(trial)
            if ft < fx - tol and (best is None or ft < best[1]):
                best = (trial, ft, step)
    return best


def _nelder_mead(obj: _Objective, x0: np.ndarray, step: float, opts: FitOptions):
    # inf - inf in the convergence test is harmless when every vertex is degenerate
    with np.errstate(invalid="ignore"):
        res = minimize(
            obj,
            x0,
            method="Nelder-Mead",
            bounds=[(-1.0, 1.0)] * opts.q,
            options={
                "initial_simplex": _initial_simplex(x0, step),
                "xatol": opts.x_tol,
                "fatol": opts.f_tol,
                "maxiter": opts.iteration_cap,
                "maxfev": 4 * opts.iteration_cap,
            },
        )
    x = np.clip(res.x, -1.0, 1.0)
    return x, obj(x), bool(res.success)


def _run_start(obj: _Objective, x0: np.ndarray, opts: FitOptions):
    x, fx, converged = _nelder_mead(obj, x0, opts.init_step, opts)
    if not np.isfinite(fx):
        return x, fx, converged
    # one restart from the optimum guards against a collapsed simplex
    x2, f2, ok2 = _nelder_mead(obj, x, min(opts.init_step, 0.05), opts)
    converged = converged and ok2
    if f2 <= fx:
        x, fx = x2, f2
    x, fx = _snap_to_faces(obj, x, fx, opts.f_tol)
    for _ in range(MAX_ESCAPES):
        probe = _probe_inward(obj, x, fx, opts.f_tol)
        if probe is None:
            break
        xp, fp, step = probe
        x3, f3, converged = _nelder_mead(obj, xp, step, opts)
        x, fx = (x3, f3) if f3 <= fp else (xp, fp)
        x, fx = _snap_to_faces(obj, x, fx, opts.f_tol)
    return x, fx, converged


def fit_ma(z, opts: FitOptions | int) -> FitResult:
    """Exact maximum likelihood MA(q) fit over the closed invertible region.

    Parameters
    ----------
    z : array_like
        Mean-zero series of length ``n > q``.
    opts : FitOptions or int
        Options, or just the order ``q`` to use the defaults.

    Returns
    -------
    FitResult
        The best local maximum across all starts.  Ties within ``1e-12`` go
        to the lowest start index.

    Raises
    ------
    TooShortSeriesError
        If ``n <= q``.
    ZeroSeriesError
        If the series is identically zero.
    AllStartsFailedError
        If every start ends at a degenerate likelihood.
    """
    if not isinstance(opts, FitOptions):
        opts = FitOptions(q=int(opts))
    z = as_series(z)
    q = opts.q
    if z.size <= q:
        raise TooShortSeriesError(f"need n > q, got n={z.size}, q={q}")
    if not np.any(z != 0.0):
        raise ZeroSeriesError("series is identically zero")

    obj = _Objective(z)
    best = None
    start_logliks = []
    for idx, x0 in enumerate(start_points(q, opts.n_starts, opts.seed)):
        x, fx, converged = _run_start(obj, x0, opts)
        start_logliks.append(-fx)
        if not np.isfinite(fx):
            continue
        if best is None or fx < best[1] - TIE_TOL:
            best = (x, fx, converged, idx)
    if best is None:
        raise AllStartsFailedError(f"all {opts.n_starts} starts failed for q={q}")

    zeta_hat, fx, converged, idx = best
    theta_hat = b_transform(zeta_hat)
    lv = innovations_loglikelihood(z, theta_hat)
    return FitResult(
        zeta_hat=zeta_hat,
        theta_hat=theta_hat,
        sigma2_hat=lv.sigma2_hat,
        loglik=-fx,
        boundary=boundary_flags(zeta_hat, opts.epsilon),
        converged=converged,
        n_evals=obj.n_evals,
        start_index=idx,
        start_logliks=tuple(start_logliks),
    )


def profile_curve(z, q: int, coordinate: int, grid, zeta=None, opts: FitOptions | None = None):
    """Concentrated log-likelihood along one partial-parameter coordinate.

    Other coordinates are held at ``zeta`` if given, otherwise at the values
    fitted by :func:`fit_ma`.  ``coordinate`` is zero-based.

    Returns
    -------
    list of (float, float)
        ``(zeta_coordinate, loglik)`` pairs in grid order.
    """
    z = as_series(z)
    if not 0 <= coordinate < q:
        raise IndexError(f"coordinate {coordinate} out of range for q={q}")
    grid = np.asarray(grid, dtype=np.float64)
    if np.any(np.abs(grid) > 1.0):
        raise ValueError("grid values must lie in [-1, 1]")
    if zeta is None:
        zeta = fit_ma(z, opts or FitOptions(q=q)).zeta_hat
    base = np.array(zeta, dtype=np.float64)
    if base.size != q:
        raise ValueError(f"zeta must have length {q}")
    out = []
    for g in grid:
        point = base.copy()
        point[coordinate] = g
        out.append((float(g), -float(neg_loglik_theta(_forward(point), z))))
    return out


def grid_fit_ma1(z, n_grid: int = 2001) -> tuple[float, float]:
    """Brute-force MA(1) maximizer over an evenly spaced grid on ``[-1, 1]``.

    Returns ``(zeta_hat, loglik)``; the lowest grid index wins ties.
    """
    z = as_series(z)
    grid = np.linspace(-1.0, 1.0, n_grid)
    values = np.array([-neg_loglik_theta(np.array([g]), z) for g in grid])
    i = int(np.argmax(values))
    return float(grid[i]), float(values[i])
