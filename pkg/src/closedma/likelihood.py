"""Exact Gaussian likelihood of a mean-zero MA(q) series.

The innovations algorithm runs on the unit-variance autocovariances and the
innovation variance is profiled out, so the returned log-likelihood depends on
the MA coefficients only.  ``dense_loglikelihood`` factorizes the full
covariance matrix and exists to check the recursion.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numba import njit
from scipy import linalg

from .errors import DegenerateVarianceError, NonFiniteInputError, NotPositiveDefiniteError, ZeroSeriesError
from .reparam import as_theta

DENSE_MAX_N = 2000
LOG_2PI = math.log(2.0 * math.pi)


class LikelihoodValue(NamedTuple):
    concentrated_loglik: float
    sigma2_hat: float
    log_det_term: float


def as_series(values) -> np.ndarray:
    z = np.atleast_1d(np.asarray(values, dtype=np.float64))
    if z.ndim != 1 or z.size == 0:
        raise ValueError("series must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(z)):
        raise NonFiniteInputError("series contains non-finite values")
    return z


@njit(cache=True)
def _autocov(theta, max_lag):  # pragma: no cover - compiled
    q = theta.shape[0]
    psi = np.empty(q + 1)
    psi[0] = 1.0
    for j in range(q):
        psi[j + 1] = -theta[j]
    gamma = np.zeros(max_lag + 1)
    for k in range(min(q, max_lag) + 1):
        s = 0.0
        for j in range(q - k + 1):
            s += psi[j] * psi[j + k]
        gamma[k] = s
    return gamma


def ma_autocovariance(theta, max_lag: int | None = None) -> np.ndarray:
    """Autocovariances ``gamma_0..gamma_max_lag`` at unit innovation variance.

    >>> ma_autocovariance([0.5], 2)
    array([ 1.25, -0.5 ,  0.  ])
    """
    theta = as_theta(theta)
    if max_lag is None:
        max_lag = theta.size
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    return _autocov(theta, int(max_lag))


@njit(cache=True)
def _innovations(z, gamma):  # pragma: no cover - compiled
    """Banded innovations recursion.

    Returns (sum of e_t^2 / v_t, sum of log v_t, v, status) where status is
    0 on success and 1 if a prediction variance was non-positive.
    """
    n = z.shape[0]
    q = gamma.shape[0] - 1
    # c[t, j] is the coefficient on the innovation at lag j when predicting z[t]
    c = np.zeros((n, q + 1))
    v = np.empty(n)
    e = np.empty(n)
    v[0] = gamma[0]
    if v[0] <= 0.0:
        return 0.0, 0.0, v, 1
    e[0] = z[0]
    ssq = e[0] * e[0] / v[0]
    logdet = math.log(v[0])
    for t in range(1, n):
        lo = t - q if t > q else 0
        for k in range(lo, t):
            acc = gamma[t - k]
            jlo = lo if lo > k - q else k - q
            if jlo < 0:
                jlo = 0
            for j in range(jlo, k):
                acc -= c[k, k - j] * c[t, t - j] * v[j]
            c[t, t - k] = acc / v[k]
        vt = gamma[0]
        for j in range(lo, t):
            cj = c[t, t - j]
            vt -= cj * cj * v[j]
        if vt <= 0.0:
            return 0.0, 0.0, v, 1
        v[t] = vt
        pred = 0.0
        for j in range(1, t - lo + 1):
            pred += c[t, j] * e[t - j]
        e[t] = z[t] - pred
        ssq += e[t] * e[t] / vt
        logdet += math.log(vt)
    return ssq, logdet, v, 0


@njit(cache=True)
def _concentrated(ssq, logdet, n):  # pragma: no cover - compiled
    sigma2 = ssq / n
    return -0.5 * n * (math.log(2.0 * math.pi * sigma2) + 1.0) - 0.5 * logdet


@njit(cache=True)
def neg_loglik_theta(theta, z):  # pragma: no cover - compiled
    """Negative concentrated log-likelihood, ``inf`` when degenerate."""
    gamma = _autocov(theta, theta.shape[0])
    ssq, logdet, _, status = _innovations(z, gamma)
    if status != 0 or not ssq > 0.0:
        return np.inf
    return -_concentrated(ssq, logdet, z.shape[0])


def prediction_variances(z, theta) -> np.ndarray:
    """One-step prediction variances ``v_0..v_{n-1}`` (unit innovation variance)."""
    z = as_series(z)
    theta = as_theta(theta)
    _, _, v, status = _innovations(z, _autocov(theta, theta.size))
    if status != 0:
        raise DegenerateVarianceError(f"non-positive prediction variance for theta={theta}")
    return v


def innovations_loglikelihood(z, theta) -> LikelihoodValue:
    """Concentrated exact log-likelihood via the innovations algorithm.

    Cost is ``O(n q^2)``; the recursion consumes autocovariances only and so
    stays valid for coefficients on the unit-root boundary.

    Raises
    ------
    DegenerateVarianceError
        A prediction variance ``v_t <= 0``.
    ZeroSeriesError
        The weighted residual sum of squares is zero.
    """
    z = as_series(z)
    theta = as_theta(theta)
    ssq, logdet, _, status = _innovations(z, _autocov(theta, theta.size))
    if status != 0:
        raise DegenerateVarianceError(f"non-positive prediction variance for theta={theta}")
    if not ssq > 0.0:
        raise ZeroSeriesError("residual sum of squares is zero")
    n = z.size
    return LikelihoodValue(float(_concentrated(ssq, logdet, n)), float(ssq / n), float(logdet))


def dense_loglikelihood(z, theta) -> LikelihoodValue:
    """Same quantities as :func:`innovations_loglikelihood` from a Cholesky factor."""
    z = as_series(z)
    theta = as_theta(theta)
    n = z.size
    if n > DENSE_MAX_N:
        raise ValueError(f"dense likelihood limited to n <= {DENSE_MAX_N}")
    gamma = ma_autocovariance(theta, n - 1)
    cov = linalg.toeplitz(gamma)
    try:
        chol = linalg.cho_factor(cov, lower=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    quad = float(z @ linalg.cho_solve(chol, z))
    if not quad > 0.0:
        raise ZeroSeriesError("quadratic form is zero")
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol[0]))))
    sigma2 = quad / n
    loglik = -0.5 * n * (LOG_2PI + math.log(sigma2) + 1.0) - 0.5 * logdet
    return LikelihoodValue(loglik, sigma2, logdet)
