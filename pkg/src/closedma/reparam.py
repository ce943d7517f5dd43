"""Partial-autocorrelation style reparameterization of MA(q) coefficients.

The map ``b_transform`` sends the closed cube ``[-1, 1]^q`` onto the closed
invertible region of ``theta(B) = 1 - theta_1 B - ... - theta_q B^q``.  It is
one-to-one on the open cube only; ``b_pseudo_inverse`` extends the inverse to
the boundary by zeroing every level below the first coordinate that reaches
``+-1``.

Sign convention: the forward recursion subtracts and the inverse adds, i.e.

    theta[i, k]   = theta[i, k-1] - zeta_k * theta[k-i, k-1]
    theta[i, k-1] = (theta[i, k] + theta[k, k] * theta[k-i, k]) / (1 - theta[k, k]**2)

which gives ``B(zeta_1, zeta_2) = (zeta_1 (1 - zeta_2), zeta_2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NonFiniteInputError, NotInClosedRegionError, OutsideClosedCubeError

DEFAULT_EPSILON = 1e-6
# Guard band around |theta_kk| = 1 inside the pseudo-inverse.
EPS_DIV = 1e-12
# Absolute tolerance (scaled by 1 + max|theta|) for the self-inversive check at a boundary level.
SELF_INVERSIVE_TOL = 1e-6
LEAD_TRIM = 1e-14


@dataclass(frozen=True)
class BoundaryReport:
    """Per-coordinate boundary flags ``|1 - |zeta_i|| < epsilon``."""

    on_boundary: bool
    flags: tuple[bool, ...]
    epsilon: float

    def to_dict(self) -> dict:
        return {"on_boundary": self.on_boundary, "flags": list(self.flags), "epsilon": self.epsilon}


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError(f"{name} contains non-finite values: {arr}")
    return arr


def as_zeta(values) -> np.ndarray:
    """Validate a point of the closed cube and return it as a float array."""
    zeta = _as_vector(values, "zeta")
    if np.any(np.abs(zeta) > 1.0):
        raise OutsideClosedCubeError(f"zeta outside the closed cube [-1, 1]: {zeta}")
    return zeta


def as_theta(values) -> np.ndarray:
    return _as_vector(values, "theta")


@njit(cache=True)
def _forward(zeta):  # pragma: no cover - compiled
    q = zeta.shape[0]
    theta = np.zeros(q)
    prev = np.zeros(q)
    for k in range(q):
        zk = zeta[k]
        for i in range(k):
            theta[i] = prev[i] - zk * prev[k - 1 - i]
        theta[k] = zk
        for i in range(k + 1):
            prev[i] = theta[i]
    return theta


def b_transform(zeta) -> np.ndarray:
    """Map partial parameters in ``[-1, 1]^q`` to MA coefficients.

    Parameters
    ----------
    zeta : array_like
        Partial parameters ``(zeta_1, ..., zeta_q)``, each in ``[-1, 1]``.

    Returns
    -------
    numpy.ndarray
        ``(theta_1, ..., theta_q)`` in the closed invertible region.

    Examples
    --------
    >>> b_transform([0.5, 0.2])
    array([0.4, 0.2])
    """
    return _forward(as_zeta(zeta))


def boundary_flags(zeta, epsilon: float = DEFAULT_EPSILON) -> BoundaryReport:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    zeta = as_zeta(zeta)
    flags = tuple((np.abs(1.0 - np.abs(zeta)) < epsilon).tolist())
    return BoundaryReport(on_boundary=any(flags), flags=flags, epsilon=float(epsilon))


@njit(cache=True)
def _inverse(theta, eps_div, si_tol):  # pragma: no cover - compiled
    """Returns (zeta, status, level); status 1 = |theta_kk| > 1, 2 = not self-inversive."""
    q = theta.shape[0]
    scale = 1.0
    for i in range(q):
        scale = max(scale, 1.0 + abs(theta[i]))
    zeta = np.zeros(q)
    level = theta.copy()
    nxt = np.zeros(q)
    hit = False
    for k in range(q, 0, -1):
        tkk = level[k - 1]
        if abs(tkk) > 1.0 + eps_div:
            return zeta, 1, k
        if not hit and abs(tkk) >= 1.0 - eps_div:
            hit = True
            # every root of this level sits on the unit circle, so it must be self-inversive
            s = 1.0 if tkk > 0 else -1.0
            for i in range(k - 1):
                if abs(level[k - 2 - i] + s * level[i]) > si_tol * scale:
                    return zeta, 2, k
        zeta[k - 1] = min(max(tkk, -1.0), 1.0)
        if hit:
            for i in range(k - 1):
                level[i] = 0.0
        else:
            denom = 1.0 - tkk * tkk
            for i in range(k - 1):
                nxt[i] = (level[i] + tkk * level[k - 2 - i]) / denom
            for i in range(k - 1):
                level[i] = nxt[i]
    return zeta, 0, 0


def b_pseudo_inverse(theta, epsilon: float = DEFAULT_EPSILON) -> tuple[np.ndarray, BoundaryReport]:
    """Recover partial parameters from MA coefficients on the closed region.

    Inside the invertible region this is the exact inverse of
    :func:`b_transform`.  Once a level ``k`` has ``|theta_kk| >= 1 - EPS_DIV``
    every lower level is set to zero, so boundary coefficients land on a face
    of the cube.

    Parameters
    ----------
    theta : array_like
        MA coefficients ``(theta_1, ..., theta_q)``.
    epsilon : float
        Tolerance for the returned :class:`BoundaryReport`.

    Returns
    -------
    zeta : numpy.ndarray
    report : BoundaryReport

    Raises
    ------
    NotInClosedRegionError
        If some level has ``|theta_kk| > 1 + EPS_DIV``, or a level with
        ``|theta_kk| = 1`` is not self-inversive (a root strictly inside the
        unit circle).
    """
    theta = as_theta(theta)
    zeta, status, level = _inverse(theta, EPS_DIV, SELF_INVERSIVE_TOL)
    if status == 1:
        raise NotInClosedRegionError(
            f"|theta_{level},{level}| > 1 at level {level}; coefficients {theta} are not invertible"
        )
    if status == 2:
        raise NotInClosedRegionError(
            f"level {level} has |theta_kk| = 1 but roots inside the unit circle; {theta} not invertible"
        )
    return zeta, boundary_flags(zeta, epsilon)


def min_root_modulus(theta) -> float:
    """Smallest modulus among the roots of ``1 - theta_1 z - ... - theta_q z^q``.

    Uses companion-matrix eigenvalues (``numpy.roots``).  Returns ``inf`` when
    every coefficient is (relatively) zero.  Independent of the recursions above.
    """
    theta = as_theta(theta)
    coeffs = np.concatenate((-theta[::-1], [1.0]))
    # negligible leading terms only add roots of modulus >= LEAD_TRIM**(-1/q)
    keep = np.flatnonzero(np.abs(coeffs) > LEAD_TRIM * np.max(np.abs(coeffs)))
    if keep[0] == coeffs.size - 1:
        return float("inf")
    roots = np.roots(coeffs[keep[0]:])
    return float(np.min(np.abs(roots)))


def is_invertible(theta, tol: float = 1e-8) -> bool:
    """True if every root lies strictly outside the unit circle (by ``tol``)."""
    return min_root_modulus(theta) > 1.0 + tol
