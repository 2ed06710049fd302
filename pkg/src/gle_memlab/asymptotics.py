"""Closed-form bounds, eigenvalue branches, and decay-rate estimation.

This module gathers the analysis-side objects: the t = 0 bounds for
both weighting schemes, continuously labeled eigenvalue branches of
the compressed symbol with interlacing/simplicity checks, the rank-one
characteristic polynomial whose roots those branches are, a
stationary-phase amplitude estimate for the long-time envelope, and
least-squares decay fits for sampled kernel series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cg import WeightingScheme
from .kernel import KernelSeries, _node_modes
from .lattice import (
    ForceConstants,
    analytic_eigenpairs,
    dispersion,
    folded_wavenumbers,
    require_stable,
)

__all__ = [
    "EigenBranches",
    "DecayFit",
    "bound_constant",
    "bound_linear",
    "eigen_branches",
    "char_weights",
    "char_poly",
    "char_poly_residual",
    "branch_amplitude_caps",
    "stationary_phase_estimate",
    "stationary_phase_envelope",
    "fit_decay_rate",
]


@dataclass(frozen=True)
class EigenBranches:
    """Sorted eigenvalue curves mu_j(xi) of the compressed symbol.

    branches has shape (M-1, len(xi_grid)); min_gap is the smallest
    separation between adjacent branches over the grid.  For M > 4 the
    branches never touch on (0, 2 pi), so per-node ascending sort is
    the smooth labeling.
    """

    M: int
    xi_grid: np.ndarray
    branches: np.ndarray
    min_gap: float


@dataclass(frozen=True)
class DecayFit:
    """Least-squares decay fit of a kernel series in log space."""

    exponent: float
    prefactor: float
    residual: float
    window: tuple


def bound_constant(fc: ForceConstants, M: int) -> float:
    """Upper bound on Theta_{0,0}(0) for the constant scheme: (2 k1 + 4 k2)/M."""
    require_stable(fc)
    if M < 2:
        raise ValueError("need M >= 2")
    return (2.0 * fc.kappa1 + 4.0 * fc.kappa2) / M


def bound_linear(fc: ForceConstants, M: int) -> float:
    """Upper bound on Theta_{0,0}(0) for the linear scheme, O(M^-2)."""
    require_stable(fc)
    if M < 2:
        raise ValueError("need M >= 2")
    num = 2.0 * M * fc.kappa1 + 8.0 * M * fc.kappa2 - 6.0 * fc.kappa2
    return num / (M * (2.0 * M**2 + 1.0) / 3.0)


def eigen_branches(
    fc: ForceConstants, M: int, grid_size: int = 1024
) -> EigenBranches:
    """Eigenvalue branches of the constant-scheme compressed symbol.

    Verifies Cauchy interlacing against the analytic symbol spectrum
    at every node; a violation indicates an implementation bug and
    raises.
    """
    require_stable(fc)
    if M < 2:
        raise ValueError("need M >= 2")
    xi_grid = np.linspace(0.0, 2.0 * np.pi, grid_size + 2)[1:-1]
    branches = np.empty((M - 1, xi_grid.size))
    for i, xi in enumerate(xi_grid):
        mu2, _, _ = _node_modes(WeightingScheme.CONSTANT, fc, M, xi, None)
        mu = np.sqrt(mu2)
        lam = np.sort(analytic_eigenpairs(fc, M, xi)[0])
        tol = 1e-10 * np.max(np.abs(lam))
        if np.any(mu2 - lam[:-1] < -tol) or np.any(lam[1:] - mu2 < -tol):
            raise RuntimeError(f"interlacing violated at xi={xi}")
        branches[:, i] = mu
    gaps = np.diff(branches, axis=0)
    min_gap = float(gaps.min()) if gaps.size else np.inf
    return EigenBranches(M=M, xi_grid=xi_grid, branches=branches, min_gap=min_gap)


def char_weights(fc: ForceConstants, M: int, xi: float) -> np.ndarray:
    """Rank-one coupling weights w_j = lambda_j |v_j^* phi|^2 in closed form."""
    xi_p = folded_wavenumbers(M, xi)
    return (
        2.0
        * (1.0 - np.cos(xi))
        / M**2
        * (fc.kappa1 + 2.0 * fc.kappa2 * (1.0 + np.cos(xi_p)))
    )


def _char_terms(mu: float, fc: ForceConstants, M: int, xi: float):
    """Normalized product terms of the characteristic polynomial.

    Everything is scaled by the spectral radius so the M factors stay
    O(1) and the evaluation neither overflows nor loses the scale.
    """
    lam = dispersion(fc, folded_wavenumbers(M, xi))
    w = char_weights(fc, M, xi)
    norm = np.max(np.abs(lam))
    lam_n, w_n, mu_n = lam / norm, w / norm, mu / norm
    diff = mu_n - lam_n
    t0 = np.prod(diff)
    terms = np.empty(M)
    for j in range(M):
        terms[j] = w_n[j] * np.prod(np.delete(diff, j))
    return t0, terms


def char_poly(mu: float, fc: ForceConstants, M: int, xi: float) -> float:
    """Characteristic polynomial of the compressed symbol, normalized units.

    prod_j(mu - lambda_j) + sum_j w_j prod_{k != j}(mu - lambda_k)
    vanishes exactly at the M - 1 eigenvalues of the constant-scheme
    compression (plus mu = 0): by the matrix determinant lemma it
    equals mu times the characteristic polynomial of the compression.
    Note the plus sign -- writing mu I - (Lambda - Lambda z z*) as
    (mu I - Lambda) + Lambda z z* makes the rank-one correction enter
    with a positive sign.
    """
    if not (0.0 < xi < 2.0 * np.pi):
        raise ValueError("need xi in (0, 2 pi)")
    t0, terms = _char_terms(mu, fc, M, xi)
    return float(t0 + np.sum(terms))


def char_poly_residual(mu: float, fc: ForceConstants, M: int, xi: float) -> float:
    """|char_poly| relative to the largest contributing term."""
    t0, terms = _char_terms(mu, fc, M, xi)
    scale = max(abs(t0), np.max(np.abs(terms)), 1e-300)
    return abs(t0 + np.sum(terms)) / scale


def _sorted_mode_data(fc: ForceConstants, M: int, xi: float):
    mu2, g2, scale = _node_modes(WeightingScheme.CONSTANT, fc, M, xi, None)
    return np.sqrt(mu2), scale * g2


def stationary_phase_estimate(fc: ForceConstants, M: int, j: int, t):
    """Long-time amplitude of branch j's contribution to Theta_{0,0}(t).

    The branch phase mu_j(xi) is stationary at xi = pi by symmetry; the
    estimate is (1/2 pi) f(pi) sqrt(2 pi / (t |mu_j''(pi)|)) with
    f = |g_j|^2 / mu_j^2 the integrand amplitude.  mu_j''(pi) is taken
    by 5-point central differences with a Richardson consistency check.
    """
    require_stable(fc)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("need t > 0")
    d2 = _branch_second_derivative(fc, M, j, h=2.0 * np.pi / 4096)
    d2_coarse = _branch_second_derivative(fc, M, j, h=4.0 * np.pi / 4096)
    if abs(d2) < 1e-10:
        raise FloatingPointError("degenerate stationary point; estimate invalid")
    if abs(d2 - d2_coarse) > 0.01 * abs(d2):
        raise FloatingPointError("second derivative estimate not converged")
    mu_pi, g2_pi = _sorted_mode_data(fc, M, np.pi)
    f_pi = g2_pi[j] / mu_pi[j] ** 2
    return f_pi * np.sqrt(2.0 * np.pi / (t * abs(d2))) / (2.0 * np.pi)


def branch_amplitude_caps(fc: ForceConstants, M: int, quad_nodes: int = 256):
    """Per-branch t = 0 amplitude caps (1/2 pi) int f_j(xi) d xi.

    |int f_j cos(mu_j t) d xi| can never exceed the integral of f_j, so
    the cap bounds branch j's contribution at every t; the caps sum to
    Theta_{0,0}(0).  Useful where a branch is so flat near the zone
    edge that the leading-order stationary-phase amplitude has not set
    in yet and would wildly overshoot.
    """
    require_stable(fc)
    nodes = 2.0 * np.pi * (np.arange(quad_nodes) + 0.5) / quad_nodes
    caps = np.zeros(M - 1)
    for xi in nodes:
        mu2, g2, scale = _node_modes(WeightingScheme.CONSTANT, fc, M, xi, None)
        caps += scale * g2 / mu2
    return caps / quad_nodes


def stationary_phase_envelope(fc: ForceConstants, M: int, t, quad_nodes: int = 256):
    """Predicted envelope of |Theta_{0,0}(t)| from the branch estimates.

    Each branch contributes min(stationary-phase amplitude, t = 0 cap):
    the asymptotic amplitude diverges for the nearly flat branches at
    the band edge, where the branch in truth still oscillates
    coherently at its cap.  The branch frequencies mu_j(pi) are
    incommensurate, so the typical peak height of the sum is the
    root-sum-square of the branch amplitudes (random-phase addition),
    not the coherent sum, which is attained only at rare
    near-coherent instants.
    """
    t = np.asarray(t, dtype=float)
    caps = branch_amplitude_caps(fc, M, quad_nodes=quad_nodes)
    total = np.zeros_like(t)
    for j in range(M - 1):
        amp = np.minimum(stationary_phase_estimate(fc, M, j, t), caps[j])
        total += amp**2
    return np.sqrt(total)


def _branch_second_derivative(fc: ForceConstants, M: int, j: int, h: float) -> float:
    xs = np.pi + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    mu = np.array([_sorted_mode_data(fc, M, x)[0][j] for x in xs])
    return float(
        (-mu[0] + 16.0 * mu[1] - 30.0 * mu[2] + 16.0 * mu[3] - mu[4]) / (12.0 * h**2)
    )


def fit_decay_rate(series: KernelSeries, mode: str) -> DecayFit:
    """Fit the decay of a kernel series in log space.

    mode "loglog_envelope": extract the upper envelope of |value| and
    fit log|value| against log(coordinate), giving a power-law
    exponent.  The envelope is the strict local maxima (min separation
    2 samples) refined by a second maxima pass, so only the peaks of
    the peaks -- the true upper envelope of a beating oscillation --
    enter the fit; a single pass would drag the fit down onto the
    interference minima.  Each pass falls back to its input when it
    would leave fewer than 8 samples (e.g. for monotone series, where
    there are no interior maxima and all samples are the envelope).
    mode "loglinear": fit log|value| against the coordinate directly,
    giving an exponential rate.
    """
    coords = np.asarray(series.coordinates, dtype=float)
    vals = np.abs(np.asarray(series.values, dtype=float))
    if mode == "loglog_envelope":
        for _ in range(2):
            peaks = _local_maxima(vals, min_separation=2)
            if peaks.size < 8:
                break
            coords, vals = coords[peaks], vals[peaks]
    elif mode != "loglinear":
        raise ValueError(f"unknown fit mode: {mode}")
    keep = vals > 0.0
    coords, vals = coords[keep], vals[keep]
    if mode == "loglog_envelope":
        keep = coords > 0.0
        coords, vals = coords[keep], vals[keep]
    if coords.size < 8:
        raise ValueError(f"only {coords.size} usable samples; need at least 8")
    x = np.log(coords) if mode == "loglog_envelope" else coords
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return DecayFit(
        exponent=float(slope),
        prefactor=float(np.exp(intercept)),
        residual=resid,
        window=(float(coords[0]), float(coords[-1])),
    )


def _local_maxima(vals: np.ndarray, min_separation: int = 2) -> np.ndarray:
    idx = [
        i
        for i in range(1, len(vals) - 1)
        if vals[i] > vals[i - 1] and vals[i] > vals[i + 1]
    ]
    kept: list[int] = []
    for i in idx:
        if not kept or i - kept[-1] >= min_separation:
            kept.append(i)
    return np.array(kept, dtype=int)
