"""Memory-kernel entries by Brillouin-zone quadrature.

Every kernel entry is an integral over the zone angle xi of a scalar
built from the lattice symbol and the coarse-graining symbols.  The
integrands are smooth and 2 pi periodic, so a midpoint rule converges
spectrally; the midpoint grid also avoids xi = 2 pi where the lattice
symbol has its acoustic zero mode.

Two evaluation paths exist:

* the general path eigendecomposes the compressed symbol
  psi0* A_hat psi0 at each node and sums cos(mu t) |g|^2 / mu^2 over
  the modes (the matrix cosine and inverse are applied through the
  same eigendecomposition, never formed);

* a fast t = 0 path uses the Schur-complement simplification, which
  needs only plane-wave projections of the weight vector and costs
  one FFT per node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cg import (
    CGSymbolPair,
    ConstantBasis,
    LinearBasis,
    WeightingScheme,
    cg_symbols,
    constant_basis,
    hat_vectors,
    linear_basis,
)
from .lattice import (
    ForceConstants,
    analytic_eigenpairs,
    dispersion,
    folded_wavenumbers,
    require_stable,
    symbol,
)

__all__ = [
    "QuadratureGrid",
    "KernelSeries",
    "midpoint_grid",
    "theta_entry",
    "theta00_zero_simplified",
    "theta_time_series",
    "theta_spatial_series",
]

DEFAULT_QUAD_NODES = 2048


@dataclass(frozen=True)
class QuadratureGrid:
    """Midpoint rule on (0, 2 pi): nodes 2 pi (k + 1/2) / K, weight 2 pi / K."""

    K: int
    nodes: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class KernelSeries:
    """Kernel samples along a time or block-offset axis."""

    scheme: WeightingScheme
    M: int
    axis: str  # "time" or "space"
    coordinates: np.ndarray
    values: np.ndarray
    quad_nodes: int
    max_imag_residual: float


def midpoint_grid(K: int = DEFAULT_QUAD_NODES) -> QuadratureGrid:
    if K < 2:
        raise ValueError("need at least 2 quadrature nodes")
    k = np.arange(K)
    nodes = 2.0 * np.pi * (k + 0.5) / K
    weights = np.full(K, 2.0 * np.pi / K)
    return QuadratureGrid(K=K, nodes=nodes, weights=weights)


def _weight_mode_projections(scheme, fc, M, nodes, dtype=np.float64):
    """Eigenvalues and squared plane-wave projections of the weight symbol.

    For each node xi, lams[k, j] is the analytic symbol eigenvalue at
    the folded wavenumber xi'_j and z2[k, j] = |v_j^* phi_hat(xi)|^2.
    For the constant scheme the projection is the closed-form geometric
    sum (which also supports extended precision); for the linear scheme
    it is a DFT of the weight vector twisted by the per-node fractional
    phase, evaluated with an FFT along the modes.
    """
    nodes = np.asarray(nodes, dtype=dtype)
    two_pi = 2 * np.asarray(np.pi, dtype=dtype)
    # work with the distance to the zone edge: half-angle forms in delta
    # avoid the catastrophic cancellation of 1 - cos(xi) near xi = 2 pi
    delta = two_pi - nodes
    j = np.arange(M, dtype=dtype)
    xi_p = (two_pi * j[None, :] - delta[:, None]) / M
    k1 = np.asarray(fc.kappa1, dtype=dtype)
    k2 = np.asarray(fc.kappa2, dtype=dtype)
    sin_half = np.sin(xi_p / 2)
    lams = 4 * k1 * sin_half**2 + 4 * k2 * np.sin(xi_p) ** 2
    if scheme is WeightingScheme.CONSTANT:
        # |(1/M) sum_k exp(-i k xi'_j)|^2 = (sin(xi/2) / (M sin(xi'_j/2)))^2
        z2 = (np.sin(delta / 2)[:, None] / (M * sin_half)) ** 2
    else:
        h1, h2, _ = hat_vectors(M)
        x = h1[None, :] + np.exp(-1j * nodes.astype(float))[:, None] * h2[None, :]
        k = np.arange(M)
        twist = np.exp(-1j * k[None, :] * ((nodes.astype(float)[:, None] - 2.0 * np.pi) / M))
        z = np.fft.fft(x * twist, axis=1) / np.sqrt(M)
        z2 = (np.abs(z) ** 2).astype(dtype)
    return lams, z2


def _simplified_integrand(scheme, fc, M, nodes, dtype=np.float64):
    """Schur-complement t = 0 integrand at each node.

    Constant scheme:  phi* A phi - (phi* A^-1 phi)^-1.
    Linear scheme:    phi* A phi - (phi* A^-1 phi)^-1 (phi* phi)^2,
    both expressed through the analytic mode sums.
    """
    lams, z2 = _weight_mode_projections(scheme, fc, M, nodes, dtype=dtype)
    if np.any(lams <= 0.0):
        raise FloatingPointError("symbol singular at a quadrature node")
    first = np.sum(lams * z2, axis=1)
    inv = np.sum(z2 / lams, axis=1)
    if scheme is WeightingScheme.CONSTANT:
        return first - 1.0 / inv
    nrm2 = np.sum(z2, axis=1)
    return first - nrm2**2 / inv


def _node_modes(scheme, fc, M, xi, basis):
    """Eigendecomposition data of the compressed symbol at one node.

    Returns (mu2, g2, scale): squared frequencies of psi0* A psi0,
    squared couplings |U* psi0* A phi0|^2, and the scalar weight-norm
    factor (phi_hat* phi_hat for the linear scheme, 1 otherwise).
    """
    A = symbol(fc, M, xi).entries
    pair = cg_symbols(scheme, M, xi, basis=basis)
    psi0, phi0 = pair.psi0, pair.phi0
    B = psi0.conj().T @ A @ psi0
    B = 0.5 * (B + B.conj().T)
    mu2, U = np.linalg.eigh(B)
    norm = np.max(np.abs(analytic_eigenpairs(fc, M, xi)[0]))
    if mu2.min() < 1e-13 * norm:
        raise FloatingPointError(
            f"compressed symbol nearly singular at xi={xi}: min eig {mu2.min():.3e}"
        )
    g = U.conj().T @ (psi0.conj().T @ (A @ phi0[:, 0]))
    if scheme is WeightingScheme.LINEAR:
        scale = float(np.real(pair.phi_hat.conj().T @ pair.phi_hat)[0, 0])
    else:
        scale = 1.0
    return mu2, np.abs(g) ** 2, scale


def theta_entry(
    scheme: WeightingScheme,
    fc: ForceConstants,
    M: int,
    J: int,
    t: float,
    grid: QuadratureGrid | None = None,
    basis: ConstantBasis | LinearBasis | None = None,
) -> float:
    """Kernel entry Theta_{0,J}(t) via the general eigendecomposition path."""
    require_stable(fc)
    if t < 0.0:
        raise ValueError("need t >= 0")
    grid = grid if grid is not None else midpoint_grid()
    total = 0.0 + 0.0j
    for xi, w in zip(grid.nodes, grid.weights):
        mu2, g2, scale = _node_modes(scheme, fc, M, xi, basis)
        s = scale * np.sum(np.cos(np.sqrt(mu2) * t) * g2 / mu2)
        total += w * np.exp(1j * J * xi) * s
    return float(np.real(total)) / (2.0 * np.pi)


def theta00_zero_simplified(
    scheme: WeightingScheme,
    fc: ForceConstants,
    M: int,
    grid: QuadratureGrid | None = None,
) -> float:
    """Theta_{0,0}(0) via the fast Schur-complement path."""
    require_stable(fc)
    grid = grid if grid is not None else midpoint_grid()
    s = _simplified_integrand(scheme, fc, M, grid.nodes)
    return float(np.sum(grid.weights * s)) / (2.0 * np.pi)


def theta_time_series(
    scheme: WeightingScheme,
    fc: ForceConstants,
    M: int,
    t_grid,
    grid: QuadratureGrid | None = None,
    basis: ConstantBasis | LinearBasis | None = None,
) -> KernelSeries:
    """Samples of Theta_{0,0}(t) on an ascending nonnegative time grid.

    The per-node eigendecomposition is computed once and reused for
    every time sample.
    """
    require_stable(fc)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or np.any(t_grid < 0.0) or np.any(np.diff(t_grid) < 0.0):
        raise ValueError("time grid must be nonnegative and ascending")
    grid = grid if grid is not None else midpoint_grid()
    values = np.zeros(t_grid.size)
    for xi, w in zip(grid.nodes, grid.weights):
        mu2, g2, scale = _node_modes(scheme, fc, M, xi, basis)
        mu = np.sqrt(mu2)
        values += w * scale * (np.cos(np.outer(t_grid, mu)) @ (g2 / mu2))
    values /= 2.0 * np.pi
    return KernelSeries(
        scheme=scheme,
        M=M,
        axis="time",
        coordinates=t_grid,
        values=values,
        quad_nodes=grid.K,
        max_imag_residual=0.0,
    )


def theta_spatial_series(
    scheme: WeightingScheme,
    fc: ForceConstants,
    M: int,
    J_max: int,
    grid: QuadratureGrid | None = None,
) -> KernelSeries:
    """Samples of Theta_{0,J}(0) for J = 0..J_max (fast t = 0 path).

    Far entries decay below double-precision resolution, so for the
    constant scheme (closed-form integrand) the quadrature runs in
    extended precision; the returned samples are float64.
    """
    require_stable(fc)
    if J_max < 1:
        raise ValueError("need J_max >= 1")
    grid = grid if grid is not None else midpoint_grid()
    dtype = np.longdouble if scheme is WeightingScheme.CONSTANT else np.float64
    # rebuild the midpoint nodes in the working precision; float64 node
    # positions alone would cap the far-J coefficients near 1e-17
    two_pi_d = 2 * np.asarray(np.pi, dtype=dtype)
    nodes = two_pi_d * (np.arange(grid.K, dtype=dtype) + dtype(0.5)) / grid.K
    weights = np.full(grid.K, two_pi_d / grid.K)
    s = _simplified_integrand(scheme, fc, M, nodes, dtype=dtype)
    J = np.arange(J_max + 1)
    two_pi = 2 * np.asarray(np.pi, dtype=dtype)
    ws = weights * s
    values = (np.cos(np.outer(J, nodes)) @ ws / two_pi).astype(float)
    resid = float(np.max(np.abs(np.sin(np.outer(J, nodes)) @ ws / two_pi)))
    return KernelSeries(
        scheme=scheme,
        M=M,
        axis="space",
        coordinates=J.astype(float),
        values=values,
        quad_nodes=grid.K,
        max_imag_residual=resid,
    )
