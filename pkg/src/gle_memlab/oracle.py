"""Brute-force reference on a finite periodic chain.

Builds the full N x N lattice matrix, the block weight matrix Phi and
an orthonormal complement Psi, then evaluates kernel entries by dense
symmetric eigendecomposition.  This is the ground truth against which
the spectral quadrature path is checked.

Finite chains wrap waves around after roughly N / (2 v_max) time units
(v_max the maximal group velocity), after which the kernel revives; a
horizon estimate is provided so callers can stay below it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cg import WeightingScheme, constant_basis, hat_vectors
from .lattice import ForceConstants, dispersion, require_stable

__all__ = ["DenseChain", "build_dense", "theta_dense", "recurrence_horizon"]

MAX_DENSE_COMPLEMENT = 12288


@dataclass(frozen=True)
class DenseChain:
    """Finite periodic chain with its coarse-graining matrices.

    mu2 and W cache the eigendecomposition of Psi^T A Psi:
    mu2 holds the squared frequencies and W = X^T Psi^T A Phi the
    couplings, so kernel entries reduce to weighted cosine sums.
    """

    fc: ForceConstants
    N: int
    M: int
    scheme: WeightingScheme
    A: np.ndarray
    Phi: np.ndarray
    Psi: np.ndarray
    mu2: np.ndarray
    W: np.ndarray


def _periodic_lattice_matrix(fc: ForceConstants, N: int) -> np.ndarray:
    A = np.zeros((N, N))
    idx = np.arange(N)
    A[idx, idx] = fc.kappa0
    for shift, k in ((1, fc.kappa1), (2, fc.kappa2)):
        A[idx, (idx + shift) % N] += -k
        A[idx, (idx - shift) % N] += -k
    return A


def _weight_matrix(scheme, N, M):
    ncg = N // M
    Phi = np.zeros((N, ncg))
    if scheme is WeightingScheme.CONSTANT:
        col = np.full(M, 1.0 / np.sqrt(M))
        for n in range(ncg):
            Phi[n * M : (n + 1) * M, n] = col
    else:
        h1, h2, _ = hat_vectors(M)
        for n in range(ncg):
            Phi[n * M : (n + 1) * M, n] = h1
            # falling side wraps into the next block (periodically)
            nxt = (n + 1) % ncg
            Phi[nxt * M : (nxt + 1) * M, n] += h2
    return Phi


def build_dense(
    fc: ForceConstants, N: int, M: int, scheme: WeightingScheme
) -> DenseChain:
    """Assemble and factorize a periodic chain of N atoms in blocks of M."""
    require_stable(fc)
    if M < 2 or N % M != 0 or N < 4 * M:
        raise ValueError("need N a multiple of M with N >= 4M and M >= 2")
    ncg = N // M
    if N - ncg > MAX_DENSE_COMPLEMENT:
        raise ValueError(
            f"complement size {N - ncg} exceeds desk-scale cap {MAX_DENSE_COMPLEMENT}"
        )
    A = _periodic_lattice_matrix(fc, N)
    Phi = _weight_matrix(scheme, N, M)
    if scheme is WeightingScheme.CONSTANT:
        Q2 = constant_basis(M).Q2
        Psi = np.zeros((N, ncg * (M - 1)))
        for n in range(ncg):
            Psi[n * M : (n + 1) * M, n * (M - 1) : (n + 1) * (M - 1)] = Q2
    else:
        Psi = scipy.linalg.null_space(Phi.T)
    B = Psi.T @ A @ Psi
    B = 0.5 * (B + B.T)
    mu2, X = np.linalg.eigh(B)
    norm = np.max(np.abs(mu2))
    if mu2.min() < 1e-12 * norm:
        raise FloatingPointError(
            f"Psi^T A Psi nearly singular: min eigenvalue {mu2.min():.3e}"
        )
    W = X.T @ (Psi.T @ (A @ Phi))
    return DenseChain(
        fc=fc, N=N, M=M, scheme=scheme, A=A, Phi=Phi, Psi=Psi, mu2=mu2, W=W
    )


def theta_dense(chain: DenseChain, J: int, t: float) -> float:
    """Entry (0, J) of the finite-chain kernel at time t."""
    ncg = chain.N // chain.M
    if abs(J) >= ncg:
        raise ValueError("block offset outside the coarse lattice")
    horizon = recurrence_horizon(chain)
    if t > horizon:
        warnings.warn(
            f"t={t} beyond recurrence horizon {horizon:.2f}; finite-size revival likely",
            stacklevel=2,
        )
    coef = np.cos(np.sqrt(chain.mu2) * t) / chain.mu2
    return float(np.sum(coef * chain.W[:, 0] * chain.W[:, J % ncg]))


def recurrence_horizon(chain: DenseChain) -> float:
    """Time before periodic wraparound can re-excite the kernel: N / (2 v_max)."""
    v_max = max_group_velocity(chain.fc)
    return chain.N / (2.0 * v_max)


def max_group_velocity(fc: ForceConstants, grid_size: int = 4096) -> float:
    """Maximal |d omega / d xi'| of the dispersion, omega = sqrt(lambda).

    Sampled on a fine interior grid; the long-wave limit (the sound
    speed sqrt(kappa1 + 4 kappa2)) is included explicitly since the
    grid formula degenerates to 0/0 there.
    """
    xi = np.linspace(0.0, np.pi, grid_size + 1)[1:]
    lam = dispersion(fc, xi)
    dlam = 2.0 * fc.kappa1 * np.sin(xi) + 4.0 * fc.kappa2 * np.sin(2.0 * xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        dv = np.abs(dlam) / (2.0 * np.sqrt(np.maximum(lam, 0.0)))
    dv = dv[np.isfinite(dv)]
    sound = np.sqrt(fc.kappa1 + 4.0 * fc.kappa2)
    return float(max(np.max(dv), sound))
