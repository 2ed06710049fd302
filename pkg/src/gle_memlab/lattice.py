"""One-dimensional harmonic lattice with first- and second-neighbor springs.

The lattice operator acts on displacements as

    (A u)_j = -k2 u_{j-2} - k1 u_{j-1} + k0 u_j - k1 u_{j+1} - k2 u_{j+2},

with k0 = 2(k1 + k2).  Grouping atoms into blocks of M turns A into a
block-tridiagonal Toeplitz form with blocks A0 (diagonal) and A1 / A1^T
(off-diagonal).  Its Fourier symbol at angle xi is the M x M Hermitian
matrix

    A_hat(xi) = A0 + exp(-i xi) A1 + exp(+i xi) A1^T,

whose eigenpairs are available in closed form (plane waves sampled at
the folded wavenumbers xi'_j = (xi - 2 pi + 2 pi j) / M).

Mass and lattice constant are fixed to 1 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "StabilityError",
    "ForceConstants",
    "BlockPair",
    "SymbolMatrix",
    "validate_stability",
    "require_stable",
    "assemble_blocks",
    "symbol",
    "dispersion",
    "folded_wavenumbers",
    "analytic_eigenpairs",
]


class StabilityError(ValueError):
    """Force constants violate the phonon stability conditions."""


@dataclass(frozen=True)
class ForceConstants:
    """Spring stiffnesses of the chain.

    kappa1 couples nearest neighbors, kappa2 second neighbors; the
    on-site constant kappa0 = 2(kappa1 + kappa2) follows from
    translation invariance and is exposed as a property.
    """

    kappa1: float
    kappa2: float

    @property
    def kappa0(self) -> float:
        return 2.0 * (self.kappa1 + self.kappa2)


@dataclass(frozen=True)
class BlockPair:
    """Diagonal and super/sub-diagonal blocks of the block-Toeplitz operator."""

    A0: np.ndarray
    A1: np.ndarray


@dataclass(frozen=True)
class SymbolMatrix:
    """Fourier symbol of the lattice operator at a single angle."""

    xi: float
    entries: np.ndarray


def validate_stability(fc: ForceConstants) -> bool:
    """Return True iff the phonon dispersion is nonnegative.

    The conditions are strict: kappa1 > 0 and kappa1 + 4 kappa2 > 0.
    """
    return fc.kappa1 > 0.0 and fc.kappa1 + 4.0 * fc.kappa2 > 0.0


def require_stable(fc: ForceConstants) -> None:
    if not validate_stability(fc):
        raise StabilityError(
            f"unstable force constants: kappa1={fc.kappa1}, kappa2={fc.kappa2} "
            "(need kappa1 > 0 and kappa1 + 4*kappa2 > 0)"
        )


def assemble_blocks(fc: ForceConstants, M: int) -> BlockPair:
    """Build the M x M blocks A0 and A1 of the block-Toeplitz operator.

    A0 is symmetric banded (diagonal kappa0, first off-diagonal -kappa1,
    second -kappa2).  A1 couples a block to its left neighbor and has
    nonzeros only in the upper-right corner.
    """
    if M < 2:
        raise ValueError("block too small for second-neighbor coupling (need M >= 2)")
    k1, k2, k0 = fc.kappa1, fc.kappa2, fc.kappa0
    A0 = np.zeros((M, M))
    np.fill_diagonal(A0, k0)
    idx = np.arange(M - 1)
    A0[idx, idx + 1] = -k1
    A0[idx + 1, idx] = -k1
    if M >= 3:
        idx = np.arange(M - 2)
        A0[idx, idx + 2] = -k2
        A0[idx + 2, idx] = -k2
    A1 = np.zeros((M, M))
    A1[0, M - 1] = -k1
    A1[0, M - 2] += -k2
    A1[1, M - 1] += -k2
    return BlockPair(A0=A0, A1=A1)


def symbol(fc: ForceConstants, M: int, xi: float) -> SymbolMatrix:
    """Evaluate the Hermitian Fourier symbol A_hat(xi)."""
    blocks = assemble_blocks(fc, M)
    entries = (
        blocks.A0.astype(complex)
        + np.exp(-1j * xi) * blocks.A1
        + np.exp(1j * xi) * blocks.A1.T
    )
    return SymbolMatrix(xi=xi, entries=entries)


def dispersion(fc: ForceConstants, xi_prime):
    """Phonon dispersion lambda(xi') = k0 - 2 k1 cos(xi') - 2 k2 cos(2 xi')."""
    xi_prime = np.asarray(xi_prime, dtype=float)
    return (
        fc.kappa0
        - 2.0 * fc.kappa1 * np.cos(xi_prime)
        - 2.0 * fc.kappa2 * np.cos(2.0 * xi_prime)
    )


def folded_wavenumbers(M: int, xi: float) -> np.ndarray:
    """Wavenumbers xi'_j = (xi - 2 pi + 2 pi j) / M, j = 0..M-1.

    The shift by -2 pi puts the acoustic zero mode at j = 0 when
    xi = 2 pi, and makes the plane wave with phase exp(i k xi'_j) an
    exact eigenvector of the exp(-i xi) A1 symbol convention.
    """
    j = np.arange(M)
    return (xi - 2.0 * np.pi + 2.0 * np.pi * j) / M


def analytic_eigenpairs(fc: ForceConstants, M: int, xi: float):
    """Closed-form eigenpairs of the symbol A_hat(xi).

    Returns (lams, vecs) with lams[j] the eigenvalue and vecs[:, j] the
    unit plane-wave eigenvector exp(i k xi'_j) / sqrt(M), k = 0..M-1.
    The eigenvalues are not sorted; they follow the j-labeling of the
    folded wavenumbers.
    """
    xi_p = folded_wavenumbers(M, xi)
    lams = dispersion(fc, xi_p)
    k = np.arange(M)[:, None]
    vecs = np.exp(1j * k * xi_p[None, :]) / np.sqrt(M)
    return lams, vecs
