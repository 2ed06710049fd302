"""Coarse-graining bases and their per-angle Fourier symbols.

Two weighting schemes are supported:

* constant: each block of M atoms is averaged with the flat weight
  vector Q1 = (1,...,1)/sqrt(M).  The complement Q2 is any orthonormal
  completion; we use a deterministic Householder completion.

* linear: overlapping hat weights spanning two adjacent blocks, split
  into the rising side h1 = (1,...,M)/c and the falling side
  h2 = (M-1,...,1,0)/c with c = sqrt((2 M^3 + M)/3).  The complement
  is a lower block-bidiagonal form with blocks (H1, H2) constrained by
  cross-shift orthogonality to the hats.

The kernel depends on the complement only through its range, which is
the orthogonal complement of the weight symbol at every angle, so any
valid choice of Q2 or (H1, H2) yields the same kernel values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WeightingScheme",
    "ConstantBasis",
    "LinearBasis",
    "CGSymbolPair",
    "constant_basis",
    "linear_basis",
    "randomized_constant_basis",
    "randomized_linear_basis",
    "cg_symbols",
]


class WeightingScheme(enum.Enum):
    CONSTANT = "constant"
    LINEAR = "linear"


@dataclass(frozen=True)
class ConstantBasis:
    """Flat block weight Q1 and an orthonormal complement Q2."""

    Q1: np.ndarray
    Q2: np.ndarray


@dataclass(frozen=True)
class LinearBasis:
    """Hat weight halves (h1, h2) and complement blocks (H1, H2)."""

    h1: np.ndarray
    h2: np.ndarray
    c: float
    H1: np.ndarray
    H2: np.ndarray


@dataclass(frozen=True)
class CGSymbolPair:
    """Weight and complement symbols at one angle, raw and orthonormalized."""

    xi: float
    phi_hat: np.ndarray
    psi_hat: np.ndarray
    phi0: np.ndarray
    psi0: np.ndarray


def constant_basis(M: int) -> ConstantBasis:
    """Flat weight plus a deterministic Householder completion.

    The completion is the trailing M-1 columns of the Householder
    reflector mapping e_1 to Q1, with the sign fixed so the result is
    reproducible.
    """
    if M < 2:
        raise ValueError("need M >= 2")
    q1 = np.full(M, 1.0 / np.sqrt(M))
    w = q1.copy()
    w[0] -= 1.0  # reflector direction for H e_1 = q1
    if np.linalg.norm(w) < 1e-15:
        H = np.eye(M)
    else:
        w /= np.linalg.norm(w)
        H = np.eye(M) - 2.0 * np.outer(w, w)
    return ConstantBasis(Q1=q1, Q2=H[:, 1:])


def randomized_constant_basis(M: int, rng: np.random.Generator) -> ConstantBasis:
    """Random orthonormal completion of Q1, for basis-invariance checks."""
    base = constant_basis(M)
    w, _ = np.linalg.qr(rng.standard_normal((M - 1, M - 1)))
    return ConstantBasis(Q1=base.Q1, Q2=base.Q2 @ w)


def hat_vectors(M: int):
    """Return (h1, h2, c) for the linear scheme."""
    c = np.sqrt((2.0 * M**3 + M) / 3.0)
    h1 = np.arange(1, M + 1, dtype=float) / c
    h2 = np.arange(M - 1, -1, -1, dtype=float) / c
    return h1, h2, c


def _hat_complement(M: int):
    """Explicit complement blocks for the hat weights.

    M-2 columns live inside a single block: an orthonormal basis Y of
    the subspace of R^M orthogonal to both h1 and h2 (H2 = 0 there).
    The remaining column straddles two blocks: y1 is the part of h1
    orthogonal to h2 and y2 the matching multiple of the part of h2
    orthogonal to h1, scaled so the cross-shift constraint
    h1.y1 + h2.y2 = 0 holds.  Because h1.h2 < |h1||h2| strictly, the
    resulting symbol H1 + exp(-i xi) H2 has full rank at every angle.
    """
    h1, h2, _ = hat_vectors(M)
    # orthonormal basis of {h1, h2}^perp via SVD of the 2 x M constraint
    _, _, vt = np.linalg.svd(np.vstack([h1, h2]))
    Y = vt[2:].T  # M x (M-2)
    s12 = h1 @ h2
    y1 = h1 - (s12 / (h2 @ h2)) * h2
    alpha = h1 @ y1
    y2_dir = h2 - (s12 / (h1 @ h1)) * h1
    y2 = -(alpha / (h2 @ y2_dir)) * y2_dir
    nrm = np.sqrt(y1 @ y1 + y2 @ y2)
    H1 = np.hstack([Y, (y1 / nrm)[:, None]])
    H2 = np.hstack([np.zeros((M, M - 2)), (y2 / nrm)[:, None]])
    return h1, h2, H1, H2


def linear_basis(M: int) -> LinearBasis:
    if M < 2:
        raise ValueError("need M >= 2")
    h1, h2, H1, H2 = _hat_complement(M)
    c = np.sqrt((2.0 * M**3 + M) / 3.0)
    H = np.vstack([H1, H2])
    smin = np.linalg.svd(H, compute_uv=False)[-1]
    if smin <= 1e-10:
        raise RuntimeError("hat complement lost rank; this should be impossible")
    return LinearBasis(h1=h1, h2=h2, c=c, H1=H1, H2=H2)


def randomized_linear_basis(M: int, rng: np.random.Generator) -> LinearBasis:
    """Mix the complement columns with extra null-space directions.

    Draws a random orthonormal recombination of the full (2M-3)-column
    null space of the hat constraints and keeps M-1 columns; used to
    confirm kernel invariance under the complement choice.
    """
    base = linear_basis(M)
    h1, h2 = base.h1, base.h2
    Z = np.zeros(M)
    C = np.vstack(
        [
            np.concatenate([h1, h2]),
            np.concatenate([h2, Z]),
            np.concatenate([Z, h1]),
        ]
    )
    _, _, vt = np.linalg.svd(C)
    N = vt[3:].T  # 2M x (2M-3) null-space basis
    w, _ = np.linalg.qr(rng.standard_normal((N.shape[1], M - 1)))
    H = N @ w
    return LinearBasis(h1=h1, h2=h2, c=base.c, H1=H[:M], H2=H[M:])


def cg_symbols(
    scheme: WeightingScheme,
    M: int,
    xi: float,
    basis: ConstantBasis | LinearBasis | None = None,
) -> CGSymbolPair:
    """Weight/complement symbols at angle xi, plus orthonormalized variants.

    For the constant scheme the symbols are angle-independent and
    already orthonormal.  For the linear scheme the raw symbols are
    phi_hat = h1 + exp(-i xi) h2 and psi_hat = H1 + exp(-i xi) H2;
    phi0 is phi_hat rescaled to unit norm and psi0 comes from a QR
    factorization of psi_hat.
    """
    if scheme is WeightingScheme.CONSTANT:
        cb = basis if basis is not None else constant_basis(M)
        phi = cb.Q1.astype(complex)[:, None]
        psi = cb.Q2.astype(complex)
        return CGSymbolPair(xi=xi, phi_hat=phi, psi_hat=psi, phi0=phi, psi0=psi)
    lb = basis if basis is not None else linear_basis(M)
    z = np.exp(-1j * xi)
    phi = (lb.h1 + z * lb.h2)[:, None]
    psi = lb.H1 + z * lb.H2
    nrm2 = float(np.real(phi.conj().T @ phi)[0, 0])
    if nrm2 <= 0.0:
        raise RuntimeError("degenerate hat symbol; h1.h2 >= 1/2 should not happen")
    phi0 = phi / np.sqrt(nrm2)
    psi0, _ = np.linalg.qr(psi)
    return CGSymbolPair(xi=xi, phi_hat=phi, psi_hat=psi, phi0=phi0, psi0=psi0)
