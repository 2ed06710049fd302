import numpy as np
import pytest

from gle_memlab import (
    ForceConstants,
    StabilityError,
    analytic_eigenpairs,
    assemble_blocks,
    dispersion,
    folded_wavenumbers,
    require_stable,
    symbol,
    validate_stability,
)


class TestStability:
    def test_positive_first_neighbor_alone_is_stable(self):
        assert validate_stability(ForceConstants(1.0, 0.0))

    def test_negative_second_neighbor_within_margin_is_stable(self, morse_b):
        assert validate_stability(morse_b)

    def test_nonpositive_first_neighbor_rejected(self):
        assert not validate_stability(ForceConstants(0.0, 1.0))
        with pytest.raises(StabilityError):
            require_stable(ForceConstants(-1.0, 1.0))

    def test_boundary_kappa1_plus_4kappa2_zero_rejected(self):
        assert not validate_stability(ForceConstants(4.0, -1.0))

    def test_kappa0_is_twice_sum(self, morse_a):
        assert morse_a.kappa0 == pytest.approx(2 * (12.2676 + 3.0628))


class TestBlocks:
    def test_interior_rows_sum_to_zero(self, morse_a):
        """Translating the whole chain costs no force: rows of [A1^T A0 A1] sum to 0."""
        M = 6
        bp = assemble_blocks(morse_a, M)
        rows = (bp.A1.T + bp.A0 + bp.A1).sum(axis=1)
        assert np.allclose(rows, 0.0, atol=1e-12)

    def test_off_diagonal_block_sparsity(self, morse_a):
        M = 5
        A1 = assemble_blocks(morse_a, M).A1
        expected = np.zeros((M, M))
        expected[0, M - 1] = -morse_a.kappa1
        expected[0, M - 2] = -morse_a.kappa2
        expected[1, M - 1] = -morse_a.kappa2
        assert np.array_equal(A1, expected)

    def test_block_too_small_for_second_neighbor_raises(self, morse_a):
        with pytest.raises(ValueError, match="block too small"):
            assemble_blocks(morse_a, 1)


class TestSymbol:
    @pytest.mark.parametrize("M", [2, 4, 8])
    def test_hermitian_on_grid(self, morse_a, morse_b, M):
        xi_grid = np.linspace(0.0, 2.0 * np.pi, 1026)[1:-1]
        for fc in (morse_a, morse_b):
            for xi in xi_grid[::8]:
                A = symbol(fc, M, xi).entries
                assert np.linalg.norm(A - A.conj().T) <= 1e-12 * np.linalg.norm(A)

    @pytest.mark.parametrize("M", [2, 4, 8])
    def test_positive_semidefinite_on_grid(self, morse_a, morse_b, M):
        xi_grid = np.linspace(0.0, 2.0 * np.pi, 1026)[1:-1]
        for fc in (morse_a, morse_b):
            for xi in xi_grid[::8]:
                w = np.linalg.eigvalsh(symbol(fc, M, xi).entries)
                assert w.min() >= -1e-10 * max(abs(w).max(), 1.0)

    def test_singular_only_at_zone_corner(self, morse_a):
        # the acoustic zero mode sits at xi = 2 pi (j = 0 folded mode)
        w = np.linalg.eigvalsh(symbol(morse_a, 4, 2.0 * np.pi).entries)
        assert abs(w.min()) <= 1e-10
        w = np.linalg.eigvalsh(symbol(morse_a, 4, 1.0).entries)
        assert w.min() > 1e-6


class TestAnalyticEigenpairs:
    @pytest.mark.parametrize("M", [2, 3, 5, 8, 16])
    def test_match_dense_solver_at_random_angles(self, morse_a, morse_b, M, rng):
        for fc in (morse_a, morse_b):
            for xi in rng.uniform(1e-3, 2.0 * np.pi - 1e-3, 32):
                A = symbol(fc, M, xi).entries
                lams, vecs = analytic_eigenpairs(fc, M, xi)
                norm = max(np.abs(lams).max(), 1.0)
                assert np.linalg.norm(A @ vecs - vecs * lams) <= 1e-12 * norm
                # orthonormality of the plane-wave eigenvectors
                gram = vecs.conj().T @ vecs
                assert np.linalg.norm(gram - np.eye(M)) <= 1e-12

    def test_eigenvalues_are_dispersion_at_folded_wavenumbers(self, morse_a):
        M, xi = 6, 2.3
        lams, _ = analytic_eigenpairs(morse_a, M, xi)
        assert np.allclose(lams, dispersion(morse_a, folded_wavenumbers(M, xi)))

    def test_dispersion_nonnegative_under_stability(self, morse_b):
        xi = np.linspace(0.0, 2.0 * np.pi, 4097)
        assert dispersion(morse_b, xi).min() >= -1e-12

    def test_zero_mode_at_zone_corner(self, morse_a):
        lams = dispersion(morse_a, folded_wavenumbers(4, 2.0 * np.pi))
        assert abs(lams[0]) <= 1e-12
