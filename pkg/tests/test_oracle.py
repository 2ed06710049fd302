import numpy as np
import pytest

from gle_memlab import (
    ForceConstants,
    WeightingScheme,
    build_dense,
    midpoint_grid,
    recurrence_horizon,
    theta_dense,
    theta_entry,
)
from gle_memlab.oracle import max_group_velocity


class TestConstruction:
    def test_rejects_incompatible_sizes(self, morse_a):
        with pytest.raises(ValueError):
            build_dense(morse_a, 100, 7, WeightingScheme.CONSTANT)  # not a multiple
        with pytest.raises(ValueError):
            build_dense(morse_a, 12, 4, WeightingScheme.CONSTANT)  # fewer than 4 blocks

    def test_weight_columns_normalized_and_complement_orthogonal(self, morse_a):
        M = 4
        for scheme in WeightingScheme:
            chain = build_dense(morse_a, 64, M, scheme)
            gram = chain.Phi.T @ chain.Phi
            assert np.allclose(np.diag(gram), 1.0, atol=1e-12)
            if scheme is WeightingScheme.CONSTANT:
                assert np.allclose(gram, np.eye(16), atol=1e-12)
            else:
                # overlapping hats: adjacent columns share one block,
                # overlap h1.h2 = (M^3 - M) / (2 (2 M^3 + M))
                overlap = (M**3 - M) / (2.0 * (2.0 * M**3 + M))
                assert gram[0, 1] == pytest.approx(overlap, abs=1e-12)
            # complement orthogonal to the weights in both schemes
            assert np.allclose(chain.Phi.T @ chain.Psi, 0.0, atol=1e-12)

    def test_lattice_matrix_rows_sum_to_zero(self, morse_b):
        chain = build_dense(morse_b, 64, 4, WeightingScheme.CONSTANT)
        assert np.allclose(chain.A.sum(axis=1), 0.0, atol=1e-12)


class TestAgreementWithSpectralPath:
    @pytest.mark.parametrize("scheme", list(WeightingScheme))
    def test_small_chain_both_schemes(self, morse_a, scheme):
        grid = midpoint_grid(2048)
        chain = build_dense(morse_a, 256, 4, scheme)
        for J in (0, 1, 2):
            for t in (0.0, 1.0):
                dval = theta_dense(chain, J, t)
                sval = theta_entry(scheme, morse_a, 4, J, t, grid)
                assert dval == pytest.approx(sval, abs=1e-8)

    def test_first_neighbor_block_of_two_long_horizon(self):
        """M=2, kappa1=1: dense (N=2^10) and spectral agree over t in [0, 20]."""
        fc = ForceConstants(1.0, 0.0)
        grid = midpoint_grid(2048)
        chain = build_dense(fc, 1024, 2, WeightingScheme.CONSTANT)
        assert recurrence_horizon(chain) > 20.0
        for t in np.linspace(0.0, 20.0, 9):
            dval = theta_dense(chain, 0, float(t))
            sval = theta_entry(WeightingScheme.CONSTANT, fc, 2, 0, float(t), grid)
            assert dval == pytest.approx(sval, abs=1e-6)


class TestRecurrence:
    def test_first_neighbor_unit_speed(self):
        # omega = 2 sin(xi/2): group velocity cos(xi/2) peaks at the sound speed 1
        assert max_group_velocity(ForceConstants(1.0, 0.0)) == pytest.approx(
            1.0, abs=1e-6
        )

    def test_horizon_scales_with_chain_length(self, morse_a):
        short = build_dense(morse_a, 64, 4, WeightingScheme.CONSTANT)
        long = build_dense(morse_a, 128, 4, WeightingScheme.CONSTANT)
        assert recurrence_horizon(long) == pytest.approx(
            2.0 * recurrence_horizon(short)
        )

    def test_warns_beyond_horizon(self, morse_a):
        chain = build_dense(morse_a, 64, 4, WeightingScheme.CONSTANT)
        with pytest.warns(UserWarning, match="horizon"):
            theta_dense(chain, 0, 1e6)

    def test_offset_outside_coarse_lattice_raises(self, morse_a):
        chain = build_dense(morse_a, 64, 4, WeightingScheme.CONSTANT)
        with pytest.raises(ValueError):
            theta_dense(chain, 16, 0.0)
