"""Tests for the stochastic Airy operator discretization."""

import math
import warnings

import numpy as np
import pytest
from scipy.special import ai_zeros

from edgekit.airyop import (
    build_sao,
    couple_refine,
    extend_grid,
    grid_eigs,
    make_noise_grid,
    rayleigh,
    sao_eigs,
)
from edgekit.exceptions import InvalidParameterError, TruncationWarning
from edgekit.randkit import make_stream
from edgekit.tridiag import eigen_extreme, eigenvector

# =============================================================================
# Test Fixtures
# =============================================================================


@pytest.fixture
def airy_zeros():
    """-a_k, the eigenvalues of the deterministic Airy operator."""
    return -ai_zeros(16)[0]


@pytest.fixture
def grid():
    return make_noise_grid(0.05, 10.0, make_stream(17, 0))


# =============================================================================
# Noise Grid Tests
# =============================================================================


class TestNoiseGrid:
    """Tests for make_noise_grid."""

    def test_cell_count(self, grid):
        assert grid.n == 200
        assert grid.g.shape == (200,)
        assert grid.increments == pytest.approx(math.sqrt(0.05) * grid.g)

    def test_noiseless(self):
        grid = make_noise_grid(0.1, 5.0, None)
        assert np.all(grid.g == 0)
        assert grid.source is None

    def test_deterministic(self):
        a = make_noise_grid(0.1, 5.0, make_stream(1, 2))
        b = make_noise_grid(0.1, 5.0, make_stream(1, 2))
        np.testing.assert_array_equal(a.g, b.g)

    @pytest.mark.parametrize("h,x_max", [(0.0, 5.0), (-0.1, 5.0), (0.5, 0.2)])
    def test_invalid(self, h, x_max):
        with pytest.raises(InvalidParameterError):
            make_noise_grid(h, x_max, None)


# =============================================================================
# Operator Tests
# =============================================================================


class TestBuildSao:
    """Tests for build_sao."""

    def test_deterministic_entries(self, grid):
        mat = build_sao(math.inf, grid)
        x = 0.05 * np.arange(1, 201)
        np.testing.assert_allclose(mat.diag, 2 / 0.05**2 + x)
        np.testing.assert_allclose(mat.offdiag, -1 / 0.05**2)

    def test_diagonal_split_noise(self, grid):
        beta, h = 2.0, grid.h
        noise = build_sao(beta, grid).diag - build_sao(math.inf, grid).diag
        np.testing.assert_allclose(noise, 2 / math.sqrt(beta) * grid.g / math.sqrt(h))

    def test_hermite_split_noise(self, grid):
        beta, h = 1.0, grid.h
        clean = build_sao(math.inf, grid)
        mat = build_sao(beta, grid, split="hermite")
        np.testing.assert_allclose(mat.diag - clean.diag, math.sqrt(2 / (beta * h)) * grid.g)
        np.testing.assert_allclose(
            mat.offdiag - clean.offdiag, math.sqrt(1 / (2 * beta * h)) * grid.g_off[:-1]
        )

    def test_invalid_split(self, grid):
        with pytest.raises(InvalidParameterError):
            build_sao(2.0, grid, split="upper")  # type: ignore[arg-type]

    def test_invalid_beta(self, grid):
        with pytest.raises(InvalidParameterError):
            build_sao(0.0, grid)


# =============================================================================
# Eigenvalue Tests
# =============================================================================


class TestSaoEigs:
    """Tests for sao_eigs and grid_eigs."""

    def test_noiseless_matches_airy_zeros(self, airy_zeros):
        values = sao_eigs(math.inf, 0.01, 20.0, 3, None)
        np.testing.assert_allclose(values, airy_zeros[:3], atol=5e-3)

    def test_noiseless_ignores_stream(self):
        a = sao_eigs(math.inf, 0.05, 15.0, 2, make_stream(1, 0))
        b = sao_eigs(math.inf, 0.05, 15.0, 2, None)
        np.testing.assert_array_equal(a, b)

    def test_retry_extends_short_domain(self, airy_zeros):
        with warnings.catch_warnings():
            warnings.simplefilter("error", TruncationWarning)
            values = sao_eigs(math.inf, 0.01, 6.0, 1, None)
        assert values[0] == pytest.approx(airy_zeros[0], abs=5e-3)

    def test_truncation_warning(self):
        with pytest.warns(TruncationWarning):
            sao_eigs(math.inf, 0.05, 6.0, 16, None)

    def test_noisy_retry_is_reproducible(self):
        a = sao_eigs(2.0, 0.05, 6.0, 1, make_stream(4, 4))
        b = sao_eigs(2.0, 0.05, 6.0, 1, make_stream(4, 4))
        np.testing.assert_array_equal(a, b)

    def test_ascending(self):
        values = sao_eigs(2.0, 0.05, 15.0, 4, make_stream(3, 1))
        assert np.all(np.diff(values) > 0)

    def test_k_larger_than_grid(self):
        grid = make_noise_grid(1.0, 3.0, None)
        with pytest.raises(InvalidParameterError):
            grid_eigs(math.inf, grid, 5)

    def test_invalid_k(self):
        with pytest.raises(InvalidParameterError):
            sao_eigs(2.0, 0.05, 15.0, 0, None)


# =============================================================================
# Rayleigh Quotient Tests
# =============================================================================


class TestRayleigh:
    """Tests for rayleigh."""

    def test_eigenvector_gives_eigenvalue(self, grid):
        mat = build_sao(2.0, grid)
        lam = eigen_extreme(mat, 1)[0]
        assert rayleigh(mat, eigenvector(mat, lam), h=grid.h) == pytest.approx(lam, rel=1e-8)

    def test_weight_cancels(self, grid):
        mat = build_sao(2.0, grid)
        v = np.linspace(1.0, 2.0, mat.n)
        assert rayleigh(mat, v, h=0.05) == pytest.approx(rayleigh(mat, v))

    def test_upper_bound_on_lowest(self, grid):
        mat = build_sao(2.0, grid)
        v = np.sin(np.pi * np.arange(1, mat.n + 1) / (mat.n + 1))
        assert rayleigh(mat, v) >= eigen_extreme(mat, 1)[0] - 1e-9

    def test_zero_vector(self, grid):
        mat = build_sao(2.0, grid)
        with pytest.raises(InvalidParameterError):
            rayleigh(mat, np.zeros(mat.n))

    def test_wrong_length(self, grid):
        with pytest.raises(InvalidParameterError):
            rayleigh(build_sao(2.0, grid), np.ones(3))


# =============================================================================
# Coupled Refinement Tests
# =============================================================================


class TestCoupleRefine:
    """Tests for couple_refine."""

    def test_increments_sum_to_coarse(self, grid):
        fine = couple_refine(grid)
        assert fine.h == pytest.approx(grid.h / 2)
        assert fine.n == 2 * grid.n
        pairs = fine.increments[0::2] + fine.increments[1::2]
        np.testing.assert_allclose(pairs, grid.increments, atol=1e-12)

    def test_fine_cells_standard_normal(self):
        coarse = make_noise_grid(0.01, 200.0, make_stream(2, 0))
        fine = couple_refine(coarse)
        assert np.mean(fine.g) == pytest.approx(0.0, abs=0.03)
        assert np.var(fine.g) == pytest.approx(1.0, abs=0.03)

    def test_refinement_reproducible(self, grid):
        a = couple_refine(make_noise_grid(0.05, 10.0, make_stream(17, 0)))
        np.testing.assert_array_equal(couple_refine(grid).g, a.g)

    def test_refining_twice_gives_same_path(self, grid):
        first = couple_refine(grid)
        second = couple_refine(grid)
        np.testing.assert_array_equal(first.g, second.g)
        np.testing.assert_array_equal(first.g_off, second.g_off)

    def test_two_levels_sum_to_coarse(self, grid):
        finest = couple_refine(couple_refine(grid))
        assert finest.level == 2
        quads = finest.increments.reshape(-1, 4).sum(axis=1)
        np.testing.assert_allclose(quads, grid.increments, atol=1e-12)

    def test_noiseless_stays_noiseless(self):
        fine = couple_refine(make_noise_grid(0.1, 5.0, None))
        assert np.all(fine.g == 0)

    @pytest.mark.slow
    def test_coupled_eigenvalues_converge(self):
        diffs = []
        for i in range(50):
            coarse = make_noise_grid(0.02, 15.0, make_stream(23, i))
            fine = couple_refine(coarse)
            diffs.append(abs(grid_eigs(2.0, fine, 1)[0] - grid_eigs(2.0, coarse, 1)[0]))
        assert max(diffs) <= 0.05


class TestExtendGrid:
    """Tests for extend_grid."""

    def test_existing_cells_kept(self, grid):
        longer = extend_grid(grid, 15.0)
        assert longer.n == 300
        np.testing.assert_array_equal(longer.g[: grid.n], grid.g)
        np.testing.assert_array_equal(longer.g_off[: grid.n], grid.g_off)

    def test_refinement_pairs_survive_extension(self, grid):
        fine = couple_refine(grid)
        coarse_long = extend_grid(grid, 15.0)
        fine_long = extend_grid(fine, 15.0)
        assert fine_long.n == 2 * coarse_long.n
        pairs = fine_long.increments[0::2] + fine_long.increments[1::2]
        np.testing.assert_allclose(pairs, coarse_long.increments, atol=1e-12)

    def test_extension_matches_fresh_grid(self):
        short = make_noise_grid(0.05, 10.0, make_stream(8, 1))
        fresh = make_noise_grid(0.05, 15.0, make_stream(8, 1))
        np.testing.assert_array_equal(extend_grid(short, 15.0).g, fresh.g)

    def test_noiseless(self):
        longer = extend_grid(make_noise_grid(0.1, 5.0, None), 8.0)
        assert longer.n == 80
        assert np.all(longer.g == 0)

    def test_cannot_shrink(self, grid):
        with pytest.raises(InvalidParameterError):
            extend_grid(grid, 5.0)


class TestNoiselessConvergence:
    """Second-order convergence of the deterministic operator."""

    def test_error_ratio(self, airy_zeros):
        errors = [
            abs(sao_eigs(math.inf, h, 20.0, 1, None)[0] - airy_zeros[0])
            for h in (0.05, 0.025, 0.0125)
        ]
        for coarse, fine in zip(errors, errors[1:]):
            assert 3.0 <= coarse / fine <= 5.0
