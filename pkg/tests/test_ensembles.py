"""Tests for the tridiagonal beta-ensembles and their edge scalings."""

import math

import numpy as np
import pytest

from edgekit.ensembles import (
    EdgeSample,
    HermiteSpec,
    LaguerreSpec,
    edge_sample,
    hermite_edge_scale,
    laguerre_centering,
    laguerre_edge_scale,
    sample_hermite,
    sample_laguerre,
)
from edgekit.exceptions import InvalidParameterError
from edgekit.randkit import make_stream

# =============================================================================
# Test Fixtures
# =============================================================================


@pytest.fixture
def hermite_spec():
    return HermiteSpec(n=200, beta=2.0)


@pytest.fixture
def laguerre_spec():
    return LaguerreSpec(n=10, kappa=20.0, beta=2.0)


# =============================================================================
# Spec Validation Tests
# =============================================================================


class TestSpecs:
    """Tests for HermiteSpec and LaguerreSpec."""

    @pytest.mark.parametrize("n,beta", [(0, 2.0), (5, 0.0), (5, -1.0), (5, math.inf)])
    def test_invalid_hermite(self, n, beta):
        with pytest.raises(InvalidParameterError):
            HermiteSpec(n=n, beta=beta)

    def test_kappa_must_exceed_n_minus_one(self):
        with pytest.raises(InvalidParameterError, match="kappa"):
            LaguerreSpec(n=10, kappa=9.0, beta=1.0)

    def test_fractional_kappa_accepted(self):
        assert LaguerreSpec(n=10, kappa=9.5, beta=1.0).kappa == 9.5

    def test_edge_sample_rejects_descending(self):
        with pytest.raises(InvalidParameterError):
            EdgeSample(values=np.array([2.0, 1.0]), spec=HermiteSpec(3, 1.0), stream_id=0)


# =============================================================================
# Hermite Tests
# =============================================================================


class TestHermite:
    """Tests for sample_hermite."""

    def test_shapes(self, hermite_spec):
        mat = sample_hermite(hermite_spec, make_stream(1, 0))
        assert mat.diag.shape == (200,)
        assert mat.offdiag.shape == (199,)
        assert np.all(mat.offdiag > 0)

    def test_deterministic(self, hermite_spec):
        a = sample_hermite(hermite_spec, make_stream(1, 0))
        b = sample_hermite(hermite_spec, make_stream(1, 0))
        np.testing.assert_array_equal(a.diag, b.diag)
        np.testing.assert_array_equal(a.offdiag, b.offdiag)

    def test_one_by_one(self):
        mat = sample_hermite(HermiteSpec(n=1, beta=1.0), make_stream(3, 0))
        assert mat.n == 1
        assert mat.offdiag.size == 0

    def test_diagonal_variance(self):
        mat = sample_hermite(HermiteSpec(n=4000, beta=2.0), make_stream(9, 0))
        assert np.var(mat.diag) == pytest.approx(1.0, abs=0.1)

    def test_offdiagonal_chi_shapes(self, hermite_spec):
        beta = hermite_spec.beta
        mat = sample_hermite(hermite_spec, make_stream(4, 0))
        shapes = beta * np.arange(hermite_spec.n - 1, 0, -1)
        total = float(np.sum(beta * mat.offdiag**2))
        assert abs(total - shapes.sum()) < 5 * math.sqrt(2 * shapes.sum())

    def test_largest_shape_at_top(self):
        mat = sample_hermite(HermiteSpec(n=400, beta=1.0), make_stream(2, 0))
        assert mat.offdiag[:20].mean() > mat.offdiag[-20:].mean()


# =============================================================================
# Laguerre Tests
# =============================================================================


class TestLaguerre:
    """Tests for sample_laguerre."""

    def test_mean_trace(self, laguerre_spec):
        traces = [
            float(np.sum(sample_laguerre(laguerre_spec, make_stream(5, i)).diag))
            for i in range(200)
        ]
        assert np.mean(traces) == pytest.approx(laguerre_spec.n * laguerre_spec.kappa, abs=5.0)

    def test_positive_spectrum(self, laguerre_spec):
        for i in range(20):
            mat = sample_laguerre(laguerre_spec, make_stream(6, i))
            assert np.linalg.eigvalsh(mat.to_dense())[0] > 0

    def test_one_by_one(self):
        mat = sample_laguerre(LaguerreSpec(n=1, kappa=3.0, beta=2.0), make_stream(1, 0))
        assert mat.n == 1
        assert mat.diag[0] > 0


# =============================================================================
# Edge Scaling Tests
# =============================================================================


class TestEdgeScale:
    """Closed-form checks of the soft-edge maps."""

    def test_hermite_center_maps_to_zero(self):
        n = 64
        assert hermite_edge_scale(np.array([16.0]), n)[0] == pytest.approx(0.0)

    def test_hermite_unit_below_center(self):
        assert hermite_edge_scale(np.array([15.0]), 64)[0] == pytest.approx(2.0)

    def test_hermite_order_reversed(self):
        scaled = hermite_edge_scale(np.array([16.0, 15.0, 14.0]), 64)
        assert np.all(np.diff(scaled) > 0)

    def test_laguerre_centering(self):
        mu, sigma = laguerre_centering(4, 4.0)
        assert mu == pytest.approx(16.0)
        assert sigma == pytest.approx(0.25)

    def test_laguerre_edge_scale(self):
        np.testing.assert_allclose(laguerre_edge_scale(np.array([16.0, 12.0]), 4, 4.0), [0.0, 1.0])


# =============================================================================
# Edge Sample Tests
# =============================================================================


class TestEdgeSample:
    """Tests for edge_sample."""

    def test_matches_dense_hermite(self):
        spec = HermiteSpec(n=60, beta=1.5)
        for i in range(10):
            draw = edge_sample(spec, 4, make_stream(8, i))
            mat = sample_hermite(spec, make_stream(8, i))
            raw = np.linalg.eigvalsh(mat.to_dense())[::-1][:4]
            np.testing.assert_allclose(draw.values, hermite_edge_scale(raw, spec.n), atol=1e-7)
            assert draw.stream_id == i

    def test_matches_dense_laguerre(self, laguerre_spec):
        for i in range(10):
            draw = edge_sample(laguerre_spec, 3, make_stream(8, i))
            mat = sample_laguerre(laguerre_spec, make_stream(8, i))
            raw = np.linalg.eigvalsh(mat.to_dense())[::-1][:3]
            expected = laguerre_edge_scale(raw, laguerre_spec.n, laguerre_spec.kappa)
            np.testing.assert_allclose(draw.values, expected, atol=1e-7)

    def test_values_ascending(self, hermite_spec):
        draw = edge_sample(hermite_spec, 5, make_stream(2, 1))
        assert draw.k == 5
        assert np.all(np.diff(draw.values) >= 0)

    @pytest.mark.parametrize("k", [0, 201])
    def test_invalid_k(self, hermite_spec, k):
        with pytest.raises(InvalidParameterError):
            edge_sample(hermite_spec, k, make_stream(0, 0))

    def test_hermite_mean_near_tracy_widom(self, hermite_spec):
        values = [edge_sample(hermite_spec, 1, make_stream(11, i)).values[0] for i in range(200)]
        assert np.mean(values) == pytest.approx(1.7711, abs=0.2)
