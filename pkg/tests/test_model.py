import numpy as np
import pytest

from nlad import (
    DimensionalParams,
    Kernel,
    ModelParams,
    fourier_coefficient,
    nondimensionalize,
)


class TestNondimensionalize:
    def test_direct_substitution(self):
        p = nondimensionalize(
            DimensionalParams(D=1, gamma_dim=2, alpha=1, l=4, p1=1, p2=1)
        )
        assert p.gamma == pytest.approx(0.5, abs=0)
        assert p.L == pytest.approx(4.0, abs=0)
        assert (p.u1_bar, p.u2_bar) == (1, 1)

    def test_direct_substitution_asymmetric(self):
        p = nondimensionalize(
            DimensionalParams(D=2, gamma_dim=8, alpha=0.5, l=2, p1=0.1, p2=10)
        )
        assert p.gamma == pytest.approx(2.0, abs=0)
        assert p.L == pytest.approx(4.0, abs=0)
        assert (p.u1_bar, p.u2_bar) == (0.1, 10)

    def test_sensing_radius_too_large(self):
        with pytest.raises(ValueError, match="sensing radius"):
            DimensionalParams(D=1, gamma_dim=1, alpha=3, l=4, p1=1, p2=1)

    @pytest.mark.parametrize(
        "bad",
        [
            dict(D=0, gamma_dim=1, alpha=1, l=4, p1=1, p2=1),
            dict(D=1, gamma_dim=1, alpha=1, l=-4, p1=1, p2=1),
            dict(D=1, gamma_dim=1, alpha=1, l=4, p1=0, p2=1),
            dict(D=1, gamma_dim=1, alpha=1, l=4, p1=1, p2=-2),
        ],
    )
    def test_rejects_nonpositive(self, bad):
        with pytest.raises(ValueError):
            DimensionalParams(**bad)


class TestTopHatCoefficient:
    def test_value_at_zero(self):
        assert fourier_coefficient(Kernel.top_hat(), 0.0) == 1.0

    def test_zero_at_pi(self):
        assert fourier_coefficient(Kernel.top_hat(), np.pi) == pytest.approx(0.0, abs=1e-15)

    def test_half_pi(self):
        # sin(pi/2) / (pi/2) = 2/pi
        assert fourier_coefficient(Kernel.top_hat(), np.pi / 2) == pytest.approx(
            2 / np.pi, rel=1e-14
        )

    def test_series_matches_direct_near_cutover(self):
        k = Kernel.top_hat()
        for q in (9.9e-5, 1.01e-4, 5e-5, 2e-4):
            assert fourier_coefficient(k, q) == pytest.approx(np.sin(q) / q, rel=1e-13)

    def test_vectorized_matches_scalar(self):
        k = Kernel.top_hat()
        q = np.linspace(-30, 30, 101)
        vec = fourier_coefficient(k, q)
        assert vec.shape == q.shape
        for qi, vi in zip(q[::10], vec[::10]):
            assert fourier_coefficient(k, float(qi)) == vi


def gaussian_like(x, width=0.35):
    # compact-support bump, even and positive on (-1, 1)
    return np.exp(-(x / width) ** 2) * (1 - x**2) ** 2


class TestKernelValidation:
    def test_rejects_few_samples(self):
        with pytest.raises(ValueError, match="1024"):
            Kernel.tabulated(np.full(100, 0.5))

    def test_rejects_negative(self):
        s = np.full(2048, 0.5)
        s[100] = s[-101] = -0.1
        with pytest.raises(ValueError, match="nonnegative"):
            Kernel.tabulated(s)

    def test_rejects_odd_part(self):
        x = np.linspace(-1, 1, 2049)
        s = 0.5 + 0.01 * x
        with pytest.raises(ValueError, match="even"):
            Kernel.tabulated(s)

    def test_rejects_wrong_mass(self):
        with pytest.raises(ValueError, match="integrate to 1"):
            Kernel.tabulated(np.full(2049, 0.6))

    def test_from_function_normalizes(self):
        k = Kernel.from_function(lambda x: gaussian_like(np.asarray(x)), n_samples=4097)
        assert k.kind == "tabulated"
        assert fourier_coefficient(k, 0.0) == pytest.approx(1.0, abs=1e-14)

    def test_samples_read_only(self):
        k = Kernel.from_function(lambda x: gaussian_like(np.asarray(x)), n_samples=2049)
        with pytest.raises(ValueError):
            k.samples[0] = 1.0


class TestKernelProperties:
    @pytest.mark.parametrize("kind", ["top_hat", "tabulated"])
    def test_even_in_q(self, kind):
        if kind == "top_hat":
            k = Kernel.top_hat()
        else:
            k = Kernel.from_function(lambda x: gaussian_like(np.asarray(x)), n_samples=4097)
        rng = np.random.default_rng(42)
        q = rng.uniform(0, 60, size=40)
        np.testing.assert_allclose(
            fourier_coefficient(k, q), fourier_coefficient(k, -q), rtol=0, atol=1e-15
        )

    @pytest.mark.parametrize("kind", ["top_hat", "tabulated"])
    def test_bounded_by_value_at_zero(self, kind):
        if kind == "top_hat":
            k = Kernel.top_hat()
        else:
            k = Kernel.from_function(lambda x: gaussian_like(np.asarray(x)), n_samples=4097)
        q = np.linspace(0.01, 80, 500)
        assert fourier_coefficient(k, 0.0) == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.abs(fourier_coefficient(k, q)) <= 1.0 + 1e-12)

    def test_tabulated_top_hat_matches_closed_form(self):
        # trapezoidal cosine transform of the sampled top hat against
        # sin(q)/q, over the full wavenumber range used by the solver
        k = Kernel.from_function(lambda x: 0.5)
        q = np.linspace(-50, 50, 401)
        exact = fourier_coefficient(Kernel.top_hat(), q)
        approx = fourier_coefficient(k, q)
        assert np.max(np.abs(exact - approx)) < 1e-8


class TestModelParams:
    def test_rejects_small_L(self):
        with pytest.raises(ValueError, match="L must exceed 2"):
            ModelParams(gamma=1.0, u1_bar=1, u2_bar=1, L=2.0)

    def test_rejects_nonpositive_density(self):
        with pytest.raises(ValueError, match="densities"):
            ModelParams(gamma=1.0, u1_bar=0, u2_bar=1, L=4)

    def test_defaults_to_top_hat(self):
        p = ModelParams(gamma=1.0, u1_bar=1, u2_bar=1, L=4)
        assert p.kernel.kind == "top_hat"
