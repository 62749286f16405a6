import numpy as np
import pytest

from nlad import (
    ModelParams,
    NeverDestabilizedError,
    critical_mode,
    dispersion,
    instability_thresholds,
)


def params(L, u1, u2, gamma=0.0):
    return ModelParams(gamma=gamma, u1_bar=u1, u2_bar=u2, L=L)


class TestDispersion:
    def test_zero_mode_is_neutral(self):
        pts = dispersion(params(4, 10, 10, gamma=0.3), 6)
        assert pts[0].m == 0
        assert pts[0].lambda_plus == 0.0
        assert pts[0].lambda_minus == 0.0

    def test_gamma_zero_is_pure_diffusion(self):
        pts = dispersion(params(5, 2, 3, gamma=0.0), 8)
        for pt in pts:
            assert pt.lambda_plus == pytest.approx(-pt.q**2, rel=1e-15, abs=1e-300)
            assert pt.lambda_minus == pytest.approx(-pt.q**2, rel=1e-15, abs=1e-300)

    def test_destabilized_branch_vanishes_at_threshold(self):
        # at the rounded caption value of the threshold the destabilized
        # eigenvalue of mode 1 sits within 1e-4 of zero; the branch with
        # the minus sign is the destabilized one for positive gamma
        pts = dispersion(params(4, 10, 10, gamma=0.15708), 2)
        pt = pts[1]
        assert pt.lambda_max == pt.lambda_minus
        assert abs(pt.lambda_max) < 1e-4

    def test_rejects_small_m_max(self):
        with pytest.raises(ValueError):
            dispersion(params(4, 1, 1), 0)

    def test_trace_identity(self):
        pts = dispersion(params(6.3, 0.7, 9.0, gamma=1.7), 25)
        for pt in pts:
            assert pt.lambda_plus + pt.lambda_minus == pytest.approx(
                -2 * pt.q**2, abs=1e-10
            )

    def test_determinant_identity(self):
        from nlad import fourier_coefficient

        p = params(6.3, 0.7, 9.0, gamma=1.7)
        for pt in dispersion(p, 25)[1:]:
            khat = fourier_coefficient(p.kernel, pt.q)
            expected = pt.q**4 * (1 - p.gamma**2 * khat**2 * p.u1_bar * p.u2_bar)
            assert pt.lambda_plus * pt.lambda_minus == pytest.approx(
                expected, rel=1e-9
            )


class TestThresholds:
    def test_symmetric_pair(self):
        g_plus, g_minus = instability_thresholds(params(4, 10, 10), 1)
        assert g_minus == -g_plus
        assert g_plus == pytest.approx(np.pi / 20, rel=1e-14)

    def test_caption_value_L2p7(self):
        g_plus, _ = instability_thresholds(params(2.7, 0.1, 10), 1)
        assert g_plus == pytest.approx(3.19933, rel=1e-5)

    def test_never_destabilized_at_L2_boundary(self):
        # q_1 = pi at L=2 is excluded by the L > 2 domain constraint; the
        # same kernel zero is reachable as mode 2 of L=4
        with pytest.raises(NeverDestabilizedError, match="never destabilized"):
            instability_thresholds(params(4, 1, 1), 2)

    def test_rejects_mode_zero(self):
        with pytest.raises(ValueError):
            instability_thresholds(params(4, 1, 1), 0)

    def test_scaling_with_densities(self):
        # gamma_c * sqrt(u1 u2) depends only on the kernel and L
        ref = None
        for u1, u2 in [(0.5, 0.5), (10, 10), (0.1, 7.3)]:
            g_plus, _ = instability_thresholds(params(4, u1, u2), 1)
            scaled = g_plus * np.sqrt(u1 * u2)
            if ref is None:
                ref = scaled
            assert scaled == pytest.approx(ref, abs=1e-12)


class TestCriticalMode:
    def test_first_mode_wins_for_top_hat(self):
        crit = critical_mode(params(4, 10, 10))
        assert crit.m_c == 1
        assert crit.q_c == pytest.approx(np.pi / 2, rel=1e-15)
        assert crit.gamma_c_plus == pytest.approx(0.15708, rel=1e-5)

    @pytest.mark.parametrize(
        "L,u1,u2,caption",
        [
            (2.7, 0.1, 10, 3.19933),
            (5, 0.1, 10, 1.32131),
            (15, 0.1, 10, 1.02985),
            (10, 0.1, 10, 1.06895),
            (3.1, 10, 10, 0.225754),
            (10, 1, 1, 1.06896),
            (20, 1, 1, 1.01664),
        ],
    )
    def test_caption_thresholds(self, L, u1, u2, caption):
        crit = critical_mode(params(L, u1, u2))
        assert crit.gamma_c_plus == pytest.approx(caption, rel=1e-5)
        assert crit.gamma_c_minus == -crit.gamma_c_plus

    def test_minus_side_accessor(self):
        crit = critical_mode(params(5, 0.1, 10))
        assert crit.gamma_c("minus") == pytest.approx(-1.32131, rel=1e-5)
        with pytest.raises(ValueError):
            crit.gamma_c("up")

    def test_attraction_caption_L2p5(self):
        crit = critical_mode(params(2.5, 0.1, 10))
        assert crit.gamma_c_minus == pytest.approx(-4.2758, rel=1e-4)


class TestStabilityWindow:
    @pytest.mark.parametrize("frac", [-0.95, -0.5, 0.0, 0.5, 0.95])
    def test_all_modes_decay_inside_window(self, frac):
        base = params(7, 0.4, 3.0)
        crit = critical_mode(base)
        p = params(7, 0.4, 3.0, gamma=frac * crit.gamma_c_plus)
        for pt in dispersion(p, 30)[1:]:
            assert pt.lambda_plus < 0
            assert pt.lambda_minus < 0

    def test_exact_zero_at_threshold(self):
        base = params(7, 0.4, 3.0)
        crit = critical_mode(base)
        p = params(7, 0.4, 3.0, gamma=crit.gamma_c_plus)
        pt = dispersion(p, crit.m_c)[crit.m_c]
        assert abs(pt.lambda_max) < 1e-12
