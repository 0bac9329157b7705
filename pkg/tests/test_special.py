import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as scipy_integrate
from scipy.special import erfc, hyp2f1

from makeham.special import (
    BracketError,
    ConvergenceError,
    DomainError,
    QuadratureConfig,
    find_root,
    gauss_2f1,
    integrate,
    upper_incomplete_gamma,
)


def quad_upper_gamma(u, x):
    """Independent oracle: integrate t^(u-1) e^(-t) from x with t = x + s."""
    val, _ = scipy_integrate.quad(
        lambda s: (x + s) ** (u - 1.0) * math.exp(-(x + s)),
        0.0,
        np.inf,
        epsabs=1e-14,
        epsrel=1e-12,
        limit=500,
    )
    return val


class TestQuadratureConfig:
    def test_defaults(self):
        cfg = QuadratureConfig()
        assert cfg.abs_tol == 1e-10 and cfg.rel_tol == 1e-10
        assert cfg.max_subdivisions == 2000

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(max_subdivisions=0)


class TestIntegrate:
    def test_exponential_tail(self):
        assert integrate(lambda x: math.exp(-x), 0.0, math.inf) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_integrable_singularity(self):
        assert integrate(lambda x: x**-0.5, 0.0, 1.0) == pytest.approx(2.0, abs=1e-9)

    def test_finite_interval(self):
        assert integrate(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)

    @given(
        alpha=st.floats(-3.0, 3.0),
        beta=st.floats(-3.0, 3.0),
    )
    @settings(max_examples=25, deadline=None)
    def test_linearity(self, alpha, beta):
        f = lambda x: math.exp(-x)
        g = lambda x: x * math.exp(-2.0 * x)
        combined = integrate(lambda x: alpha * f(x) + beta * g(x), 0.0, math.inf)
        separate = alpha * integrate(f, 0.0, math.inf) + beta * integrate(g, 0.0, math.inf)
        assert combined == pytest.approx(separate, abs=5e-10)

    def test_convergence_error_carries_estimate(self):
        cfg = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=1)
        with pytest.raises(ConvergenceError) as err:
            integrate(lambda x: x**-0.5, 0.0, 1.0, cfg)
        assert err.value.estimate == pytest.approx(2.0, rel=5e-2)
        assert err.value.error_bound > 0


class TestFindRoot:
    def test_linear(self):
        assert find_root(lambda x: x - 1.0, 0.0, 2.0) == pytest.approx(1.0, abs=1e-10)

    def test_no_sign_change(self):
        with pytest.raises(BracketError):
            find_root(lambda x: x * x, 1.0, 2.0)

    def test_endpoint_root(self):
        assert find_root(lambda x: x, 0.0, 1.0) == 0.0

    def test_gm_hazard_crossing(self):
        # a e^(bx) = c has the closed solution ln(c/a)/b
        a, b, c = 0.0005, 0.1, 0.005
        root = find_root(lambda x: a * math.exp(b * x) - c, 0.0, 120.0)
        assert root == pytest.approx(math.log(c / a) / b, abs=1e-9)
        assert root == pytest.approx(23.0258509, abs=1e-6)


class TestUpperIncompleteGamma:
    def test_shape_one_is_exp(self):
        assert upper_incomplete_gamma(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-14)

    def test_half_shape_is_erfc(self):
        expected = math.sqrt(math.pi) * erfc(1.0)
        assert upper_incomplete_gamma(0.5, 1.0) == pytest.approx(expected, rel=1e-13)
        assert expected == pytest.approx(0.278806, abs=1e-6)

    @pytest.mark.parametrize(
        "u,x",
        [(-0.05, 0.005), (-0.5, 0.1), (-1.5, 1.0), (-2.7, 0.3), (0.0, 0.3), (-2.0, 0.7)],
    )
    def test_matches_direct_quadrature(self, u, x):
        assert upper_incomplete_gamma(u, x) == pytest.approx(
            quad_upper_gamma(u, x), rel=1e-10
        )

    def test_recurrence_on_lattice(self):
        for u in (-0.5, -0.05, 0.3, 1.7):
            for x in (0.005, 0.1, 1.0, 5.0):
                lhs = upper_incomplete_gamma(u + 1.0, x)
                rhs = u * upper_incomplete_gamma(u, x) + x**u * math.exp(-x)
                assert abs(lhs - rhs) <= 1e-12 * abs(lhs)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            upper_incomplete_gamma(-0.05, 0.0)
        with pytest.raises(DomainError):
            upper_incomplete_gamma(1.0, -1.0)

    @given(
        u=st.floats(-2.9, 2.9).filter(lambda v: v > 0.05 or abs(v - round(v)) > 0.05),
        x1=st.floats(0.02, 4.0),
        scale=st.floats(1.1, 3.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_positive_and_decreasing_in_x(self, u, x1, scale):
        g1 = upper_incomplete_gamma(u, x1)
        g2 = upper_incomplete_gamma(u, x1 * scale)
        assert g1 > 0 and g2 > 0
        assert g2 < g1


class TestGauss2F1:
    def test_unit_at_zero(self):
        for m, p, q in [(0.3, 1.0, 2.0), (5.0, 0.5, 1.5), (1.0, 2.0, 7.0)]:
            assert gauss_2f1(m, p, q, 0.0) == 1.0

    def test_log_closed_form(self):
        # 2F1(1,1;2;z) = -ln(1-z)/z
        assert gauss_2f1(1.0, 1.0, 2.0, 0.5) == pytest.approx(2.0 * math.log(2.0), abs=1e-12)
        z = 0.3
        assert gauss_2f1(1.0, 1.0, 2.0, z) == pytest.approx(-math.log1p(-z) / z, abs=1e-12)

    @pytest.mark.parametrize(
        "m,p,q,z",
        [
            (0.7, 1.3, 2.9, 0.4),
            (2.0, 0.5, 3.0, -1.5),
            (5.0, 1.0, 6.05, 0.99),
            (0.25, 0.75, 1.25, 0.6),
        ],
    )
    def test_matches_scipy(self, m, p, q, z):
        assert gauss_2f1(m, p, q, z) == pytest.approx(float(hyp2f1(m, p, q, z)), rel=1e-9)

    def test_symmetric_in_first_two_arguments(self):
        assert gauss_2f1(0.8, 1.7, 3.1, 0.35) == pytest.approx(
            gauss_2f1(1.7, 0.8, 3.1, 0.35), rel=1e-10
        )

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            gauss_2f1(1.0, 2.0, 2.0, 0.5)  # q must exceed p
        with pytest.raises(DomainError):
            gauss_2f1(1.0, -1.0, 2.0, 0.5)
        with pytest.raises(DomainError):
            gauss_2f1(1.0, 1.0, 2.0, 1.0)

    def test_large_first_argument_stays_finite(self):
        # frailty-style call: tiny gamma means a huge power inside the integral
        g = 1e-3
        val = gauss_2f1(1.0 / g, 1.0, 1.0 / g + 0.05 + 1.0, 1.0 - 1e-3)
        assert np.isfinite(val) and val > 0
