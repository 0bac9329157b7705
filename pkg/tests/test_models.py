import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as scipy_integrate

import makeham as mk

GRID = np.arange(0.0, 120.5, 0.5)


class TestValidate:
    def test_fig_parameters_pass(self):
        report = mk.validate(mk.GompertzMakeham(0.0005, 0.1, 0.005))
        assert report.ok and report.violations == ()

    def test_zero_a_flagged(self):
        report = mk.validate(mk.GompertzMakeham(0.0, 0.1, 0.005))
        assert not report.ok
        assert "a must be > 0" in report.violations

    def test_zero_c_allowed(self):
        assert mk.validate(mk.GompertzMakeham(0.0005, 0.1, 0.0)).ok

    def test_multiple_violations(self):
        report = mk.validate(mk.SilerMakeham(-1.0, 0.0, 0.0005, 0.1, -0.1))
        assert set(report.violations) == {
            "a1 must be > 0",
            "b1 must be > 0",
            "c must be >= 0",
        }

    def test_nonfinite_flagged(self):
        report = mk.validate(mk.GompertzMakeham(math.nan, 0.1, 0.005))
        assert "a must be finite" in report.violations


class TestHazards:
    def test_gm_at_zero(self, fig1a):
        assert mk.baseline_hazard(fig1a, 0.0) == pytest.approx(0.0005, rel=1e-15)
        assert mk.total_hazard(fig1a, 0.0) == pytest.approx(0.0055, rel=1e-15)

    def test_siler_at_zero(self):
        siler = mk.SilerMakeham(0.01, 1.0, 0.0005, 0.1, 0.005)
        assert mk.baseline_hazard(siler, 0.0) == pytest.approx(0.0105, rel=1e-15)

    def test_gm_equals_makeham_rate_at_crossing(self, fig1a):
        # h(x) = c at x = ln(c/a)/b, solved independently by bisection
        lo, hi = 0.0, 120.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mk.baseline_hazard(fig1a, mid) < fig1a.c:
                lo = mid
            else:
                hi = mid
        assert mid == pytest.approx(23.0258509, abs=1e-5)
        assert mk.baseline_hazard(fig1a, 23.0258509299) == pytest.approx(0.005, rel=1e-9)
        assert mk.total_hazard(fig1a, 23.0258509299) == pytest.approx(0.010, rel=1e-9)

    def test_makeham_term_removed(self):
        with_c = mk.GompertzMakeham(0.0005, 0.1, 0.005)
        without = mk.GompertzMakeham(0.0005, 0.1, 0.0)
        xs = np.array([0.0, 17.3, 60.0])
        assert mk.total_hazard(without, xs) == pytest.approx(
            mk.baseline_hazard(with_c, xs), rel=1e-15
        )

    def test_ggm_hazard_plateau(self):
        ggm = mk.GammaGompertzMakeham(0.0005, 0.1, 0.2, 0.005)
        assert mk.baseline_hazard(ggm, 1e4) == pytest.approx(ggm.b / ggm.gamma, rel=1e-12)

    def test_array_and_scalar_agree(self, model_zoo):
        for model in model_zoo:
            arr = mk.baseline_hazard(model, GRID)
            assert arr.shape == GRID.shape
            assert arr[40] == mk.baseline_hazard(model, float(GRID[40]))


class TestCumulativeHazard:
    def test_zero_at_zero(self, model_zoo):
        for model in model_zoo:
            assert mk.cumulative_hazard(model, 0.0) == 0.0

    def test_gm_closed_form_value(self, fig1a):
        expected = 0.0005 / 0.1 * (math.e - 1.0) + 0.05
        assert mk.cumulative_hazard(fig1a, 10.0) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("x", [0.5, 10.0, 50.0, 120.0])
    def test_matches_quadrature_of_total_hazard(self, model_zoo, x):
        for model in model_zoo:
            oracle, _ = scipy_integrate.quad(
                lambda t: mk.total_hazard(model, t), 0.0, x,
                epsabs=1e-13, epsrel=1e-13, limit=500,
            )
            assert abs(mk.cumulative_hazard(model, x) - oracle) < 1e-10

    def test_monotone_nondecreasing(self, model_zoo):
        for model in model_zoo:
            values = mk.cumulative_hazard(model, GRID)
            assert np.all(np.diff(values) >= 0.0)


class TestSurvivalAndDensity:
    def test_survival_one_at_zero(self, model_zoo):
        for model in model_zoo:
            assert mk.survival(model, 0.0) == 1.0

    def test_survival_is_exp_of_cumhaz(self, model_zoo):
        for model in model_zoo:
            s = mk.survival(model, GRID)
            assert np.array_equal(s, np.exp(-mk.cumulative_hazard(model, GRID)))

    def test_survival_limits(self, fig1a):
        assert mk.survival(fig1a, 50.0) == pytest.approx(
            math.exp(-0.005 * (math.exp(5.0) - 1.0) - 0.25), rel=1e-14
        )
        assert mk.survival(fig1a, 300.0) == 0.0

    def test_survival_non_increasing(self, model_zoo):
        for model in model_zoo:
            assert np.all(np.diff(mk.survival(model, GRID)) <= 0.0)

    def test_density_at_zero_is_initial_hazard(self, fig1a):
        assert mk.density(fig1a, 0.0) == pytest.approx(0.0055, rel=1e-15)

    def test_density_nonnegative(self, model_zoo):
        for model in model_zoo:
            assert np.all(mk.density(model, GRID) >= 0.0)

    def test_density_integrates_to_one(self, fig_models):
        for model in fig_models.values():
            total, _ = scipy_integrate.quad(
                lambda s: mk.density(model, s / (1.0 - s)) / (1.0 - s) ** 2,
                0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=500,
            )
            assert total == pytest.approx(1.0, abs=1e-8)

    def test_fig_b_density_has_interior_and_boundary_peaks(self, fig_models):
        f = mk.density(fig_models["b"], np.arange(0.0, 10.0, 0.01))
        assert f[0] > f[1]  # falling off the boundary
        interior = np.flatnonzero((f[1:-1] > f[:-2]) & (f[1:-1] > f[2:]))
        assert interior.size >= 1  # and a genuine interior bump

    def test_overflow_guard(self, fig1a):
        assert mk.survival(fig1a, 1e4) == 0.0
        assert mk.density(fig1a, 1e4) == 0.0
        assert math.isinf(mk.cumulative_hazard(fig1a, 1e4))
        assert math.isinf(mk.baseline_hazard(fig1a, 1e4))


class TestFamilyRelations:
    def test_gamma_to_zero_recovers_gm(self):
        gm = mk.GompertzMakeham(0.0005, 0.1, 0.005)
        ggm = mk.GammaGompertzMakeham(0.0005, 0.1, 1e-8, 0.005)
        xs = np.arange(0.0, 120.5, 0.5)
        rel = np.abs(mk.baseline_hazard(ggm, xs) / mk.baseline_hazard(gm, xs) - 1.0)
        assert np.max(rel) < 1e-6

    def test_kannisto_is_beard_with_unit_k(self):
        kan = mk.KannistoMakeham(0.001, 0.1, 0.01)
        beard = mk.BeardMakeham(0.001, 0.1, 1.0, 0.01)
        for op in (mk.baseline_hazard, mk.total_hazard, mk.cumulative_hazard,
                   mk.survival, mk.density):
            assert np.array_equal(op(kan, GRID), op(beard, GRID)), op.__name__

    def test_gm_with_zero_c_is_pure_gompertz(self):
        gm = mk.GompertzMakeham(0.0005, 0.1, 0.0)
        xs = np.array([0.0, 25.0, 70.0])
        gompertz_survival = np.exp(-(0.0005 / 0.1) * np.expm1(0.1 * xs))
        assert mk.survival(gm, xs) == pytest.approx(gompertz_survival, rel=1e-14)


class TestModelHelpers:
    def test_round_trip(self, model_zoo):
        for model in model_zoo:
            name = mk.family_name(model)
            rebuilt = mk.from_params(name, list(mk.parameters(model).values()))
            assert rebuilt == model

    def test_param_names(self):
        assert mk.param_names("gm") == ("a", "b", "c")
        assert mk.param_names("siler") == ("a1", "b1", "a2", "b2", "c")

    def test_from_params_length_check(self):
        with pytest.raises(ValueError):
            mk.from_params("gm", [0.1, 0.2])


@given(
    a=st.floats(1e-5, 5e-3),
    b=st.floats(0.05, 0.3),
    c=st.floats(0.0, 0.05),
    x=st.floats(0.0, 110.0),
)
@settings(max_examples=60, deadline=None)
def test_survival_exp_identity_property(a, b, c, x):
    model = mk.GompertzMakeham(a, b, c)
    assert mk.survival(model, x) == math.exp(-mk.cumulative_hazard(model, x))
    assert 0.0 <= mk.survival(model, x) <= 1.0
