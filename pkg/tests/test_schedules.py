"""Unit and property tests for the schedule evaluators.

Expected values are frozen from independent hand evaluation of the closed
forms; grid comparisons use inline re-implementations of the base formulas
as oracles.
"""

import math
from dataclasses import FrozenInstanceError

import numpy as np
import pytest

from kdecay.errors import DomainError, UnsupportedCaseError
from kdecay.schedules import (
    Clr,
    CosineKDecay,
    CurveSample,
    ExpKDecay,
    Htd,
    KDecayParams,
    PolynomialKDecay,
    ScheduleSpec,
    Sgdr,
    StepDecay,
    derivative_increment_schedule,
    evaluate,
    kdecay_term,
    lr_baseline,
    lr_cosine_kdecay,
    lr_exp_kdecay,
    lr_polynomial_kdecay,
    polynomial_kth_derivative,
    sample_curve,
)

P = KDecayParams  # shorthand: P(eta0, eta_e, t0, k)


def pol(k=1.0, n=1.0, clamp=False, eta0=0.1, eta_e=0.001, t0=100.0):
    return ScheduleSpec(PolynomialKDecay(n=n), P(eta0, eta_e, t0, k), clamp=clamp)


def cos_spec(k=1.0, clamp=False, eta0=0.1, eta_e=0.001, t0=100.0):
    return ScheduleSpec(CosineKDecay(), P(eta0, eta_e, t0, k), clamp=clamp)


def exp_spec(k=1.0, clamp=False, eta0=0.1, eta_e=0.001, t0=100.0):
    return ScheduleSpec(ExpKDecay(), P(eta0, eta_e, t0, k), clamp=clamp)


GRID = np.linspace(0.0, 100.0, 1001)


class TestParamsValidation:
    def test_rejects_k_below_one(self):
        with pytest.raises(DomainError):
            P(0.1, 0.001, 100.0, 0.5)

    def test_rejects_eta0_not_above_eta_e(self):
        with pytest.raises(DomainError):
            P(0.001, 0.001, 100.0)
        with pytest.raises(DomainError):
            P(0.0005, 0.001, 100.0)

    def test_rejects_negative_eta_e(self):
        with pytest.raises(DomainError):
            P(0.1, -0.001, 100.0)

    def test_rejects_nonpositive_t0(self):
        with pytest.raises(DomainError):
            P(0.1, 0.001, 0.0)

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            P(math.nan, 0.001, 100.0)
        with pytest.raises(DomainError):
            P(0.1, 0.001, math.inf)

    def test_specs_are_immutable(self):
        spec = pol()
        with pytest.raises(FrozenInstanceError):
            spec.clamp = False

    def test_milestones_must_ascend_and_fit_horizon(self):
        with pytest.raises(DomainError):
            StepDecay(milestones=(60.0, 60.0), gamma=0.1)
        with pytest.raises(DomainError):
            ScheduleSpec(StepDecay((60.0, 150.0), 0.1), P(0.1, 0.001, 100.0))

    def test_htd_bounds_ordered(self):
        with pytest.raises(DomainError):
            Htd(lower=3.0, upper=-6.0)


class TestKDecayTerm:
    """The additive term (eta0 - eta_e) * ((t/T0)**k - t/T0)."""

    def test_zero_at_t_zero_for_any_k(self):
        for k in (1.0, 1.5, 2.0, 5.0):
            assert kdecay_term(P(0.1, 0.001, 100.0, k), 0.0) == 0.0

    def test_zero_everywhere_at_k_one(self):
        p = P(0.1, 0.001, 100.0, 1.0)
        assert kdecay_term(p, 37.0) == 0.0
        for t in GRID:
            assert kdecay_term(p, float(t)) == 0.0

    def test_hand_value_k2_midpoint(self):
        # hand evaluation: 0.099 * (0.25 - 0.5) = -0.02475
        got = kdecay_term(P(0.1, 0.001, 100.0, 2.0), 50.0)
        assert got == pytest.approx(-0.02475, abs=1e-12)

    def test_zero_at_both_endpoints(self):
        for k in (1.0, 1.5, 2.0, 5.0):
            p = P(0.1, 0.001, 100.0, k)
            assert kdecay_term(p, 0.0) == 0.0
            assert kdecay_term(p, 100.0) == pytest.approx(0.0, abs=1e-15)

    def test_strictly_negative_on_interior_for_k_above_one(self):
        for k in (1.5, 2.0, 3.0, 5.0):
            p = P(0.1, 0.001, 100.0, k)
            for t in GRID[1:-1]:
                assert kdecay_term(p, float(t)) < 0.0

    def test_domain_errors(self):
        p = P(0.1, 0.001, 100.0, 2.0)
        with pytest.raises(DomainError):
            kdecay_term(p, -1.0)
        with pytest.raises(DomainError):
            kdecay_term(p, 100.5)
        with pytest.raises(DomainError):
            kdecay_term(p, math.nan)


class TestPolynomialKDecay:
    def test_linear_midpoint(self):
        # 0.099 * 0.5 + 0.001
        assert lr_polynomial_kdecay(pol(k=1.0, n=1.0), 50.0) == pytest.approx(0.0505, abs=1e-12)

    def test_endpoints_both_clamp_modes(self):
        for clamp in (False, True):
            for n in (0.5, 1.0, 2.0):
                for k in (1.0, 2.0, 5.0):
                    spec = pol(k=k, n=n, clamp=clamp)
                    assert lr_polynomial_kdecay(spec, 0.0) == pytest.approx(0.1, abs=1e-12)
                    assert lr_polynomial_kdecay(spec, 100.0) == pytest.approx(0.001, abs=1e-12)

    def test_n1_k2_equals_n2_k1_pointwise(self):
        # algebraic identity: (1 - s) + (s^2 - s) = (1 - s)^2
        a = pol(k=2.0, n=1.0)
        b = pol(k=1.0, n=2.0)
        diffs = [abs(lr_polynomial_kdecay(a, t) - lr_polynomial_kdecay(b, t)) for t in GRID]
        assert max(diffs) <= 1e-12

    def test_wrong_family_rejected(self):
        with pytest.raises(DomainError):
            lr_polynomial_kdecay(cos_spec(), 10.0)


class TestCosineKDecay:
    def test_starts_at_eta0(self):
        assert lr_cosine_kdecay(cos_spec(k=1.0), 0.0) == pytest.approx(0.1, abs=1e-12)

    def test_midpoint_k1(self):
        # 0.5 * 0.099 * 1 + 0.001
        assert lr_cosine_kdecay(cos_spec(k=1.0), 50.0) == pytest.approx(0.0505, abs=1e-12)

    def test_raw_dip_below_eta_e_k2(self):
        # hand evaluation: 0.0495 * (1 + cos(0.75*pi)) + 0.001 + 0.099 * (0.5625 - 0.75)
        #                = 0.015498214331265894 - 0.0185625 = -0.003064285668734106
        raw = lr_cosine_kdecay(cos_spec(k=2.0, clamp=False), 75.0)
        assert raw == pytest.approx(-0.003064285668734106, abs=1e-12)
        assert raw < 0.001  # why the clamp defaults on

    def test_clamp_restores_floor(self):
        assert lr_cosine_kdecay(cos_spec(k=2.0, clamp=True), 75.0) == 0.001

    def test_ends_at_eta_e(self):
        for k in (1.0, 1.5, 3.0):
            assert lr_cosine_kdecay(cos_spec(k=k), 100.0) == pytest.approx(0.001, abs=1e-12)


class TestExpKDecay:
    def test_start_is_eta0_minus_eta_e(self):
        for k in (1.0, 2.0, 5.0):
            assert lr_exp_kdecay(exp_spec(k=k), 0.0) == pytest.approx(0.099, abs=1e-12)

    def test_end_value_k1(self):
        expected = 0.099 * math.exp(-1.0)
        assert lr_exp_kdecay(exp_spec(k=1.0), 100.0) == pytest.approx(expected, abs=1e-12)

    def test_k2_midpoint_composes_term(self):
        expected = 0.099 * math.exp(-0.5) - 0.02475
        assert lr_exp_kdecay(exp_spec(k=2.0), 50.0) == pytest.approx(expected, abs=1e-12)


class TestBaselines:
    def test_step_decay_before_first_milestone(self):
        spec = ScheduleSpec(StepDecay((60.0, 120.0), 0.1), P(0.1, 0.001, 200.0))
        assert lr_baseline(spec, 0.0) == pytest.approx(0.1)
        assert lr_baseline(spec, 59.9) == pytest.approx(0.1)

    def test_step_decay_counts_milestones_at_or_below_t(self):
        spec = ScheduleSpec(StepDecay((60.0, 120.0), 0.1), P(0.1, 0.001, 200.0))
        assert lr_baseline(spec, 60.0) == pytest.approx(0.01)
        assert lr_baseline(spec, 130.0) == pytest.approx(0.001)

    def test_sgdr_single_period_is_plain_cosine(self):
        spec = ScheduleSpec(Sgdr(period0=100.0, period_mult=1.0), P(0.1, 0.001, 100.0))
        for t in GRID:
            expected = 0.001 + 0.5 * 0.099 * (1.0 + math.cos(math.pi * t / 100.0))
            assert lr_baseline(spec, float(t)) == pytest.approx(expected, abs=1e-12)

    def test_sgdr_restarts(self):
        spec = ScheduleSpec(Sgdr(period0=50.0, period_mult=1.0), P(0.1, 0.001, 150.0))
        # end of first period
        assert lr_baseline(spec, 50.0) == pytest.approx(0.001, abs=1e-12)
        # quarter into the second period: phase 25 of 50
        assert lr_baseline(spec, 75.0) == pytest.approx(0.001 + 0.5 * 0.099, abs=1e-12)

    def test_sgdr_period_mult_stretches_periods(self):
        spec = ScheduleSpec(Sgdr(period0=40.0, period_mult=2.0), P(0.1, 0.001, 200.0))
        # t=100 falls 60 into the second period of length 80
        expected = 0.001 + 0.5 * 0.099 * (1.0 + math.cos(math.pi * 60.0 / 80.0))
        assert lr_baseline(spec, 100.0) == pytest.approx(expected, abs=1e-12)

    def test_clr_triangle(self):
        spec = ScheduleSpec(Clr(half_cycle=25.0), P(0.1, 0.001, 100.0))
        assert lr_baseline(spec, 0.0) == pytest.approx(0.001)
        assert lr_baseline(spec, 25.0) == pytest.approx(0.1)
        assert lr_baseline(spec, 50.0) == pytest.approx(0.001)
        assert lr_baseline(spec, 12.5) == pytest.approx(0.0505)

    def test_htd_matches_tanh_formula(self):
        spec = ScheduleSpec(Htd(), P(0.1, 0.001, 100.0))
        for t in (0.0, 10.0, 50.0, 90.0, 100.0):
            expected = 0.001 + 0.5 * 0.099 * (1.0 - math.tanh(-6.0 + 9.0 * t / 100.0))
            assert lr_baseline(spec, t) == pytest.approx(expected, abs=1e-12)

    def test_kdecay_specs_rejected(self):
        with pytest.raises(DomainError):
            lr_baseline(pol(), 10.0)


class TestDerivativeIncrement:
    def test_zero_increment_is_identity(self):
        spec = pol(k=1.0, n=0.5)
        for t in (0.0, 12.5, 80.0):
            assert derivative_increment_schedule(spec, 1, 0.0, t) == evaluate(spec, t)

    def test_first_order_adds_alpha_times_t(self):
        spec = pol(k=1.0, n=0.5, t0=10000.0)
        base = evaluate(spec, 10000.0)
        got = derivative_increment_schedule(spec, 1, 0.000005, 10000.0)
        assert got == pytest.approx(base + 0.05, abs=1e-12)

    def test_second_order_divides_by_factorial(self):
        spec = pol(k=1.0, n=1.0)
        base = evaluate(spec, 3.0)
        got = derivative_increment_schedule(spec, 2, 2.0, 3.0)
        assert got == pytest.approx(base + 9.0, abs=1e-12)

    def test_integral_float_order_accepted(self):
        spec = pol()
        assert derivative_increment_schedule(spec, 2.0, 1.0, 2.0) == pytest.approx(
            evaluate(spec, 2.0) + 2.0, abs=1e-12
        )

    def test_non_integer_order_rejected(self):
        with pytest.raises(DomainError):
            derivative_increment_schedule(pol(), 1.5, 0.001, 10.0)

    def test_clamp_applies_to_sum(self):
        spec = pol(k=1.0, n=1.0, clamp=True)
        # large increment pushes past eta0; clamp caps it
        assert derivative_increment_schedule(spec, 1, 1.0, 50.0) == 0.1


class TestPolynomialKthDerivative:
    def test_first_order(self):
        got = polynomial_kth_derivative(0.1, 0.001, 100.0, 1, 1)
        assert got == pytest.approx(-0.00099, abs=1e-15)

    def test_second_order_unit_horizon(self):
        got = polynomial_kth_derivative(0.1, 0.001, 1.0, 2, 2)
        assert got == pytest.approx(0.198, abs=1e-15)

    def test_n_must_equal_k(self):
        with pytest.raises(UnsupportedCaseError):
            polynomial_kth_derivative(0.1, 0.001, 100.0, 2, 1)

    def test_matches_central_differences(self):
        """Order-k central differences of the base polynomial at n=k."""
        eta0, eta_e, t0 = 0.1, 0.001, 100.0
        h = t0 / 1e4
        for k in (1, 2, 3):
            spec = pol(k=1.0, n=float(k), t0=t0)
            f = lambda t: lr_polynomial_kdecay(spec, t)
            expected = polynomial_kth_derivative(eta0, eta_e, t0, k, k)
            for t in (25.0, 50.0, 75.0):
                fd = _central_kth_derivative(f, t, k, h)
                assert abs(fd - expected) / abs(expected) <= 1e-4


def _central_kth_derivative(f, x, k, h):
    """Independent finite-difference oracle for low derivative orders."""
    if k == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if k == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / h**2
    if k == 3:
        return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) / (2.0 * h**3)
    raise ValueError(k)


class TestSampleCurve:
    def test_two_points_are_the_endpoints(self):
        samples = sample_curve(pol(k=1.0, n=1.0), 2)
        assert samples[0] == CurveSample(0.0, pytest.approx(0.1, abs=1e-12))
        assert samples[1] == CurveSample(100.0, pytest.approx(0.001, abs=1e-12))

    def test_cosine_midpoint(self):
        samples = sample_curve(cos_spec(k=1.0), 3)
        assert samples[1].t == 50.0
        assert samples[1].lr == pytest.approx((0.1 + 0.001) / 2.0, abs=1e-12)

    def test_grid_spacing(self):
        samples = sample_curve(pol(), 101)
        assert len(samples) == 101
        spacings = np.diff([s.t for s in samples])
        np.testing.assert_allclose(spacings, 1.0, atol=1e-12)
        assert samples[-1].t == 100.0

    def test_samples_match_evaluator(self):
        spec = cos_spec(k=2.5, clamp=True)
        for s in sample_curve(spec, 17):
            assert s.lr == evaluate(spec, s.t)

    def test_too_few_points_rejected(self):
        with pytest.raises(DomainError):
            sample_curve(pol(), 1)


class TestFamilyInvariants:
    """Cross-family properties: reductions, clamping, monotonicity, purity."""

    def test_k1_reduction_to_base_families(self):
        """At k=1 every k-decay family equals its base schedule."""
        d, eta_e, t0 = 0.099, 0.001, 100.0
        bases = {
            "pol": (pol(k=1.0, n=0.5), lambda s: d * (1.0 - s) ** 0.5 + eta_e),
            "cos": (cos_spec(k=1.0), lambda s: 0.5 * d * (1.0 + math.cos(math.pi * s)) + eta_e),
            "exp": (exp_spec(k=1.0), lambda s: d * math.exp(-s)),
        }
        for name, (spec, base) in bases.items():
            sup = max(abs(evaluate(spec, t) - base(t / t0)) for t in GRID)
            assert sup <= 1e-12, name

    def test_clamp_keeps_outputs_in_range(self):
        rng = np.random.default_rng(20240811)
        params_t0 = 100.0
        for _ in range(2000):
            k = float(rng.uniform(1.0, 5.0))
            n = float(rng.uniform(0.5, 3.0))
            t = float(rng.uniform(0.0, params_t0))
            fam = rng.integers(0, 3)
            if fam == 0:
                spec = pol(k=k, n=n, clamp=True)
            elif fam == 1:
                spec = cos_spec(k=k, clamp=True)
            else:
                spec = exp_spec(k=k, clamp=True)
            lr = evaluate(spec, t)
            assert 0.001 <= lr <= 0.1

    def test_pol_n1_low_k_monotone_nonincreasing(self):
        """POL N=1 with k in [1, 2] decays monotonically even unclamped."""
        d, t0 = 0.099, 100.0
        for k in (1.0, 1.3, 1.7, 2.0):
            spec = pol(k=k, n=1.0, clamp=False)
            values = [evaluate(spec, t) for t in GRID]
            assert max(np.diff(values)) <= 1e-15
            for t in GRID:
                slope = d * (k * float(t) ** (k - 1.0) / t0**k - 2.0 / t0)
                assert slope <= 1e-15

    def test_purity_bit_identical(self):
        spec = cos_spec(k=2.5, clamp=True)
        for t in (0.0, 12.34, 99.99):
            assert evaluate(spec, t) == evaluate(spec, t)

    def test_higher_k_never_raises_interior_lr(self):
        """The k-decay term decreases with k, so raw interior LR does too."""
        for maker in (pol, cos_spec, exp_spec):
            lo = maker(k=1.5)
            hi = maker(k=3.0)
            for t in GRID[1:-1]:
                assert evaluate(hi, float(t)) <= evaluate(lo, float(t)) + 1e-15
