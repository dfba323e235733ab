"""Two-term expansion: component formulas, structural identities, orders."""

import math

import numpy as np
import pytest

from osckit.asymptotics import (
    TwoTermExpansion,
    compose,
    corrector,
    initial_layer,
    leading_term,
    residual_norm,
    resolving_time_count,
)
from osckit.catalog import FastProfile, SineSeries, SlowFunction, SourceFactor
from osckit.forward import HeatProblem

from _oracles import central_derivative

ENVELOPE = SineSeries({1: 1.0, 2: 1.0})
LINEAR_MEAN = SlowFunction.monomial(1.0, 1)
SINE_OSC = FastProfile([(1, 0.0, 1.0)])


def reference_problem(omega, horizon=1.0):
    return HeatProblem(ENVELOPE, SourceFactor(LINEAR_MEAN, SINE_OSC),
                       omega, horizon)


class TestLeadingTerm:
    def test_interior_point_values(self):
        # at x = pi/6: (t + e^-t - 1)/2 + (sqrt 3/32)(4t + e^-4t - 1)
        u0 = leading_term(ENVELOPE, LINEAR_MEAN)
        t = np.linspace(0.0, 2.0, 9)
        want = 0.5 * (t + np.exp(-t) - 1.0) \
            + math.sqrt(3.0) / 32.0 * (4.0 * t + np.exp(-4.0 * t) - 1.0)
        got = u0.evaluate_grid([math.pi / 6.0], t)[0]
        assert np.max(np.abs(got - want)) < 1e-14

    def test_zero_mean_gives_zero(self):
        u0 = leading_term(ENVELOPE, SlowFunction.zero())
        assert u0.evaluate_grid(np.linspace(0, math.pi, 9),
                                np.linspace(0, 1, 5)).max() == 0.0

    def test_single_mode_constant_mean(self):
        u0 = leading_term(SineSeries({1: 1.0}), SlowFunction.constant(1.0))
        x, t = 1.1, 0.7
        assert abs(u0(x, t) - (1.0 - math.exp(-t)) * math.sin(x)) < 1e-14

    def test_trace_slow_function_matches_grid(self):
        u0 = leading_term(ENVELOPE, LINEAR_MEAN)
        x0 = 0.8
        slow = u0.at_x(x0)
        t = np.linspace(0.0, 1.5, 11)
        assert np.allclose(slow(t), u0.evaluate_grid([x0], t)[0], atol=1e-13)


class TestCorrector:
    def test_reference_profile_at_center(self):
        v1 = corrector(ENVELOPE, SINE_OSC)
        tau = np.linspace(0.0, 2.0 * math.pi, 9)
        got = np.array([v1(math.pi / 2.0, 0.4, s) for s in tau])
        assert np.max(np.abs(got + np.cos(tau))) < 1e-14

    def test_zero_oscillation(self):
        v1 = corrector(ENVELOPE, FastProfile.zero())
        assert v1.profile.is_zero

    def test_cosine_oscillation(self):
        v1 = corrector(SineSeries({1: 1.0}), FastProfile([(1, 1.0, 0.0)]))
        x, t, tau = 0.6, 0.2, 2.5
        assert abs(v1(x, t, tau) - math.sin(x) * math.sin(tau)) < 1e-15

    def test_phase_derivative_recovers_forcing(self):
        # dv1/dtau = envelope * oscillation, exactly on the catalog
        rng = np.random.default_rng(17)
        osc = FastProfile([(1, rng.uniform(-1, 1), rng.uniform(-1, 1)),
                           (3, 0.0, rng.uniform(-1, 1))])
        v1 = corrector(ENVELOPE, osc)
        d = v1.profile.tau_derivative()
        t = np.linspace(0.0, 1.0, 7)
        tau = np.linspace(0.0, 2.0 * math.pi, 11)
        for ts in t:
            for taus in tau:
                want = osc(ts, taus)
                assert abs(d(ts, taus) - want) < 1e-14


class TestInitialLayer:
    def test_reference_level_and_trace(self):
        u1 = initial_layer(ENVELOPE, SINE_OSC)
        assert u1.level == 1.0
        t = np.linspace(0.0, 1.0, 9)
        got = u1.evaluate_grid([math.pi / 2.0], t)[0]
        assert np.max(np.abs(got - np.exp(-t))) < 1e-15

    def test_zero_initial_slice(self):
        osc = FastProfile([(1, SlowFunction.monomial(1.0, 1), 0.0)])
        u1 = initial_layer(ENVELOPE, osc)
        assert u1.level == 0.0

    def test_pure_cosine_oscillation_gives_zero_layer(self):
        u1 = initial_layer(ENVELOPE, FastProfile([(1, 1.0, 0.0)]))
        assert u1.level == 0.0
        assert u1.evaluate_grid([0.3], [0.5])[0, 0] == 0.0

    def test_matching_condition_cancels_corrector(self):
        rng = np.random.default_rng(23)
        for _ in range(5):
            osc = FastProfile([(1, rng.uniform(-1, 1), rng.uniform(-1, 1)),
                               (2, rng.uniform(-1, 1), rng.uniform(-1, 1))])
            u1 = initial_layer(ENVELOPE, osc)
            v1 = corrector(ENVELOPE, osc)
            x = np.linspace(0.0, math.pi, 33)
            defect = u1.evaluate_grid(x, [0.0])[:, 0] \
                + v1.envelope.evaluate_grid(x, [0.0])[:, 0] * v1.profile(0.0, 0.0)
            assert np.max(np.abs(defect)) < 1e-12


class TestComposition:
    def test_large_omega_limit_is_leading_term(self):
        expansion = TwoTermExpansion.build(ENVELOPE, LINEAR_MEAN, SINE_OSC)
        u = compose(expansion, 1e12, 17, 17, 1.0)
        u0 = expansion.leading.evaluate_grid(u.axes[0], u.axes[1])
        assert np.max(np.abs(u.values - u0)) < 1e-11

    def test_reference_trace_formula(self):
        # at x0 = pi/2: u0 + (e^-t - cos(omega t)) / omega
        omega = 50.0
        expansion = TwoTermExpansion.build(ENVELOPE, LINEAR_MEAN, SINE_OSC)
        t = np.linspace(0.0, 1.0, 257)
        grid = expansion.evaluate_grid([math.pi / 2.0], t, omega)[0]
        phi0 = np.exp(-t) + t - 1.0
        want = phi0 + (np.exp(-t) - np.cos(omega * t)) / omega
        assert np.max(np.abs(grid - want)) < 1e-13

    def test_additivity_in_envelope(self):
        omega = 30.0
        e1 = SineSeries({1: 0.7})
        e2 = SineSeries({2: -0.4})
        e12 = SineSeries({1: 0.7, 2: -0.4})
        x = np.linspace(0.0, math.pi, 17)
        t = np.linspace(0.0, 1.0, 17)

        def values(env):
            return TwoTermExpansion.build(env, LINEAR_MEAN, SINE_OSC) \
                .evaluate_grid(x, t, omega)

        assert np.max(np.abs(values(e12) - values(e1) - values(e2))) < 1e-13


class TestStructuralChecks:
    def test_leading_term_satisfies_heat_equation(self):
        # du0/dt - d2u0/dx2 - envelope * mean = 0; the time derivative comes
        # from the termwise-differentiated closed forms, cross-checked by
        # central differences
        u0 = leading_term(ENVELOPE, LINEAR_MEAN)
        rng = np.random.default_rng(31)
        x = rng.uniform(0.3, math.pi - 0.3, 8)
        t = rng.uniform(0.1, 1.9, 8)
        dudt = u0.time_derivative_grid(x, t)
        dudxx = u0.xx_derivative_grid(x, t)
        forcing = ENVELOPE.evaluate_grid(x, t) * LINEAR_MEAN(t)[None, :]
        assert np.max(np.abs(dudt - dudxx - forcing)) < 1e-8
        for i in (0, 3):
            fd = central_derivative(lambda s: u0(float(x[i]), s), float(t[i]))
            assert abs(dudt[i, i] - fd) < 1e-7

    def test_components_vanish_at_walls(self):
        expansion = TwoTermExpansion.build(ENVELOPE, LINEAR_MEAN, SINE_OSC)
        t = np.linspace(0.0, 1.0, 9)
        for x_wall in (0.0, math.pi):
            vals = expansion.evaluate_grid([x_wall], t, omega=40.0)
            assert np.max(np.abs(vals)) < 1e-12


class TestResidualNorm:
    def test_exact_when_no_oscillation(self):
        problem = HeatProblem(ENVELOPE, SourceFactor.steady(LINEAR_MEAN), 100.0, 1.0)
        assert residual_norm(problem, order=2, x_count=17, t_count=513) < 1e-10

    def test_order_one_residual_decreases(self):
        values = [residual_norm(reference_problem(w), order=1, x_count=33)
                  for w in (100.0, 200.0)]
        assert values[1] < values[0]

    def test_remainder_beats_first_order(self):
        ladder = (64.0, 128.0, 256.0, 512.0)
        weighted = []
        for w in ladder:
            problem = reference_problem(w)
            r2 = residual_norm(problem, order=2, x_count=33)
            r1 = residual_norm(problem, order=1, x_count=33)
            assert r2 < r1
            weighted.append(w * r2)
        assert all(a > b for a, b in zip(weighted, weighted[1:]))

    def test_coarse_grid_rejected(self):
        problem = reference_problem(512.0)
        with pytest.raises(ValueError, match="coarse"):
            residual_norm(problem, order=1, t_count=64)

    def test_resolving_count_scales_with_omega(self):
        assert resolving_time_count(2.0 * math.pi * 100.0, 1.0) >= 1601
