"""Level-bisection optimizer tests on synthetic and full-link objectives."""

import numpy as np
import pytest

from mcvdlink import (
    ConvergenceError,
    OptimizerConfig,
    bisection_optimize,
    derivative_sign_scan,
    feasibility,
    golden_section_maximize,
    objective,
)
from mcvdlink.optimizer import _grid_max
from conftest import standard_scenario


class FakeObjective:
    """Stands in for the link objective in shape-recovery tests."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, t):
        self.calls += 1
        return self.fn(t)


def optimize_function(fn, config):
    """Run the bisection machinery against an arbitrary callable."""
    from mcvdlink.optimizer import BisectionStep, BisectionTrace

    lower, upper = 0.0, config.level_upper_init
    witness = None
    trace = BisectionTrace()
    for iteration in range(1, config.max_iterations + 1):
        level = 0.5 * (lower + upper)
        best_t, best_f = _grid_max(fn, config)
        feasible = best_f > level
        if feasible:
            lower = level
            witness = best_t
        else:
            upper = level
        trace.steps.append(BisectionStep(level, lower, upper, feasible, best_t))
        if abs(upper - lower) <= config.epsilon:
            if witness is None:
                witness, lower = _grid_max(fn, config)
            return witness, lower, trace
    raise ConvergenceError("no convergence", trace=trace.steps)


class TestSyntheticRecovery:
    def test_recovers_parabola_peak(self):
        config = OptimizerConfig(epsilon=1e-4, t_min=0.001, t_max=0.1, level_upper_init=10.0)
        fn = FakeObjective(lambda t: 5.0 - 2000.0 * (t - 0.04) ** 2)
        t_star, f_star, _ = optimize_function(fn, config)
        assert t_star == pytest.approx(0.04, abs=1e-3)
        assert f_star == pytest.approx(5.0, abs=1e-3)

    def test_recovers_skewed_unimodal_peak(self):
        config = OptimizerConfig(epsilon=1e-5, t_min=0.001, t_max=0.1, level_upper_init=10.0)
        fn = FakeObjective(lambda t: t * np.exp(-60.0 * t) * 400.0)
        t_star, f_star, _ = optimize_function(fn, config)
        truth_t = 1.0 / 60.0
        truth_f = truth_t * np.exp(-1.0) * 400.0
        assert t_star == pytest.approx(truth_t, rel=0.01)
        assert f_star == pytest.approx(truth_f, rel=0.01)

    def test_interval_halves_each_iteration(self):
        config = OptimizerConfig(epsilon=1e-4, t_min=0.001, t_max=0.1, level_upper_init=8.0)
        _, _, trace = optimize_function(lambda t: 3.0 - 100.0 * (t - 0.05) ** 2, config)
        widths = [s.upper - s.lower for s in trace.steps]
        for prev, cur in zip(widths, widths[1:]):
            assert cur == pytest.approx(prev / 2.0, rel=1e-12)
        assert widths[0] == pytest.approx(config.level_upper_init / 2.0, rel=1e-12)

    def test_nested_epsilon_refines_the_level(self):
        fn = lambda t: 5.0 - 2000.0 * (t - 0.04) ** 2
        results = []
        for eps in (0.1, 0.01, 0.001):
            config = OptimizerConfig(
                epsilon=eps, t_min=0.001, t_max=0.1, level_upper_init=10.0
            )
            _, f_star, _ = optimize_function(fn, config)
            results.append(abs(f_star - 5.0))
        assert results[0] <= 0.1 and results[1] <= 0.01 and results[2] <= 0.001

    def test_flat_zero_objective_returns_grid_point(self):
        config = OptimizerConfig(epsilon=0.01, t_min=0.001, t_max=0.1, level_upper_init=10.0)
        t_star, f_star, _ = optimize_function(lambda t: 0.0, config)
        assert f_star == 0.0
        assert config.t_min <= t_star <= config.t_max


class TestFeasibility:
    def test_witness_reported_when_feasible(self):
        scenario = standard_scenario(distance_um=60.0, n_total=150)
        config = OptimizerConfig(t_min=0.005, t_max=0.03, feasibility_samples=100)
        ok, witness = feasibility(1.0, scenario, config)
        assert ok and config.t_min <= witness <= config.t_max

    def test_infeasible_level_has_no_witness(self):
        scenario = standard_scenario(distance_um=60.0, n_total=150)
        config = OptimizerConfig(t_min=0.005, t_max=0.03, feasibility_samples=100)
        ok, witness = feasibility(1e6, scenario, config)
        assert not ok and witness is None

    def test_negative_level_rejected(self):
        scenario = standard_scenario(distance_um=60.0, n_total=150)
        with pytest.raises(ValueError):
            feasibility(-1.0, scenario, OptimizerConfig())


class TestLinkOptimization:
    def test_bisection_agrees_with_golden_section(self):
        scenario = standard_scenario(distance_um=60.0, n_total=150)
        config = OptimizerConfig(
            epsilon=0.01, t_min=0.004, t_max=0.04, feasibility_samples=120
        )
        optimum, trace = bisection_optimize(scenario, config)
        t_gold, f_gold = golden_section_maximize(scenario, config, tol=1e-6)
        assert optimum.f_star == pytest.approx(f_gold, abs=2 * config.epsilon)
        assert len(trace.steps) == optimum.iterations

    def test_objective_positive_and_rate_bounded(self):
        scenario = standard_scenario(distance_um=60.0, n_total=150)
        for t_s in (0.008, 0.018, 0.03):
            f = objective(t_s, scenario)
            assert 0.0 <= f <= 1.0 / t_s

    def test_objective_rejects_nonpositive_duration(self):
        scenario = standard_scenario()
        with pytest.raises(ValueError):
            objective(0.0, scenario)


class TestDerivativeSignScan:
    def test_single_change_on_unimodal_link_objective(self):
        scenario = standard_scenario(distance_um=60.0, n_total=150)
        signs, single = derivative_sign_scan(scenario, np.linspace(0.004, 0.04, 40))
        assert single
        assert np.any(signs != 0)

    def test_grid_validation(self):
        scenario = standard_scenario()
        with pytest.raises(ValueError):
            derivative_sign_scan(scenario, [0.01, 0.02])
        with pytest.raises(ValueError):
            derivative_sign_scan(scenario, [0.03, 0.02, 0.01])


class TestConfigValidation:
    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            OptimizerConfig(epsilon=0.0)

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            OptimizerConfig(t_min=0.1, t_max=0.01)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            OptimizerConfig(feasibility_samples=50)
