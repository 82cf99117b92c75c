"""Symbol-duration optimization by level bisection.

The objective is the successful-bit rate: success probability of the
relayed bit times the symbol rate 1/t_s.  The objective is numerically
quasi-concave in the symbol duration, so the maximum is found by
bisecting on the level l and asking whether the l-superlevel set is
non-empty over the search interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ber import success_probability
from .errors import ConvergenceError, NoThresholdError
from .scenario import Scenario, evaluate_link


@dataclass(frozen=True)
class OptimizerConfig:
    epsilon: float = 0.01
    t_min: float = 1e-3
    t_max: float = 0.1
    feasibility_samples: int = 200
    level_upper_init: float = 1e3
    max_iterations: int = 64

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0.0 < self.t_min < self.t_max:
            raise ValueError("need 0 < t_min < t_max")
        if self.feasibility_samples < 100:
            raise ValueError("feasibility grid needs at least 100 samples")


@dataclass(frozen=True)
class Optimum:
    t_star: float
    f_star: float
    iterations: int


@dataclass
class BisectionStep:
    level: float
    lower: float
    upper: float
    feasible: bool
    witness: float | None


@dataclass
class BisectionTrace:
    steps: list[BisectionStep] = field(default_factory=list)


def objective(t_s: float, scenario: Scenario) -> float:
    """Successful received bits per second at this symbol duration."""
    if t_s <= 0:
        raise ValueError(f"symbol duration must be positive, got {t_s}")
    try:
        ev = evaluate_link(scenario, t_s)
    except NoThresholdError:
        # No molecules reach the receiver in time: the bit is a coin flip
        # and the successful-bit rate is zero.
        return 0.0
    return success_probability(ev.ber_relay.p_e) / t_s


class _ObjectiveCache:
    """Memoizes objective evaluations across feasibility calls."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self._values: dict[float, float] = {}

    def __call__(self, t_s: float) -> float:
        if t_s not in self._values:
            self._values[t_s] = objective(t_s, self.scenario)
        return self._values[t_s]


def _grid_max(fn, config: OptimizerConfig) -> tuple[float, float]:
    """Best point over the uniform grid plus one local refinement pass."""
    grid = np.linspace(config.t_min, config.t_max, config.feasibility_samples)
    values = [fn(t) for t in grid]
    k = int(np.argmax(values))
    best_t, best_f = float(grid[k]), values[k]
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    for t in np.linspace(lo, hi, 21):
        f = fn(float(t))
        if f > best_f:
            best_t, best_f = float(t), f
    return best_t, best_f


def feasibility(
    l: float, scenario: Scenario, config: OptimizerConfig, _fn=None
) -> tuple[bool, float | None]:
    """Is there a sampled symbol duration whose objective exceeds ``l``?"""
    if l < 0:
        raise ValueError(f"level must be non-negative, got {l}")
    fn = _fn or _ObjectiveCache(scenario)
    best_t, best_f = _grid_max(fn, config)
    if best_f > l:
        return True, best_t
    return False, None


def bisection_optimize(
    scenario: Scenario, config: OptimizerConfig | None = None
) -> tuple[Optimum, BisectionTrace]:
    """Level-bisection search for the optimal symbol duration.

    Halves the [lower, upper] level interval each iteration, keeping the
    lower bound feasible, until the gap closes below epsilon.  The last
    feasibility witness is reported as the optimal duration.
    """
    config = config or OptimizerConfig()
    fn = _ObjectiveCache(scenario)
    lower, upper = 0.0, config.level_upper_init
    witness = None
    trace = BisectionTrace()

    for iteration in range(1, config.max_iterations + 1):
        level = 0.5 * (lower + upper)
        feasible, t_s = feasibility(level, scenario, config, _fn=fn)
        if feasible:
            lower = level
            witness = t_s
        else:
            upper = level
        trace.steps.append(
            BisectionStep(level=level, lower=lower, upper=upper, feasible=feasible, witness=t_s)
        )
        if abs(upper - lower) <= config.epsilon:
            if witness is None:
                # Objective never exceeded any positive level; fall back to
                # the grid maximum (flat-zero objective).
                witness, lower = _grid_max(fn, config)
            return Optimum(t_star=witness, f_star=lower, iterations=iteration), trace

    raise ConvergenceError(
        f"bisection did not close the level gap within {config.max_iterations} iterations",
        trace=trace.steps,
    )


def golden_section_maximize(
    scenario: Scenario, config: OptimizerConfig | None = None, tol: float = 1e-6
) -> tuple[float, float]:
    """Direct unimodal maximizer, used as a cross-check on the bisection path."""
    config = config or OptimizerConfig()
    fn = _ObjectiveCache(scenario)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = config.t_min, config.t_max
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    t = 0.5 * (a + b)
    return t, fn(t)


def derivative_sign_scan(
    scenario: Scenario, t_grid, zero_tol: float = 1e-9
) -> tuple[np.ndarray, bool]:
    """Signs of the objective's finite-difference slope over a time grid.

    Returns the sign array and whether it shows the single +/- transition
    of a quasi-concave profile (zeros are transparent).
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 3:
        raise ValueError("need a sorted 1-D grid with at least 3 points")
    if np.any(np.diff(t) <= 0) or t[0] <= 0:
        raise ValueError("grid must be strictly increasing and positive")

    values = np.array([objective(float(x), scenario) for x in t])
    scale = max(float(np.max(np.abs(values))), 1e-30)
    slopes = np.gradient(values, t)
    signs = np.zeros(len(t), dtype=int)
    # Slopes below a relative floor are treated as flat, not as wiggles.
    floor = zero_tol * scale / (t[-1] - t[0])
    signs[slopes > floor] = 1
    signs[slopes < -floor] = -1

    nonzero = signs[signs != 0]
    single_change = True
    seen_negative = False
    for s in nonzero:
        if s < 0:
            seen_negative = True
        elif seen_negative:
            single_change = False
            break
    return signs, single_change
