"""Experiment runner: parameter sweeps, duration optimization, oracle checks.

Experiments are described by TOML config files (see ``configs/``); results
are written as CSV with units in the column names and 9-significant-digit
scientific notation, so re-running with the same config and seed gives
byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import warnings

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .ber import success_probability
from .channel import SphereReceiver, Vec3
from .energy import EnergyParams
from .errors import ConfigError, InfeasibleBudgetError
from .modulation import ShapeFamily
from .montecarlo import (
    RngConfig,
    mc_count_moments,
    mc_link_ber,
    mc_presence_probability,
    quadrature_presence_probability,
)
from .optimizer import OptimizerConfig, bisection_optimize, objective
from .reception import NoiseParams, Priors
from .scenario import Scenario, evaluate_link, hop_channels

UM = 1e-6
MS = 1e-3
FJ = 1e-15

SWEEP_AXES = ("t_s", "R_y", "R_z", "V_y", "V_z", "J", "energy_budget")

_AXIS_COLUMN = {
    "t_s": "t_s_ms",
    "R_y": "relay_y_um",
    "R_z": "relay_z_um",
    "V_y": "drift_y_um_s",
    "V_z": "drift_z_um_s",
    "J": "isi_length",
    "energy_budget": "energy_budget_fJ",
}

# Table-level parameter ranges; violations warn but do not fail.
_SOFT_RANGES = {
    "drift component (um/s)": (1.0, 100.0),
    "destination distance (um)": (20.0, 200.0),
    "symbol duration (ms)": (1.0, 18.0),
    "ISI length": (1, 30),
}


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(str(exc), field="config") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}", field="config") from exc


def _req(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError("missing required key", field=f"{where}.{key}")
    return section[key]


def _vec3_um(raw, where: str) -> Vec3:
    if not (isinstance(raw, (list, tuple)) and len(raw) == 3):
        raise ConfigError("expected a 3-element list", field=where)
    return Vec3(*(float(c) * UM for c in raw))


def _soft_check(name: str, value: float):
    lo, hi = _SOFT_RANGES[name]
    if not lo <= value <= hi:
        warnings.warn(f"{name} = {value:g} outside the studied range [{lo}, {hi}]", stacklevel=3)


def build_scenario(sc: dict) -> tuple[Scenario, float]:
    """Scenario plus its operating symbol duration from a [scenario] section."""
    drift_raw = _req(sc, "drift_um_s", "scenario")
    drift = Vec3(*(float(c) * UM for c in drift_raw))
    relay_center = _vec3_um(_req(sc, "relay_center_um", "scenario"), "scenario.relay_center_um")
    relay = SphereReceiver(relay_center, float(sc.get("relay_radius_um", 50.0)) * UM)

    if "dest_center_um" in sc:
        dest_center = _vec3_um(sc["dest_center_um"], "scenario.dest_center_um")
    else:
        dest_center = relay_center.scaled(2.0)
    dest = SphereReceiver(dest_center, float(sc.get("dest_radius_um", 50.0)) * UM)

    family = ShapeFamily(
        kind=sc.get("pulse_family", "uniform"),
        rate=float(sc.get("exponential_rate", 0.5)),
    )

    n_total = sc.get("n_total")
    budget_fj = sc.get("energy_budget_fj")
    if (n_total is None) == (budget_fj is None):
        raise ConfigError(
            "specify exactly one of n_total and energy_budget_fj", field="scenario"
        )

    noise = NoiseParams(
        mean=float(sc.get("noise_mean", 100.0)),
        variance=float(sc.get("noise_variance", 100.0)),
    )
    scenario = Scenario(
        drift=drift,
        relay=relay,
        destination=dest,
        pulse_family=family,
        subslots=int(sc.get("subslots", 10)),
        diffusion_t=float(sc.get("diffusion", 4e-9)),
        diffusion_u=float(sc.get("diffusion_u", sc.get("diffusion", 4e-9))),
        n_total=int(n_total) if n_total is not None else None,
        energy_budget=float(budget_fj) * FJ if budget_fj is not None else None,
        energy=EnergyParams(),
        priors=Priors(pi1=float(sc.get("pi1", 0.5))),
        noise_sr=noise,
        noise_rd=noise,
        isi_length=int(sc.get("isi_length", 10)),
        relay_prior_mode=sc.get("relay_prior_mode", "equal"),
    )
    t_s = float(sc.get("t_s_ms", 18.0)) * MS

    for c in drift_raw:
        _soft_check("drift component (um/s)", abs(float(c)))
    dest_dist = math.sqrt(dest_center.x**2 + dest_center.y**2 + dest_center.z**2)
    _soft_check("destination distance (um)", dest_dist / UM)
    _soft_check("symbol duration (ms)", t_s / MS)
    _soft_check("ISI length", scenario.isi_length)
    return scenario, t_s


def apply_axis(sc: dict, axis: str, value: float) -> dict:
    """New [scenario] dict with one sweep axis set to ``value`` (axis units)."""
    out = dict(sc)
    if axis == "t_s":
        out["t_s_ms"] = value
    elif axis in ("R_y", "R_z"):
        center = list(out["relay_center_um"])
        center[1 if axis == "R_y" else 2] = value
        out["relay_center_um"] = center
    elif axis in ("V_y", "V_z"):
        drift = list(out["drift_um_s"])
        drift[1 if axis == "V_y" else 2] = value
        out["drift_um_s"] = drift
    elif axis == "J":
        out["isi_length"] = int(value)
    elif axis == "energy_budget":
        out.pop("n_total", None)
        out["energy_budget_fj"] = value
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}", field="sweep.axis")
    return out


def sweep_values(section: dict) -> list[float]:
    if "values" in section:
        return [float(v) for v in section["values"]]
    try:
        start, stop, points = section["start"], section["stop"], int(section["points"])
    except KeyError as exc:
        raise ConfigError("need either values or start/stop/points", field="sweep") from exc
    if points < 2:
        raise ConfigError("need at least 2 points", field="sweep.points")
    return [float(v) for v in np.linspace(float(start), float(stop), points)]


@dataclasses.dataclass
class SweepRow:
    axis_value: float
    ber_direct: float
    ber_relay: float
    energy_fj: float
    objective_bits_s: float
    mc_ber: float | None = None
    mc_ber_se: float | None = None
    error: str | None = None


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.8e}"


def run_sweep(config: dict, seed: int, out_path: str, mc_bits: int | None) -> list[SweepRow]:
    """Evaluate the analytic pipeline along the configured sweep axis."""
    sc = config.get("scenario")
    sw = config.get("sweep")
    if not sc or not sw:
        raise ConfigError("config needs [scenario] and [sweep] sections", field="config")
    axis = _req(sw, "axis", "sweep")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}", field="sweep.axis")
    values = sweep_values(sw)

    rows = []
    for value in values:
        point_sc = apply_axis(sc, axis, value)
        try:
            scenario, t_s = build_scenario(point_sc)
            ev = evaluate_link(scenario, t_s)
        except InfeasibleBudgetError as exc:
            rows.append(
                SweepRow(value, math.nan, math.nan, math.nan, math.nan, error=str(exc))
            )
            continue
        obj = success_probability(ev.ber_relay.p_e) / t_s
        row = SweepRow(
            axis_value=value,
            ber_direct=ev.ber_direct.p_e,
            ber_relay=ev.ber_relay.p_e,
            energy_fj=ev.energy_per_bit / FJ,
            objective_bits_s=obj,
        )
        if mc_bits:
            est = mc_link_ber(scenario, t_s, mc_bits, RngConfig(seed=seed))
            row.mc_ber = est.value
            row.mc_ber_se = est.std_error
        rows.append(row)

    header = [_AXIS_COLUMN[axis], "ber_direct", "ber_relay", "energy_fJ", "objective_bits_s"]
    if mc_bits:
        header += ["mc_ber", "mc_ber_se"]
    header.append("error")
    lines = [",".join(header)]
    for row in rows:
        cells = [
            _fmt(row.axis_value),
            _fmt(row.ber_direct),
            _fmt(row.ber_relay),
            _fmt(row.energy_fj),
            _fmt(row.objective_bits_s),
        ]
        if mc_bits:
            cells += [_fmt(row.mc_ber), _fmt(row.mc_ber_se)]
        cells.append(row.error or "")
        lines.append(",".join(cells))
    with open(out_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return rows


def run_optimize(config: dict, out_path: str) -> list[dict]:
    """Bisection optimization of the symbol duration, with iteration trace."""
    sc = config.get("scenario")
    if not sc:
        raise ConfigError("config needs a [scenario] section", field="config")
    opt = config.get("optimize", {})
    opt_config = OptimizerConfig(
        epsilon=float(opt.get("epsilon", 0.01)),
        t_min=float(opt.get("t_min_ms", 1.0)) * MS,
        t_max=float(opt.get("t_max_ms", 100.0)) * MS,
        feasibility_samples=int(opt.get("samples", 200)),
        level_upper_init=float(opt.get("level_upper_init", 1e3)),
    )

    cases = config.get("case")
    if not cases:
        cases = [{}]
    results = []
    lines = [
        "case,t_star_ms,f_star_bits_s,iterations,iter,level,lower,upper,feasible,witness_ms"
    ]
    for idx, case in enumerate(cases):
        case_sc = dict(sc)
        for axis, value in case.items():
            case_sc = apply_axis(case_sc, axis, float(value))
        scenario, _ = build_scenario(case_sc)
        optimum, trace = bisection_optimize(scenario, opt_config)
        results.append({"case": idx, "optimum": optimum, "trace": trace})
        for step_idx, step in enumerate(trace.steps, start=1):
            lines.append(
                ",".join(
                    [
                        str(idx),
                        _fmt(optimum.t_star / MS),
                        _fmt(optimum.f_star),
                        str(optimum.iterations),
                        str(step_idx),
                        _fmt(step.level),
                        _fmt(step.lower),
                        _fmt(step.upper),
                        "1" if step.feasible else "0",
                        _fmt(step.witness / MS if step.witness is not None else None),
                    ]
                )
            )
    with open(out_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return results


@dataclasses.dataclass
class OracleCheck:
    name: str
    detail: str
    passed: bool


def validate_oracles(config: dict, seed: int, out_path: str | None = None) -> list[OracleCheck]:
    """Cross-checks between the analytic pipeline and its independent oracles.

    Failures are report content, not exceptions; the command maps any
    failure to a dedicated exit code.
    """
    sc = config.get("scenario")
    if not sc:
        raise ConfigError("config needs a [scenario] section", field="config")
    val = config.get("validate", {})
    grid_points = int(val.get("grid_points", 6))
    trials = int(val.get("trials", 200_000))
    bits = int(val.get("bits", 100_000))
    cdf_tol = float(val.get("cdf_rel_tol", 0.05))
    ber_tol = float(val.get("ber_rel_tol", 0.10))

    checks: list[OracleCheck] = []
    scenario, t_s = build_scenario(sc)
    ch_sr, _, _ = hop_channels(scenario)
    rng = np.random.default_rng(seed)

    if grid_points > 0:
        times = np.linspace(0.25 * t_s, (scenario.isi_length + 1) * t_s, grid_points)
        worst_rel, mc_ok = 0.0, True
        from .channel import presence_probability

        for t in times:
            quad = quadrature_presence_probability(ch_sr, float(t))
            analytic = presence_probability(ch_sr, float(t))
            if quad > 1e-4:
                worst_rel = max(worst_rel, abs(analytic - quad) / quad)
            est = mc_presence_probability(
                ch_sr, float(t), trials, RngConfig(seed=int(rng.integers(2**63)))
            )
            se = max(est.std_error, math.sqrt(max(quad * (1 - quad), 1e-30) / trials))
            if abs(est.value - quad) > 3.0 * se:
                mc_ok = False
        checks.append(
            OracleCheck(
                "arrival_cdf_vs_quadrature",
                f"worst relative deviation {worst_rel:.3f} (tol {cdf_tol})",
                worst_rel <= cdf_tol,
            )
        )
        checks.append(
            OracleCheck(
                "particle_mc_vs_quadrature",
                "within 3 binomial standard errors" if mc_ok else "outside 3 standard errors",
                mc_ok,
            )
        )

        ev = evaluate_link(scenario, t_s)
        moments = mc_count_moments(
            ev.pulse,
            ev.table_sr,
            scenario.priors,
            scenario.noise_sr,
            max(trials, 10_000),
            RngConfig(seed=int(rng.integers(2**63))),
        )
        stats = ev.stats_sr
        moment_ok = all(
            moments[key].agrees_with(ref)
            for key, ref in (
                ("mean0", stats.mu0),
                ("mean1", stats.mu1),
                ("var0", stats.var0),
                ("var1", stats.var1),
            )
        )
        checks.append(
            OracleCheck(
                "count_moments_vs_formulas",
                "all four conditional moments within 3 standard errors"
                if moment_ok
                else "a conditional moment missed its 3-standard-error band",
                moment_ok,
            )
        )

        est = mc_link_ber(scenario, t_s, bits, RngConfig(seed=int(rng.integers(2**63))))
        analytic_ber = ev.ber_relay.p_e
        if analytic_ber >= 1e-3:
            rel = abs(est.value - analytic_ber) / analytic_ber
            ber_ok = rel <= ber_tol or abs(est.value - analytic_ber) <= 3.0 * est.std_error
            detail = f"relative deviation {rel:.3f} (tol {ber_tol})"
        else:
            ber_ok = abs(est.value - analytic_ber) <= max(3.0 * est.std_error, 10.0 / bits)
            detail = f"analytic {analytic_ber:.3e} too small for relative check; absolute gate used"
        checks.append(OracleCheck("link_ber_vs_closed_form", detail, ber_ok))

    if out_path:
        lines = ["check,passed,detail"]
        for c in checks:
            lines.append(f"{c.name},{int(c.passed)},{c.detail}")
        with open(out_path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return checks


def _default_out(args, stem: str) -> str:
    if args.out:
        return args.out
    out_dir = os.environ.get("MCVDLINK_OUT_DIR", ".")
    return os.path.join(out_dir, stem)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mcvdlink",
        description="Relay-assisted molecular-communication link experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("sweep", "evaluate the link along one parameter axis"),
        ("optimize", "find the best symbol duration by level bisection"),
        ("validate", "run the oracle cross-check suite"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="TOML experiment config")
        p.add_argument("--seed", type=int, default=1, help="RNG seed")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--mc-bits", type=int, default=0, help="bit-level MC cross-check size")
        p.add_argument("--no-mc", action="store_true", help="skip Monte Carlo columns")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.command == "sweep":
            mc_bits = None if args.no_mc or not args.mc_bits else args.mc_bits
            run_sweep(config, args.seed, _default_out(args, "sweep.csv"), mc_bits)
            return 0
        if args.command == "optimize":
            run_optimize(config, _default_out(args, "optimize.csv"))
            return 0
        checks = validate_oracles(config, args.seed, _default_out(args, "validate.csv"))
        for c in checks:
            print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        return 0 if all(c.passed for c in checks) else 4
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleBudgetError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
