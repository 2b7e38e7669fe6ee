"""Command-line front end: solve, sweep and verify.

Exit codes: 0 success, 1 failed verification, 2 configuration problems,
3 solver failures.  Data files are written with fixed formatting and no
timestamps, so re-running a command reproduces them byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, load_scenario
from .errors import ConfigError, WieError
from .lab import run_single_detailed, run_sweep
from .oracles import check_scaling_identity, check_supnorm_bound
from .verify import run_verify


def _fmt(x: float) -> str:
    """Serialize a double with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


def _output_dir(scenario: ScenarioConfig) -> Path:
    override = os.environ.get("WIE_OUTPUT_DIR")
    out = Path(override) if override else Path(scenario.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(_json_ready(payload), indent=2) + "\n")


def _run_checks(run, problem, h: int, solver) -> list[dict]:
    scaling = check_scaling_identity(run.slow, run.fast, run.limit_problem, h,
                                     f_h=run.f_h)
    sup = check_supnorm_bound(run.fast, run.f_h.sup_bound, problem.m,
                              solver.T_view, ds=solver.ds)
    ic_defect = max(float(np.max(np.abs(run.fast.values[0] - problem.u0))),
                    float(np.max(np.abs(run.fast.slopes[0] - problem.v0))))
    rows = [
        {"name": f"scaling-identity-h{h}", "passed": scaling.passed,
         "lhs": scaling.lhs, "rhs": scaling.rhs},
        {"name": f"supnorm-acceleration-h{h}", "passed": sup.acceleration.passed,
         "lhs": sup.acceleration.lhs, "rhs": sup.acceleration.rhs},
        {"name": f"supnorm-position-h{h}", "passed": sup.position.passed,
         "lhs": sup.position.lhs, "rhs": sup.position.rhs},
        {"name": f"supnorm-velocity-h{h}", "passed": sup.velocity.passed,
         "lhs": sup.velocity.lhs, "rhs": sup.velocity.rhs},
        {"name": f"initial-conditions-h{h}", "passed": ic_defect == 0.0,
         "lhs": ic_defect, "rhs": 0.0},
        {"name": f"el-residual-h{h}",
         "passed": run.metrics.el_residual <= 10.0 * solver.solve_tol,
         "lhs": run.metrics.el_residual, "rhs": 10.0 * solver.solve_tol},
    ]
    return rows


def _write_trajectory_csv(path: Path, run, solver):
    # 401 rows: uniform output step T_view/400
    t = np.linspace(0.0, solver.T_view, 401)
    y, dy, d2y = run.fast.eval(t)
    n_dim = y.shape[1]
    header = (["t"] + [f"y_{c + 1}" for c in range(n_dim)]
              + [f"dy_{c + 1}" for c in range(n_dim)]
              + [f"d2y_{c + 1}" for c in range(n_dim)])
    lines = [",".join(header)]
    for i, ti in enumerate(t):
        row = [_fmt(ti)]
        row += [_fmt(v) for v in y[i]]
        row += [_fmt(v) for v in dy[i]]
        row += [_fmt(v) for v in d2y[i]]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def cmd_solve(scenario: ScenarioConfig, h: int) -> int:
    run = run_single_detailed(scenario.problem, h, scenario.solver,
                              sequence=scenario.sequence)
    out = _output_dir(scenario)
    base = f"{scenario.name}-h{h}"
    if "csv" in scenario.formats:
        _write_trajectory_csv(out / f"{base}-trajectory.csv", run, scenario.solver)
    if "json" in scenario.formats:
        m = run.metrics
        _write_json(out / f"{base}-metrics.json", {
            "scenario": scenario.name,
            "h": h,
            "metrics": {"sup_err_y": m.sup_err_y, "sup_err_dy": m.sup_err_dy,
                        "weakstar_gap_ypp": m.weakstar_gap_ypp,
                        "el_residual": m.el_residual},
            "energy": run.minimizer.energy,
            "condition_estimate": run.minimizer.condition_estimate,
            "checks": _run_checks(run, scenario.problem, h, scenario.solver),
        })
    if "png" in scenario.formats:
        from . import plots
        from .oracles import classical_solution

        t = np.linspace(0.0, scenario.solver.T_view, 401)
        y, dy, d2y = run.fast.eval(t)
        ref_pos, _, _ = classical_solution(run.limit_problem, t)
        plots.plot_trajectory(t, y, dy, d2y, ref_pos,
                              out / f"{base}-trajectory.png",
                              f"{scenario.name}, h = {h}")
    return 0


def cmd_sweep(scenario: ScenarioConfig) -> int:
    if scenario.h_values is None:
        raise ConfigError("sweep requested but the config has no [sweep] section")
    report = run_sweep(scenario.problem, scenario.h_values, scenario.solver,
                       sequence=scenario.sequence)
    out = _output_dir(scenario)
    if "csv" in scenario.formats:
        lines = ["h,sup_err_y,sup_err_dy,weakstar_gap_ypp,el_residual"]
        for h, m in zip(report.h_values, report.metrics):
            lines.append(",".join([str(h), _fmt(m.sup_err_y), _fmt(m.sup_err_dy),
                                   _fmt(m.weakstar_gap_ypp), _fmt(m.el_residual)]))
        (out / f"{scenario.name}-sweep.csv").write_text("\n".join(lines) + "\n")
    if "json" in scenario.formats:
        checks = []
        for h in report.h_values:
            run = run_single_detailed(scenario.problem, h, scenario.solver,
                                      sequence=scenario.sequence)
            checks.extend(_run_checks(run, scenario.problem, h, scenario.solver))
        _write_json(out / f"{scenario.name}-summary.json", {
            "scenario": scenario.name,
            "h_values": list(report.h_values),
            "empirical_rate": report.empirical_rate,
            "checks": checks,
        })
    if "png" in scenario.formats:
        from . import plots

        plots.plot_sweep(report.h_values, report.metrics, report.empirical_rate,
                         out / f"{scenario.name}-sweep.png", scenario.name)
    return 0


def cmd_verify(seed: int) -> int:
    results = run_verify(seed=seed)
    payload = {"checks": [{"name": r.name, "passed": r.passed,
                           "lhs": r.lhs, "rhs": r.rhs} for r in results],
               "all_passed": all(r.passed for r in results)}
    print(json.dumps(_json_ready(payload), indent=2))
    if not payload["all_passed"]:
        failing = ", ".join(r.name for r in results if not r.passed)
        print(f"FAILED: {failing}", file=sys.stderr)
        return 1
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wie",
        description="Minimize exponentially weighted inertia-energy functionals "
                    "and study their rescaled convergence to Newtonian trajectories.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_solve = sub.add_parser("solve", help="solve one scenario at a fixed index h")
    p_solve.add_argument("--config", required=True, help="scenario TOML file")
    p_solve.add_argument("--h", required=True, type=int, help="rescaling index (>= 1)")
    p_sweep = sub.add_parser("sweep", help="run the scenario's h sweep")
    p_sweep.add_argument("--config", required=True, help="scenario TOML file")
    p_verify = sub.add_parser("verify", help="run the built-in invariant suite")
    p_verify.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.seed)
        scenario = load_scenario(args.config)
        if args.command == "solve":
            if args.h < 1:
                raise ConfigError(f"--h must be a positive integer, got {args.h}")
            return cmd_solve(scenario, args.h)
        return cmd_sweep(scenario)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WieError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
