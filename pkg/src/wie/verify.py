"""Built-in invariant suite behind the `verify` command.

Each check group exercises one proved inequality, identity or exactness
property against independently computed numbers and reports a single
pass/fail with the extremal measured pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracles
from .fem import minimize_Jh, rescale_to_fast
from .forces import (ConstantForce, SinusoidForce, SumForce, ZeroForce,
                     oscillatory_family, square_wave_family, weakstar_gap)
from .lab import run_single
from .model import CauchyProblem, HermiteTrajectory, SolverConfig, make_uniform_grid
from .oracles import (check_lemma21, check_scaling_identity, check_supnorm_bound,
                      classical_solution, el_second_derivative, kernel_mass)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    lhs: float
    rhs: float


def _random_trajectory(rng, n_dim: int = 1, s_max: float = 40.0,
                       ds: float = 0.25, span: float = 10.0) -> HermiteTrajectory:
    grid = make_uniform_grid(s_max, ds)
    values = rng.uniform(-span, span, size=(grid.n_nodes, n_dim))
    slopes = rng.uniform(-span, span, size=(grid.n_nodes, n_dim))
    return HermiteTrajectory(grid, values, slopes)


def _check_lemma21(rng, n_random: int = 300) -> list[CheckResult]:
    grid = make_uniform_grid(40.0, 0.25)
    s = grid.nodes
    cases = [HermiteTrajectory(grid, s, np.ones_like(s)),
             HermiteTrajectory(grid, s**2, 2.0 * s),
             HermiteTrajectory(grid, np.zeros_like(s), np.zeros_like(s))]
    cases += [_random_trajectory(rng, n_dim=1 + (k % 2)) for k in range(n_random)]
    worst_first = worst_second = None
    ok_first = ok_second = True
    for traj in cases:
        first, second = check_lemma21(traj)
        ok_first &= first.passed
        ok_second &= second.passed
        if worst_first is None or first.slack < worst_first.slack:
            worst_first = first
        if worst_second is None or second.slack < worst_second.slack:
            worst_second = second
    return [CheckResult("lemma21-first", ok_first, worst_first.lhs, worst_first.rhs),
            CheckResult("lemma21-second", ok_second, worst_second.lhs, worst_second.rhs)]


def _check_kernel(rng) -> CheckResult:
    dev = max(abs(kernel_mass(h) - 1.0) for h in range(1, 129))
    return CheckResult("kernel-normalization", dev <= 1e-12, dev, 1e-12)


def _check_el_closed_form(rng, n_random: int = 100) -> CheckResult:
    worst = 0.0
    for _ in range(n_random):
        parts = [ConstantForce(rng.uniform(-2.0, 2.0, size=1))]
        for _ in range(rng.integers(1, 3)):
            parts.append(SinusoidForce(amplitude=rng.uniform(-2.0, 2.0, size=1),
                                       omega=float(rng.uniform(0.2, 6.0)),
                                       phase=float(rng.uniform(0.0, 6.28))))
        f = SumForce(tuple(parts))
        h = int(rng.integers(1, 33))
        m = float(rng.uniform(0.5, 3.0))
        t = rng.uniform(0.0, 5.0, size=3)
        closed = el_second_derivative(f, h, m, t)
        brute = oracles._el_quadrature(f, h, m, t, s_tail=40.0)
        worst = max(worst, float(np.max(np.abs(closed - brute))))
    return CheckResult("el-closed-form", worst <= 1e-10, worst, 1e-10)


def _check_scaling(rng) -> CheckResult:
    worst = 0.0
    ok = True
    force = SinusoidForce(amplitude=np.ones(1), omega=1.0)
    for _ in range(30):
        traj = _random_trajectory(rng, span=5.0)
        h = int(rng.integers(1, 9))
        problem = CauchyProblem(1.0, traj.values[0], traj.slopes[0], force)
        y = rescale_to_fast(traj, h, traj.grid.s_max / h)
        rep = check_scaling_identity(traj, y, problem, h)
        ok &= rep.passed
        worst = max(worst, abs(rep.slack) / (1.0 + abs(rep.lhs)))
    for f, h in [(ZeroForce(dim=1), 5), (ConstantForce(np.array([2.0])), 2),
                 (SinusoidForce(amplitude=np.ones(1), omega=1.0), 8)]:
        problem = CauchyProblem(1.0, np.array([1.0]), np.array([0.5]), f)
        config = SolverConfig(T_view=2.0)
        out = minimize_Jh(problem, h, config)
        y = rescale_to_fast(out.trajectory, h, config.T_view)
        rep = check_scaling_identity(out.trajectory, y, problem, h)
        ok &= rep.passed
        worst = max(worst, abs(rep.slack) / (1.0 + abs(rep.lhs)))
    return CheckResult("scaling-identity", ok, worst, 1e-8)


def _scenario_runs():
    config = SolverConfig(T_view=2.0)
    sin_fixed = CauchyProblem(1.0, np.array([1.0]), np.array([0.0]),
                              SinusoidForce(amplitude=np.ones(1), omega=1.0))
    null = CauchyProblem(1.0, np.zeros(1), np.zeros(1), ZeroForce(dim=1))
    runs = [(sin_fixed, 4, None), (sin_fixed, 16, None),
            (null, 8, oscillatory_family(ZeroForce(dim=1), np.ones(1))),
            (null, 32, oscillatory_family(ZeroForce(dim=1), np.ones(1))),
            (null, 8, square_wave_family(ZeroForce(dim=1), np.ones(1))),
            (CauchyProblem(2.0, np.array([0.5]), np.array([-1.0]),
                           ConstantForce(np.array([6.0]))), 4, None)]
    return config, runs


def _check_supnorm(rng) -> CheckResult:
    config, runs = _scenario_runs()
    ok = True
    min_slack = np.inf
    lhs = rhs = 0.0
    for problem, h, sequence in runs:
        f_h = sequence.member(h) if sequence is not None else problem.force
        sub = CauchyProblem(problem.m, problem.u0, problem.v0, f_h)
        out = minimize_Jh(sub, h, config)
        y = rescale_to_fast(out.trajectory, h, config.T_view)
        rep = check_supnorm_bound(y, f_h.sup_bound, problem.m, config.T_view,
                                  ds=config.ds)
        ok &= rep.passed
        for part in (rep.acceleration, rep.position, rep.velocity):
            if part.slack < min_slack:
                min_slack, lhs, rhs = part.slack, part.lhs, part.rhs
    return CheckResult("supnorm-bound", ok, lhs, rhs)


def _check_exact_zero(rng) -> CheckResult:
    config = SolverConfig(T_view=2.0)
    problem = CauchyProblem(1.0, np.array([1.0]), np.array([3.0]), ZeroForce(dim=1))
    worst = 0.0
    for h in (1, 8, 64):
        _, metrics = run_single(problem, h, config)
        worst = max(worst, metrics.sup_err_y)
    return CheckResult("exactness-zero", worst <= 1e-9, worst, 1e-9)


def _check_exact_constant(rng) -> CheckResult:
    config = SolverConfig(T_view=2.0)
    problem = CauchyProblem(2.0, np.array([0.5]), np.array([-1.0]),
                            ConstantForce(np.array([3.0])))
    worst = 0.0
    for h in (1, 8, 64):
        _, metrics = run_single(problem, h, config)
        worst = max(worst, metrics.sup_err_y)
    return CheckResult("exactness-constant", worst <= 1e-8, worst, 1e-8)


def _check_family_gap(rng) -> CheckResult:
    """h * gap stays below the integration-by-parts constant
    |xi(0)| + |xi(T)| + TV(xi) (largest for t^3 on [0,5]: 250)."""
    family = oscillatory_family(ZeroForce(dim=1), np.ones(1))
    tests = [(lambda t: np.ones_like(t), 5.0), (lambda t: t, 5.0),
             (lambda t: t**2, 5.0), (lambda t: t**3, 5.0)]
    worst = 0.0
    for h in (4, 8, 16, 32, 64):
        gap = weakstar_gap(family.member(h), family.weak_star_limit, tests)
        worst = max(worst, h * gap)
    return CheckResult("family-gap-bound", worst <= 250.0 * 1.05, worst, 250.0 * 1.05)


def _check_cubic_reproduction(rng) -> CheckResult:
    grid = make_uniform_grid(4.0, 0.5)
    worst = 0.0
    for _ in range(20):
        coef = rng.uniform(-3.0, 3.0, size=4)
        p = np.polynomial.Polynomial(coef)
        traj = HermiteTrajectory(grid, p(grid.nodes), p.deriv()(grid.nodes))
        t = rng.uniform(0.0, grid.s_max, size=100)
        vals, _, _ = traj.eval(t)
        scale = max(1.0, float(np.max(np.abs(p(t)))))
        worst = max(worst, float(np.max(np.abs(vals[:, 0] - p(t)))) / scale)
    eps_bound = 10 * np.finfo(float).eps
    return CheckResult("cubic-reproduction", worst <= eps_bound, worst, eps_bound)


def _check_classical_newton(rng) -> CheckResult:
    force = SumForce((SinusoidForce(amplitude=np.array([1.5]), omega=2.0),
                      ConstantForce(np.array([0.5]))))
    problem = CauchyProblem(1.3, np.array([0.2]), np.array([-0.4]), force)
    t = np.linspace(0.5, 4.0, 25)
    delta = 1e-3
    pos_p, _, _ = classical_solution(problem, t + delta)
    pos_m, _, _ = classical_solution(problem, t - delta)
    pos_0, _, acc = classical_solution(problem, t)
    fd = (pos_p - 2.0 * pos_0 + pos_m) / delta**2
    worst = float(np.max(np.abs(fd - acc)))
    return CheckResult("classical-newton", worst <= 1e-5, worst, 1e-5)


_CHECKS = [_check_lemma21, _check_kernel, _check_el_closed_form, _check_scaling,
           _check_supnorm, _check_exact_zero, _check_exact_constant,
           _check_family_gap, _check_cubic_reproduction, _check_classical_newton]


def run_verify(seed: int = 0) -> list[CheckResult]:
    """Run every check group; deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    results: list[CheckResult] = []
    for check in _CHECKS:
        out = check(rng)
        results.extend(out if isinstance(out, list) else [out])
    return results
