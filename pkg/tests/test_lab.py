import numpy as np
import pytest

from wie import (CauchyProblem, ConstantForce, SinusoidForce, SolverConfig, ZeroForce,
                 check_scaling_identity, check_supnorm_bound, mesh_refinement_study,
                 oscillatory_family, run_single, run_single_detailed, run_sweep,
                 square_wave_family)

CONFIG = SolverConfig(T_view=2.0)


def _problem(force, m=1.0, u0=(0.0,), v0=(0.0,)):
    return CauchyProblem(m, np.array(u0), np.array(v0), force)


class TestRunSingle:
    def test_zero_force_floor(self):
        problem = _problem(ZeroForce(dim=1), u0=(1.0,), v0=(3.0,))
        for h in (1, 8, 64):
            _, metrics = run_single(problem, h, CONFIG)
            assert metrics.sup_err_y <= 1e-9

    def test_constant_force_exact(self):
        problem = _problem(ConstantForce([2.0]), m=2.0, u0=(0.5,), v0=(1.0,))
        for h in (1, 8, 64):
            _, metrics = run_single(problem, h, CONFIG)
            assert metrics.sup_err_y <= 1e-8

    def test_null_family_closed_form_size(self):
        problem = _problem(ZeroForce(dim=1))
        seq = oscillatory_family(ZeroForce(dim=1), [1.0])
        for h in (8, 32):
            y, metrics = run_single(problem, h, CONFIG, sequence=seq)
            # y_h(t) = (1 - cos(ht)) / (2 m h^2): sup is 1/(m h^2),
            # half peak-to-peak amplitude is 1/(2 m h^2)
            assert metrics.sup_err_y == pytest.approx(1.0 / h**2, rel=0.2)
            t = np.linspace(0.0, 2.0, 801)
            vals = y.eval(t)[0][:, 0]
            amp = (vals.max() - vals.min()) / 2.0
            assert amp == pytest.approx(1.0 / (2.0 * h**2), rel=0.2)

    def test_initial_conditions_exact(self):
        problem = _problem(SinusoidForce(amplitude=[1.0], omega=1.0),
                           u0=(1.0,), v0=(0.5,))
        for h in (1, 16):
            y, _ = run_single(problem, h, CONFIG)
            assert y.values[0, 0] == 1.0
            assert y.slopes[0, 0] == 0.5

    def test_outputs_pass_oracle_checks(self):
        scenarios = [
            (_problem(ZeroForce(dim=1), u0=(1.0,), v0=(3.0,)), None),
            (_problem(ConstantForce([3.0]), m=2.0), None),
            (_problem(SinusoidForce(amplitude=[1.0], omega=1.0), u0=(1.0,)), None),
            (_problem(ZeroForce(dim=1)), oscillatory_family(ZeroForce(dim=1), [1.0])),
            (_problem(ZeroForce(dim=1)), square_wave_family(ZeroForce(dim=1), [1.0])),
        ]
        for problem, seq in scenarios:
            for h in (4, 16):
                run = run_single_detailed(problem, h, CONFIG, sequence=seq)
                sup = check_supnorm_bound(run.fast, run.f_h.sup_bound, problem.m,
                                          CONFIG.T_view, ds=CONFIG.ds)
                assert sup.passed
                scaling = check_scaling_identity(run.slow, run.fast,
                                                 run.limit_problem, h, f_h=run.f_h)
                assert scaling.passed


class TestRunSweep:
    def test_fixed_sin_first_order_rate(self):
        problem = _problem(SinusoidForce(amplitude=[1.0], omega=1.0), u0=(1.0,))
        report = run_sweep(problem, [4, 8, 16, 32, 64], CONFIG)
        errs = [m.sup_err_y for m in report.metrics]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert 0.8 <= report.empirical_rate <= 1.2

    def test_monotone_improvement_eightfold(self):
        problem = _problem(SinusoidForce(amplitude=[1.0], omega=1.0), u0=(1.0,))
        report = run_sweep(problem, [4, 8, 16, 32, 64], CONFIG)
        errs = [m.sup_err_y for m in report.metrics]
        assert errs[-1] <= errs[0] / 4.0  # h grew 16x, trend is O(1/h)

    def test_zero_force_rate_undefined(self):
        problem = _problem(ZeroForce(dim=1), u0=(1.0,), v0=(1.0,))
        report = run_sweep(problem, [2, 4, 8], CONFIG)
        assert report.empirical_rate is None

    def test_null_family_gap_decreasing_and_quadratic_amplitude(self):
        problem = _problem(ZeroForce(dim=1))
        seq = oscillatory_family(ZeroForce(dim=1), [1.0])
        report = run_sweep(problem, [8, 16, 32, 64, 128], CONFIG, sequence=seq)
        gaps = [m.weakstar_gap_ypp for m in report.metrics]
        assert all(g > 0 for g in gaps)
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        for h, m in zip(report.h_values, report.metrics):
            assert m.sup_err_y * h**2 == pytest.approx(1.0, rel=0.2)
            # half peak-to-peak of (1 - cos(ht))/(2h^2) scaled by h^2 is 1/2
        assert report.empirical_rate == pytest.approx(2.0, abs=0.05)

    @pytest.mark.parametrize("bad", [[], [4, 4, 8], [8, 4], [0, 2]])
    def test_invalid_h_values(self, bad):
        problem = _problem(ZeroForce(dim=1))
        with pytest.raises(ValueError):
            run_sweep(problem, bad, CONFIG)


class TestMeshRefinement:
    def test_second_order_trend_for_smooth_force(self):
        problem = _problem(SinusoidForce(amplitude=[1.0], omega=1.0), u0=(1.0,))
        rows = mesh_refinement_study(problem, 8, [0.5, 0.25, 0.125], CONFIG)
        devs = [dev for _, dev in rows]
        assert 3.0 <= devs[0] / devs[1] <= 5.0
        assert 3.0 <= devs[1] / devs[2] <= 5.0

    def test_constant_force_at_floor(self):
        problem = _problem(ConstantForce([2.0]), m=2.0)
        rows = mesh_refinement_study(problem, 4, [0.5, 0.25], CONFIG)
        for _, dev in rows:
            assert dev <= 1e-9

    @pytest.mark.parametrize("bad", [[], [0.25, 0.5], [0.25, 0.25], [1.5, 0.5]])
    def test_invalid_widths(self, bad):
        problem = _problem(ZeroForce(dim=1))
        with pytest.raises(ValueError):
            mesh_refinement_study(problem, 4, bad, CONFIG)
