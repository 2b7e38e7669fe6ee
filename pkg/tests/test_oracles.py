import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import wie
from wie import (CauchyProblem, ConstantForce, HermiteTrajectory, PiecewiseConstantForce,
                 PolynomialForce, SampledForce, SinusoidForce, SolverConfig, SumForce,
                 ZeroForce, check_lemma21, check_scaling_identity, check_supnorm_bound,
                 classical_solution, el_second_derivative, kernel_mass,
                 make_uniform_grid, minimize_Jh, rescale_to_fast)
from wie.oracles import _el_quadrature


class TestClassicalSolution:
    def test_free_motion(self):
        p = CauchyProblem(2.0, [1.0], [3.0], ZeroForce(dim=1))
        pos, vel, acc = classical_solution(p, 2.0)
        assert pos[0] == pytest.approx(7.0, abs=1e-14)
        assert vel[0] == pytest.approx(3.0)
        assert acc[0] == 0.0

    def test_constant_force_parabola(self):
        p = CauchyProblem(1.0, [0.0], [0.0], ConstantForce([2.0]))
        pos, vel, _ = classical_solution(p, 3.0)
        assert pos[0] == pytest.approx(9.0, abs=1e-13)
        assert vel[0] == pytest.approx(6.0, abs=1e-13)

    def test_sinusoid_duhamel(self):
        # int_0^t (t-s) sin s ds = t - sin t
        p = CauchyProblem(1.0, [0.0], [0.0], SinusoidForce(amplitude=[1.0], omega=1.0))
        pos, vel, _ = classical_solution(p, np.pi)
        assert pos[0] == pytest.approx(np.pi, abs=1e-13)
        assert vel[0] == pytest.approx(1.0 - np.cos(np.pi), abs=1e-13)

    def test_polynomial_with_hold(self):
        # f(t) = t held from t = 10: double integral is t^3/6 before the hold,
        # 620 - 1000/3 at t = 12 afterwards
        f = PolynomialForce(coeffs=[[0.0], [1.0]], hold_from=10.0)
        p = CauchyProblem(1.0, [0.0], [0.0], f)
        pos, _, _ = classical_solution(p, np.array([2.0, 12.0]))
        assert pos[0, 0] == pytest.approx(8.0 / 6.0, rel=1e-13)
        assert pos[1, 0] == pytest.approx(860.0 / 3.0, rel=1e-13)

    def test_quadrature_fallback_matches_closed_form(self):
        # the held constant-1 sampled force behaves like f = 1
        f = SampledForce(times=[0.0, 1.0], samples=[[1.0], [1.0]], interpolation="hold")
        p = CauchyProblem(1.0, [0.0], [0.0], f)
        t = np.array([0.5, 2.5, 7.0])
        pos, vel, _ = classical_solution(p, t)
        assert np.allclose(pos[:, 0], t**2 / 2.0, rtol=1e-11)
        assert np.allclose(vel[:, 0], t, rtol=1e-11)

    def test_piecewise_constant_quadrature(self):
        # +1 on [0,1), -1 on [1,inf): I(t) = t^2/2 - (t-1)^2 for t > 1
        f = PiecewiseConstantForce(breaks=[1.0], values=[[1.0], [-1.0]])
        p = CauchyProblem(1.0, [0.0], [0.0], f)
        t = np.array([2.0])
        pos, _, _ = classical_solution(p, t)
        assert pos[0, 0] == pytest.approx(2.0 - 1.0, rel=1e-11)

    def test_newton_law_by_finite_differences(self):
        f = SumForce((SinusoidForce(amplitude=[1.0], omega=2.0), ConstantForce([0.3])))
        p = CauchyProblem(1.7, [0.1], [0.2], f)
        t = np.linspace(0.5, 3.0, 11)
        d = 1e-3
        pp, _, acc = classical_solution(p, t)
        pplus, _, _ = classical_solution(p, t + d)
        pminus, _, _ = classical_solution(p, t - d)
        fd = (pplus - 2 * pp + pminus) / d**2
        assert np.max(np.abs(fd - acc)) <= 1e-6


class TestConvolutionOracle:
    def test_constant_forcing_is_exact(self):
        f = ConstantForce([3.0])
        for h in (1, 7, 64):
            for t in (0.0, 1.3, 9.0):
                assert el_second_derivative(f, h, 2.0, t)[0] == pytest.approx(1.5, rel=1e-14)

    def test_unit_sinusoid_at_origin(self):
        f = SinusoidForce(amplitude=[1.0], omega=1.0)
        assert el_second_derivative(f, 1, 1.0, 0.0)[0] == pytest.approx(0.5, abs=1e-14)

    def test_null_family_closed_form(self):
        m = 2.0
        for h in (4, 16):
            f = SinusoidForce(amplitude=[1.0], omega=float(h))
            t = np.linspace(0.0, 2.0, 25)
            vals = el_second_derivative(f, h, m, t)[:, 0]
            assert np.allclose(vals, np.cos(h * t) / (2.0 * m), atol=1e-13)

    def test_kernel_normalization(self):
        devs = [abs(kernel_mass(h) - 1.0) for h in range(1, 129)]
        assert max(devs) <= 1e-12

    def test_closed_forms_match_quadrature(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            parts = [ConstantForce(rng.uniform(-2, 2, size=1)),
                     SinusoidForce(amplitude=rng.uniform(-2, 2, size=1),
                                   omega=float(rng.uniform(0.3, 8.0)),
                                   phase=float(rng.uniform(0.0, 6.28)))]
            f = SumForce(tuple(parts))
            h = int(rng.integers(1, 65))
            m = float(rng.uniform(0.5, 4.0))
            t = rng.uniform(0.0, 4.0, size=2)
            closed = el_second_derivative(f, h, m, t)
            brute = _el_quadrature(f, h, m, t, s_tail=40.0)
            assert np.max(np.abs(closed - brute)) <= 1e-10

    def test_quadrature_path_square_wave(self):
        # sign(sin(4t)) oracle stays within the kernel-mass bound 1/m
        fam = wie.square_wave_family(ZeroForce(dim=1), [1.0])
        f = fam.member(4)
        t = np.linspace(0.0, 2.0, 9)
        vals = el_second_derivative(f, 4, 1.0, t)
        assert np.max(np.abs(vals)) <= 1.0 + 1e-9


class TestLemma21:
    def test_linear_trajectory(self):
        grid = make_uniform_grid(40.0, 0.25)
        traj = HermiteTrajectory(grid, grid.nodes, np.ones(grid.n_nodes))
        first, second = check_lemma21(traj)
        assert first.lhs == pytest.approx(1.0, abs=1e-6)
        assert first.rhs == pytest.approx(2.0, abs=1e-6)
        assert second.lhs == pytest.approx(2.0, abs=1e-6)
        assert second.rhs == pytest.approx(8.0, abs=1e-6)
        assert first.passed and second.passed

    def test_quadratic_trajectory(self):
        grid = make_uniform_grid(40.0, 0.25)
        traj = HermiteTrajectory(grid, grid.nodes**2, 2.0 * grid.nodes)
        first, second = check_lemma21(traj)
        assert first.lhs == pytest.approx(8.0, rel=1e-6)
        assert first.rhs == pytest.approx(16.0, rel=1e-6)
        assert second.lhs == pytest.approx(24.0, rel=1e-6)
        assert second.rhs == pytest.approx(64.0, rel=1e-6)

    def test_zero_trajectory(self):
        grid = make_uniform_grid(40.0, 0.25)
        traj = HermiteTrajectory(grid, np.zeros(grid.n_nodes), np.zeros(grid.n_nodes))
        first, second = check_lemma21(traj)
        assert first.lhs == first.rhs == 0.0
        assert second.passed

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1))
    def test_random_trajectories_never_violate(self, seed):
        rng = np.random.default_rng(seed)
        grid = make_uniform_grid(40.0, 0.5)
        traj = HermiteTrajectory(grid, rng.uniform(-10, 10, (grid.n_nodes, 1)),
                                 rng.uniform(-10, 10, (grid.n_nodes, 1)))
        first, second = check_lemma21(traj)
        assert first.passed, f"slack {first.slack}"
        assert second.passed, f"slack {second.slack}"


class TestSupnormBound:
    def test_core_bound_arithmetic(self):
        grid = make_uniform_grid(8.0, 0.25)
        y = HermiteTrajectory(grid, np.zeros(grid.n_nodes), np.zeros(grid.n_nodes))
        rep = check_supnorm_bound(y, f_h_sup=6.0, m=2.0, T=2.0, ds=0.25)
        assert rep.acceleration.rhs == pytest.approx(3.0 + 10 * 0.25**2 * 3.0)
        assert rep.passed

    def test_null_family_half_amplitude(self):
        problem = CauchyProblem(1.0, [0.0], [0.0], SinusoidForce(amplitude=[1.0], omega=8.0))
        config = SolverConfig(T_view=2.0)
        out = minimize_Jh(problem, 8, config)
        y = rescale_to_fast(out.trajectory, 8, 2.0)
        rep = check_supnorm_bound(y, 1.0, 1.0, 2.0, ds=config.ds)
        assert rep.acceleration.lhs == pytest.approx(0.5, rel=0.05)
        assert rep.acceleration.lhs <= 1.0
        assert rep.passed

    def test_zero_force(self):
        problem = CauchyProblem(1.0, [1.0], [2.0], ZeroForce(dim=1))
        config = SolverConfig(T_view=2.0)
        out = minimize_Jh(problem, 4, config)
        y = rescale_to_fast(out.trajectory, 4, 2.0)
        rep = check_supnorm_bound(y, 0.0, 1.0, 2.0, ds=config.ds)
        assert rep.acceleration.lhs <= 1e-10
        assert rep.passed


class TestScalingIdentity:
    def test_affine_zero_force_both_sides_vanish(self):
        problem = CauchyProblem(1.0, [1.0], [2.0], ZeroForce(dim=1))
        config = SolverConfig(T_view=2.0)
        h = 3
        out = minimize_Jh(problem, h, config)
        y = rescale_to_fast(out.trajectory, h, config.T_view)
        rep = check_scaling_identity(out.trajectory, y, problem, h)
        assert abs(rep.lhs) <= 1e-12 and abs(rep.rhs) <= 1e-12
        assert rep.passed

    def test_constant_force_parabola(self):
        problem = CauchyProblem(1.0, [0.0], [0.0], ConstantForce([1.0]))
        config = SolverConfig(T_view=2.0)
        out = minimize_Jh(problem, 2, config)
        y = rescale_to_fast(out.trajectory, 2, config.T_view)
        rep = check_scaling_identity(out.trajectory, y, problem, 2)
        assert rep.passed
        assert abs(rep.slack) <= 1e-8 * (1.0 + abs(rep.lhs))

    def test_random_hermite_data(self):
        rng = np.random.default_rng(9)
        grid = make_uniform_grid(42.0, 0.25)
        problem = CauchyProblem(1.0, [0.0], [0.0], SinusoidForce(amplitude=[1.0], omega=1.0))
        for _ in range(10):
            traj = HermiteTrajectory(grid, rng.uniform(-3, 3, (grid.n_nodes, 1)),
                                     rng.uniform(-3, 3, (grid.n_nodes, 1)))
            y = rescale_to_fast(traj, 3, grid.s_max / 3)
            rep = check_scaling_identity(traj, y, problem, 3)
            assert rep.passed, f"slack {rep.slack} at lhs {rep.lhs}"
