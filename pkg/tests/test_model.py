import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wie import (CauchyProblem, HermiteTrajectory, OutOfDomainError, SinusoidForce,
                 SolverConfig, ZeroForce, eval_trajectory, make_uniform_grid)
from wie.errors import ConfigurationError


class TestMakeUniformGrid:
    def test_exact_division(self):
        grid = make_uniform_grid(1.0, 0.5)
        assert np.allclose(grid.nodes, [0.0, 0.5, 1.0])

    def test_rounds_up(self):
        grid = make_uniform_grid(1.0, 0.4)
        assert grid.n_nodes == 4
        assert grid.nodes[-1] == pytest.approx(1.2)
        assert grid.nodes[-1] >= 1.0

    def test_node_count(self):
        assert make_uniform_grid(40.0, 0.25).n_nodes == 161

    @pytest.mark.parametrize("s_max,ds", [(-1.0, 0.5), (1.0, -0.5), (0.0, 0.5), (1.0, 0.0)])
    def test_nonpositive_rejected(self, s_max, ds):
        with pytest.raises(ValueError):
            make_uniform_grid(s_max, ds)

    def test_smax_below_ds_rejected(self):
        with pytest.raises(ValueError):
            make_uniform_grid(0.1, 0.5)

    def test_wide_elements_rejected(self):
        with pytest.raises(ValueError):
            make_uniform_grid(10.0, 2.0)


class TestTrajectoryEval:
    def test_nodes_reproduce_stored_data(self):
        grid = make_uniform_grid(2.0, 0.5)
        rng = np.random.default_rng(7)
        traj = HermiteTrajectory(grid, rng.normal(size=(5, 2)), rng.normal(size=(5, 2)))
        y, dy, _ = traj.eval(grid.nodes)
        assert np.array_equal(y, traj.values)
        assert np.array_equal(dy, traj.slopes)

    def test_affine_data_exact_everywhere(self):
        grid = make_uniform_grid(3.0, 0.75)
        a, b = 1.25, -0.5
        traj = HermiteTrajectory(grid, a + b * grid.nodes, np.full(grid.n_nodes, b))
        t = np.linspace(0.0, 3.0, 57)
        y, dy, d2y = traj.eval(t)
        assert np.allclose(y[:, 0], a + b * t, atol=1e-14)
        assert np.allclose(dy[:, 0], b, atol=1e-13)
        assert np.allclose(d2y[:, 0], 0.0, atol=1e-12)

    def test_unit_cubic_halfway(self):
        # data of s^3 on [0, 1]: value 1 and slope 3 at the right node
        grid = make_uniform_grid(1.0, 1.0)
        traj = HermiteTrajectory(grid, [[0.0], [1.0]], [[0.0], [3.0]])
        y, dy, d2y = traj.eval(0.5)
        assert y[0] == pytest.approx(0.125, abs=1e-15)
        assert dy[0] == pytest.approx(0.75, abs=1e-15)
        assert d2y[0] == pytest.approx(3.0, abs=1e-13)

    @settings(max_examples=25, deadline=None)
    @given(coeffs=st.lists(st.floats(-5.0, 5.0), min_size=4, max_size=4))
    def test_reproduces_any_cubic(self, coeffs):
        p = np.polynomial.Polynomial(coeffs)
        grid = make_uniform_grid(4.0, 0.5)
        traj = HermiteTrajectory(grid, p(grid.nodes), p.deriv()(grid.nodes))
        t = np.random.default_rng(3).uniform(0.0, 4.0, size=100)
        y, dy, d2y = traj.eval(t)
        scale = max(1.0, np.max(np.abs(p(t))))
        assert np.max(np.abs(y[:, 0] - p(t))) <= 10 * np.finfo(float).eps * scale
        assert np.allclose(dy[:, 0], p.deriv()(t), rtol=1e-12, atol=1e-11)
        assert np.allclose(d2y[:, 0], p.deriv(2)(t), rtol=1e-11, atol=1e-10)

    def test_second_derivative_piecewise_linear(self):
        grid = make_uniform_grid(5.0, 0.5)
        rng = np.random.default_rng(11)
        traj = HermiteTrajectory(grid, rng.uniform(-3, 3, size=(grid.n_nodes, 1)),
                                 rng.uniform(-3, 3, size=(grid.n_nodes, 1)))
        for k in rng.integers(0, grid.n_elements, size=5):
            a, b = grid.nodes[k], grid.nodes[k + 1]
            left = traj.eval(a)[2][0]
            right = traj.eval(np.nextafter(b, a))[2][0]
            mid = traj.eval((a + b) / 2)[2][0]
            assert mid == pytest.approx((left + right) / 2, rel=1e-9, abs=1e-9)

    @pytest.mark.parametrize("t", [-0.1, 5.3])
    def test_out_of_domain(self, t):
        grid = make_uniform_grid(5.0, 0.5)
        traj = HermiteTrajectory(grid, np.zeros((11, 1)), np.zeros((11, 1)))
        with pytest.raises(OutOfDomainError):
            eval_trajectory(traj, t)

    def test_shape_mismatch_rejected(self):
        grid = make_uniform_grid(1.0, 0.5)
        with pytest.raises(ValueError):
            HermiteTrajectory(grid, np.zeros((4, 1)), np.zeros((4, 1)))


class TestProblemData:
    def test_mass_positive(self):
        with pytest.raises(ValueError):
            CauchyProblem(0.0, [1.0], [0.0], ZeroForce(dim=1))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            CauchyProblem(1.0, [1.0, 2.0], [0.0, 0.0], ZeroForce(dim=3))

    def test_force_dimension_matches(self):
        p = CauchyProblem(1.0, [1.0, 2.0], [0.0, 1.0],
                          SinusoidForce(amplitude=[1.0, 0.5], omega=2.0))
        assert p.dim == 2


class TestSolverConfig:
    def test_defaults(self):
        cfg = SolverConfig(T_view=2.0)
        assert cfg.s_tail == 40.0
        assert cfg.ds == 0.25
        assert cfg.quad_order == 6
        assert cfg.solve_tol == 1e-10

    @pytest.mark.parametrize("kw", [dict(T_view=-1.0), dict(T_view=1.0, ds=1.5),
                                    dict(T_view=1.0, quad_order=2),
                                    dict(T_view=1.0, solve_tol=0.0)])
    def test_invalid_rejected(self, kw):
        with pytest.raises(ValueError):
            SolverConfig(**kw)

    def test_underflow_guard(self):
        cfg = SolverConfig(T_view=2.0)
        assert cfg.slow_horizon(64) == pytest.approx(168.0)
        with pytest.raises(ConfigurationError):
            cfg.slow_horizon(512)
