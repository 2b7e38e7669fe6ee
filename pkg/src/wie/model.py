"""Domain types: time grids, piecewise-cubic trajectories, problem data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, OutOfDomainError

# e^{-700} sits just above the double-precision denormal floor; weights for
# larger horizons are numerically meaningless.
UNDERFLOW_GUARD = 700.0


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Uniform node set 0 = s_0 < s_1 < ... = s_max for the slow variable."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.ascontiguousarray(np.asarray(self.nodes, dtype=float))
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("grid needs at least two nodes")
        if nodes[0] != 0.0:
            raise ValueError("grid must start at 0")
        steps = np.diff(nodes)
        if np.any(steps <= 0.0):
            raise ValueError("grid nodes must be strictly increasing")
        ds = steps[0]
        if not np.allclose(steps, ds, rtol=1e-9, atol=0.0):
            raise ValueError("grid nodes must be uniformly spaced")
        if ds > 1.0 + 1e-12:
            raise ValueError(f"element width {ds} exceeds 1")
        object.__setattr__(self, "nodes", nodes)

    @property
    def ds(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def s_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    def element_index(self, t: np.ndarray) -> np.ndarray:
        """Index of the element containing each t (right-open convention,
        last node assigned to the last element)."""
        idx = np.searchsorted(self.nodes, t, side="right") - 1
        return np.clip(idx, 0, self.n_elements - 1)


def make_uniform_grid(s_max: float, ds: float) -> TimeGrid:
    """Uniform grid from 0 with element width ds, extended past s_max if
    ds does not divide it."""
    if not (ds > 0.0) or not (s_max > 0.0):
        raise ValueError("s_max and ds must be positive")
    if s_max < ds:
        raise ValueError(f"s_max={s_max} smaller than element width ds={ds}")
    q = s_max / ds
    n_el = round(q) if abs(q - round(q)) <= 1e-9 * max(1.0, q) else math.ceil(q)
    return TimeGrid(np.arange(n_el + 1) * ds)


def _hermite_shape(xi: np.ndarray) -> tuple[np.ndarray, ...]:
    """Cubic Hermite shape functions and derivatives on the reference
    element, in dof order (value_L, slope_L, value_R, slope_R); slope dofs
    are scaled by the element width at the call site."""
    xi2 = xi * xi
    xi3 = xi2 * xi
    h = np.stack([1.0 - 3.0 * xi2 + 2.0 * xi3,
                  xi - 2.0 * xi2 + xi3,
                  3.0 * xi2 - 2.0 * xi3,
                  -xi2 + xi3])
    dh = np.stack([-6.0 * xi + 6.0 * xi2,
                   1.0 - 4.0 * xi + 3.0 * xi2,
                   6.0 * xi - 6.0 * xi2,
                   -2.0 * xi + 3.0 * xi2])
    ddh = np.stack([-6.0 + 12.0 * xi,
                    -4.0 + 6.0 * xi,
                    6.0 - 12.0 * xi,
                    -2.0 + 6.0 * xi])
    return h, dh, ddh


@dataclass(frozen=True, eq=False)
class HermiteTrajectory:
    """C^1 piecewise cubic defined by nodal values and first derivatives.

    Shapes: values and slopes are (n_nodes, N).  The induced second
    derivative is piecewise linear, so the weighted acceleration energy of
    any trajectory is finite by construction.
    """

    grid: TimeGrid
    values: np.ndarray
    slopes: np.ndarray

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        slopes = np.atleast_2d(np.asarray(self.slopes, dtype=float))
        if values.shape[0] == 1 and self.grid.n_nodes > 1:
            values, slopes = values.T, slopes.T
        if values.shape != slopes.shape or values.shape[0] != self.grid.n_nodes:
            raise ValueError(
                f"values/slopes shapes {values.shape}/{slopes.shape} do not "
                f"match the {self.grid.n_nodes}-node grid")
        object.__setattr__(self, "values", np.ascontiguousarray(values))
        object.__setattr__(self, "slopes", np.ascontiguousarray(slopes))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def eval(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Value, first and second derivative at t (scalar or 1-d array).

        Returns arrays of shape (N,) for scalar t and (len(t), N) otherwise.
        At interior nodes the second derivative is taken from the element on
        the right.
        """
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        tol = 1e-12 * (1.0 + self.grid.s_max)
        if np.any(t_arr < -tol) or np.any(t_arr > self.grid.s_max + tol):
            raise OutOfDomainError(
                f"t outside [0, {self.grid.s_max}]")
        k = self.grid.element_index(t_arr)
        a = self.grid.nodes[k]
        width = self.grid.nodes[k + 1] - a
        xi = np.clip((t_arr - a) / width, 0.0, 1.0)
        h, dh, ddh = _hermite_shape(xi)
        w = width[:, None]
        vl, vr = self.values[k], self.values[k + 1]
        dl, dr = self.slopes[k] * w, self.slopes[k + 1] * w
        y = (h[0, :, None] * vl + h[1, :, None] * dl
             + h[2, :, None] * vr + h[3, :, None] * dr)
        dy = (dh[0, :, None] * vl + dh[1, :, None] * dl
              + dh[2, :, None] * vr + dh[3, :, None] * dr) / w
        d2y = (ddh[0, :, None] * vl + ddh[1, :, None] * dl
               + ddh[2, :, None] * vr + ddh[3, :, None] * dr) / w**2
        if scalar:
            return y[0], dy[0], d2y[0]
        return y, dy, d2y


def eval_trajectory(traj: HermiteTrajectory, t):
    """Evaluate (value, first derivative, second derivative) at t."""
    return traj.eval(t)


@dataclass(frozen=True, eq=False)
class CauchyProblem:
    """Mass, initial position/velocity and a force field."""

    m: float
    u0: np.ndarray
    v0: np.ndarray
    force: "object"

    def __post_init__(self):
        if not self.m > 0.0:
            raise ValueError(f"mass must be positive, got {self.m}")
        u0 = np.atleast_1d(np.asarray(self.u0, dtype=float))
        v0 = np.atleast_1d(np.asarray(self.v0, dtype=float))
        if u0.ndim != 1 or u0.shape != v0.shape:
            raise ValueError("u0 and v0 must be 1-d and of equal length")
        if self.force is not None and getattr(self.force, "dim", u0.size) != u0.size:
            raise ValueError(
                f"force dimension {self.force.dim} does not match data "
                f"dimension {u0.size}")
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "m", float(self.m))

    @property
    def dim(self) -> int:
        return self.u0.size


@dataclass(frozen=True)
class SolverConfig:
    """Discretization and solve parameters.

    T_view is the fast-variable window of interest; the slow-variable grid
    extends to h*T_view + s_tail so that truncation affects the window below
    double precision.
    """

    T_view: float
    s_tail: float = 40.0
    ds: float = 0.25
    quad_order: int = 6
    solve_tol: float = 1e-10

    def __post_init__(self):
        if not self.T_view > 0.0:
            raise ValueError("T_view must be positive")
        if not self.s_tail > 0.0:
            raise ValueError("s_tail must be positive")
        if not 0.0 < self.ds <= 1.0:
            raise ValueError("ds must lie in (0, 1]")
        if self.quad_order < 4:
            raise ValueError("quad_order must be at least 4")
        if not self.solve_tol > 0.0:
            raise ValueError("solve_tol must be positive")

    def slow_horizon(self, h: int) -> float:
        s_max = h * self.T_view + self.s_tail
        if s_max > UNDERFLOW_GUARD:
            raise ConfigurationError(
                f"h*T_view + s_tail = {s_max} exceeds the underflow guard "
                f"{UNDERFLOW_GUARD}")
        return s_max
