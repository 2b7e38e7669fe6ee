"""Bounded force fields, weak-* convergent families and sampled data."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import OutOfDomainError, ResolutionError, SampleParseError
from .quadrature import composite_points, subintervals_for


class Force:
    """A force field on t >= 0 with a declared essential sup bound.

    Subclasses set `kind`, `dim`, `sup_bound` and `max_frequency` (an angular
    rate used to pick quadrature resolutions; 0 means no oscillation to
    resolve) and implement `_eval` on a 1-d array.
    """

    kind: str = "abstract"
    dim: int = 1
    sup_bound: float = 0.0
    max_frequency: float = 0.0

    def _eval(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eval(self, t) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        if np.any(t_arr < -1e-12):
            raise OutOfDomainError("forces are defined for t >= 0 only")
        out = self._eval(np.maximum(t_arr, 0.0))
        return out[0] if scalar else out

    __call__ = eval

    def breakpoints(self, t_max: float) -> np.ndarray:
        """Locations in (0, t_max) where the force is not smooth."""
        return np.empty(0)


def eval_force(f: Force, t) -> np.ndarray:
    """Evaluate f at t; negative t is out of domain."""
    return f.eval(t)


@dataclass(frozen=True, eq=False)
class ZeroForce(Force):
    dim: int = 1
    kind = "zero"
    sup_bound = 0.0

    def _eval(self, t):
        return np.zeros((t.size, self.dim))


@dataclass(frozen=True, eq=False)
class ConstantForce(Force):
    value: np.ndarray = field(default_factory=lambda: np.zeros(1))
    kind = "constant"

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.value, dtype=float))
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "dim", v.size)
        object.__setattr__(self, "sup_bound", float(np.linalg.norm(v)))

    def _eval(self, t):
        return np.broadcast_to(self.value, (t.size, self.dim)).copy()


@dataclass(frozen=True, eq=False)
class SinusoidForce(Force):
    """amplitude * sin(omega t + phase) + offset."""

    amplitude: np.ndarray = field(default_factory=lambda: np.ones(1))
    omega: float = 1.0
    phase: float = 0.0
    offset: np.ndarray | None = None
    kind = "sinusoid"

    def __post_init__(self):
        amp = np.atleast_1d(np.asarray(self.amplitude, dtype=float))
        off = (np.zeros_like(amp) if self.offset is None
               else np.atleast_1d(np.asarray(self.offset, dtype=float)))
        if off.shape != amp.shape:
            raise ValueError("offset and amplitude dimensions differ")
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "phase", float(self.phase))
        object.__setattr__(self, "dim", amp.size)
        object.__setattr__(self, "sup_bound",
                           float(np.linalg.norm(off) + np.linalg.norm(amp)))
        object.__setattr__(self, "max_frequency", abs(float(self.omega)))

    def _eval(self, t):
        s = np.sin(self.omega * t + self.phase)
        return s[:, None] * self.amplitude + self.offset


@dataclass(frozen=True, eq=False)
class PolynomialForce(Force):
    """Polynomial in t, frozen at its hold_from value afterwards.

    coeffs[k] is the vector coefficient of t^k.  Holding the last value keeps
    the field essentially bounded; the declared sup bound is the exact
    maximum of |f| on [0, hold_from].
    """

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros((1, 1)))
    hold_from: float = 100.0
    kind = "polynomial"

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if not self.hold_from > 0.0:
            raise ValueError("hold_from must be positive")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "hold_from", float(self.hold_from))
        object.__setattr__(self, "dim", c.shape[1])
        object.__setattr__(self, "sup_bound", self._exact_sup())

    def _exact_sup(self) -> float:
        # extrema of |f|^2 on [0, hold_from]: endpoints plus roots of d|f|^2/dt
        sq = np.polynomial.Polynomial(np.zeros(1))
        for c in range(self.dim):
            p = np.polynomial.Polynomial(self.coeffs[:, c])
            sq = sq + p * p
        cand = [0.0, self.hold_from]
        der = sq.deriv()
        if der.degree() >= 1:
            roots = der.roots()
            cand.extend(r.real for r in roots
                        if abs(r.imag) < 1e-12 and 0.0 < r.real < self.hold_from)
        return float(np.sqrt(max(sq(t) for t in cand)))

    def _eval(self, t):
        tt = np.minimum(t, self.hold_from)
        powers = np.vander(tt, self.coeffs.shape[0], increasing=True)
        return powers @ self.coeffs

    def breakpoints(self, t_max):
        return np.array([self.hold_from]) if self.hold_from < t_max else np.empty(0)


@dataclass(frozen=True, eq=False)
class PiecewiseConstantForce(Force):
    """Piecewise constant on segments split at `breaks`; either held at the
    last value beyond the final break or repeated with period `period`."""

    breaks: np.ndarray = field(default_factory=lambda: np.ones(1))
    values: np.ndarray = field(default_factory=lambda: np.zeros((2, 1)))
    period: float | None = None
    kind = "piecewise_constant"

    def __post_init__(self):
        br = np.atleast_1d(np.asarray(self.breaks, dtype=float))
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if np.any(np.diff(br) <= 0.0) or np.any(br <= 0.0):
            raise ValueError("breaks must be strictly increasing and positive")
        if vals.shape[0] != br.size + 1:
            raise ValueError(
                f"need {br.size + 1} values for {br.size} breaks, got {vals.shape[0]}")
        if self.period is not None and not self.period > br[-1]:
            raise ValueError("period must exceed the last break")
        object.__setattr__(self, "breaks", br)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "dim", vals.shape[1])
        object.__setattr__(self, "sup_bound",
                           float(np.max(np.linalg.norm(vals, axis=1))))
        gaps = np.diff(np.concatenate([[0.0], br]))
        min_seg = float(np.min(gaps))
        if self.period is not None:
            min_seg = min(min_seg, float(self.period - br[-1]))
        object.__setattr__(self, "max_frequency", 2.0 * np.pi / min_seg)

    def _eval(self, t):
        tau = np.mod(t, self.period) if self.period is not None else t
        idx = np.searchsorted(self.breaks, tau, side="right")
        return self.values[idx]

    def breakpoints(self, t_max):
        if self.period is None:
            return self.breaks[self.breaks < t_max]
        reps = int(np.floor(t_max / self.period)) + 1
        pts = (np.arange(reps)[:, None] * self.period
               + np.concatenate([self.breaks, [self.period]])[None, :]).ravel()
        return np.unique(pts[(pts > 0.0) & (pts < t_max)])


@dataclass(frozen=True, eq=False)
class SampledForce(Force):
    """Tabulated samples with hold or linear interpolation, held constant
    past the last sample."""

    times: np.ndarray = field(default_factory=lambda: np.array([0.0]))
    samples: np.ndarray = field(default_factory=lambda: np.zeros((1, 1)))
    interpolation: str = "linear"
    kind = "sampled"

    def __post_init__(self):
        tv = np.atleast_1d(np.asarray(self.times, dtype=float))
        sv = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if sv.shape[0] == 1 and tv.size > 1:
            sv = sv.T
        if tv[0] != 0.0:
            raise ValueError("samples must start at t = 0")
        if np.any(np.diff(tv) <= 0.0):
            raise ValueError("sample times must be strictly increasing")
        if sv.shape[0] != tv.size:
            raise ValueError("one sample row per time required")
        if self.interpolation not in ("hold", "linear"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")
        object.__setattr__(self, "times", tv)
        object.__setattr__(self, "samples", sv)
        object.__setattr__(self, "dim", sv.shape[1])
        object.__setattr__(self, "sup_bound",
                           float(np.max(np.linalg.norm(sv, axis=1))))
        if tv.size > 1:
            object.__setattr__(self, "max_frequency",
                               2.0 * np.pi / float(np.min(np.diff(tv))))

    def _eval(self, t):
        if self.interpolation == "hold":
            idx = np.clip(np.searchsorted(self.times, t, side="right") - 1,
                          0, self.times.size - 1)
            return self.samples[idx]
        cols = [np.interp(t, self.times, self.samples[:, c])
                for c in range(self.dim)]
        return np.stack(cols, axis=1)

    def breakpoints(self, t_max):
        return self.times[(self.times > 0.0) & (self.times < t_max)]


@dataclass(frozen=True, eq=False)
class SumForce(Force):
    """Pointwise sum of force fields; the declared bound adds up."""

    parts: tuple = ()
    kind = "sum"

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("SumForce needs at least one part")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise ValueError(f"mixed dimensions in sum: {sorted(dims)}")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "dim", parts[0].dim)
        object.__setattr__(self, "sup_bound",
                           float(sum(p.sup_bound for p in parts)))
        object.__setattr__(self, "max_frequency",
                           max(p.max_frequency for p in parts))

    def _eval(self, t):
        out = self.parts[0]._eval(t).copy()
        for p in self.parts[1:]:
            out += p._eval(t)
        return out

    def breakpoints(self, t_max):
        pts = [p.breakpoints(t_max) for p in self.parts]
        return np.unique(np.concatenate(pts)) if pts else np.empty(0)


@dataclass(frozen=True, eq=False)
class ForceSequence:
    """h-indexed family of forces with a declared weak-* limit and a finite
    uniform sup bound."""

    generator: Callable[[int], Force]
    weak_star_limit: Force
    uniform_bound: float

    def __post_init__(self):
        if not np.isfinite(self.uniform_bound):
            raise ValueError("uniform bound must be finite")

    def member(self, h: int) -> Force:
        if int(h) < 1:
            raise ValueError(f"family index must be a positive integer, got {h}")
        return self.generator(int(h))


def oscillatory_family(base: Force, amplitude) -> ForceSequence:
    """Family base(t) + amplitude*sin(h t); weak-* limit is the base."""
    amp = np.atleast_1d(np.asarray(amplitude, dtype=float))
    if amp.size != base.dim:
        raise ValueError("amplitude dimension must match the base force")

    def gen(h: int) -> Force:
        wiggle = SinusoidForce(amplitude=amp, omega=float(h))
        if isinstance(base, ZeroForce):
            return wiggle
        return SumForce((base, wiggle))

    return ForceSequence(generator=gen, weak_star_limit=base,
                         uniform_bound=base.sup_bound + float(np.linalg.norm(amp)))


def square_wave_family(base: Force, amplitude) -> ForceSequence:
    """Family base(t) + amplitude*sign(sin(h t)); weak-* limit is the base."""
    amp = np.atleast_1d(np.asarray(amplitude, dtype=float))
    if amp.size != base.dim:
        raise ValueError("amplitude dimension must match the base force")

    def gen(h: int) -> Force:
        wave = PiecewiseConstantForce(breaks=np.array([np.pi / h]),
                                      values=np.stack([amp, -amp]),
                                      period=2.0 * np.pi / h)
        if isinstance(base, ZeroForce):
            return wave
        return SumForce((base, wave))

    return ForceSequence(generator=gen, weak_star_limit=base,
                         uniform_bound=base.sup_bound + float(np.linalg.norm(amp)))


def weakstar_gap(f_h: Force, limit: Force,
                 test_functions: Sequence[tuple[Callable, float]],
                 quad_order: int = 8) -> float:
    """max over test functions xi of |int_0^T (f_h - limit) xi dt|.

    The composite rule resolves the fastest declared oscillation with at
    least 10 points per period; an unresolvable request raises
    ResolutionError.
    """
    freq = max(f_h.max_frequency, limit.max_frequency)
    gap = 0.0
    for xi, T in test_functions:
        if not T > 0.0:
            raise ValueError("test-function horizon must be positive")
        # 20 points per period keeps the composite rule at the 1e-12 examples
        # while comfortably exceeding the 10-point resolution contract
        n_sub = subintervals_for(T, freq, quad_order, points_per_period=20,
                                 max_width=T)
        brk = np.unique(np.concatenate([f_h.breakpoints(T), limit.breakpoints(T)]))
        pts, wts = composite_points(0.0, T, quad_order, n_sub, breakpoints=brk)
        xi_vals = np.asarray(xi(pts), dtype=float)
        if xi_vals.shape != pts.shape:
            raise ValueError("test functions must map arrays to arrays")
        diff = f_h._eval(pts) - limit._eval(pts)
        integral = (wts * xi_vals) @ diff
        gap = max(gap, float(np.linalg.norm(integral)))
    return gap


def load_samples(path, interpolation: str) -> SampledForce:
    """Read a force from CSV with header "t,f_1,...,f_N".

    Comment lines start with '#'.  Times must be strictly increasing from 0.
    Malformed content raises SampleParseError carrying the line number.
    """
    if interpolation not in ("hold", "linear"):
        raise ValueError(f"unknown interpolation {interpolation!r}")
    with open(path, "r", newline="") as fh:
        raw = fh.read()
    times: list[float] = []
    rows: list[list[float]] = []
    n_cols: int | None = None
    header_seen = False
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = next(csv.reader(io.StringIO(line)))
        fields = [f.strip() for f in fields]
        if not header_seen:
            if fields[0] != "t" or len(fields) < 2:
                raise SampleParseError(lineno, "expected header 't,f_1,...,f_N'")
            expected = [f"f_{k}" for k in range(1, len(fields))]
            if fields[1:] != expected:
                raise SampleParseError(
                    lineno, f"expected columns {['t'] + expected}, got {fields}")
            n_cols = len(fields)
            header_seen = True
            continue
        if len(fields) != n_cols:
            raise SampleParseError(
                lineno, f"expected {n_cols} fields, got {len(fields)}")
        try:
            nums = [float(f) for f in fields]
        except ValueError as exc:
            raise SampleParseError(lineno, f"bad number: {exc}") from None
        if not times and nums[0] != 0.0:
            raise SampleParseError(lineno, f"first sample must be at t=0, got {nums[0]}")
        if times and nums[0] <= times[-1]:
            raise SampleParseError(
                lineno, f"time {nums[0]} does not increase past {times[-1]}")
        times.append(nums[0])
        rows.append(nums[1:])
    if not header_seen:
        raise SampleParseError(1, "missing header")
    if not times:
        raise SampleParseError(1, "no sample rows")
    return SampledForce(times=np.asarray(times), samples=np.asarray(rows),
                        interpolation=interpolation)
