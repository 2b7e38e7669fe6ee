"""Scenario configuration: TOML files with a strict schema.

Scenarios are the reproducibility contract of the tool, so unknown keys are
rejected rather than ignored.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .forces import (ConstantForce, Force, ForceSequence, PiecewiseConstantForce,
                     PolynomialForce, SinusoidForce, ZeroForce, load_samples,
                     oscillatory_family, square_wave_family)
from .model import CauchyProblem, SolverConfig

VALID_FORMATS = ("csv", "json", "png")


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str
    problem: CauchyProblem
    sequence: ForceSequence | None
    solver: SolverConfig
    h_values: tuple | None
    output_dir: str
    formats: tuple


def _reject_unknown(table: dict, allowed: set, path: str):
    for key in table:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")


def _require(table: dict, key: str, path: str):
    if key not in table:
        raise ConfigError(f"{path}.{key}: missing required key")
    return table[key]


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _as_vector(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a nonempty list of numbers")
    return np.array([_as_number(v, f"{path}[{i}]") for i, v in enumerate(value)])


def _as_int_list(value, path: str) -> list[int]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a nonempty list of integers")
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{path}[{i}]: expected an integer, got {v!r}")
        out.append(v)
    return out


_FORCE_KEYS = {
    "zero": set(),
    "constant": {"value"},
    "sinusoid": {"amplitude", "omega", "phase", "offset"},
    "polynomial": {"coeffs", "hold_from"},
    "piecewise_constant": {"breaks", "values", "period"},
    "sampled": {"path", "interpolation"},
}


def _parse_plain_force(table: dict, dim: int, path: str, base_dir: Path) -> Force:
    kind = _require(table, "kind", path)
    if kind not in _FORCE_KEYS:
        raise ConfigError(f"{path}.kind: unknown force kind {kind!r}")
    _reject_unknown(table, _FORCE_KEYS[kind] | {"kind"}, path)
    try:
        if kind == "zero":
            return ZeroForce(dim=dim)
        if kind == "constant":
            return ConstantForce(value=_as_vector(_require(table, "value", path), f"{path}.value"))
        if kind == "sinusoid":
            offset = table.get("offset")
            return SinusoidForce(
                amplitude=_as_vector(_require(table, "amplitude", path), f"{path}.amplitude"),
                omega=_as_number(_require(table, "omega", path), f"{path}.omega"),
                phase=_as_number(table.get("phase", 0.0), f"{path}.phase"),
                offset=None if offset is None else _as_vector(offset, f"{path}.offset"))
        if kind == "polynomial":
            coeffs = _require(table, "coeffs", path)
            if not isinstance(coeffs, list) or not coeffs:
                raise ConfigError(f"{path}.coeffs: expected a list of coefficient rows")
            rows = [_as_vector(row, f"{path}.coeffs[{i}]") for i, row in enumerate(coeffs)]
            return PolynomialForce(
                coeffs=np.stack(rows),
                hold_from=_as_number(table.get("hold_from", 100.0), f"{path}.hold_from"))
        if kind == "piecewise_constant":
            values = _require(table, "values", path)
            if not isinstance(values, list) or not values:
                raise ConfigError(f"{path}.values: expected a list of value rows")
            rows = [_as_vector(row, f"{path}.values[{i}]") for i, row in enumerate(values)]
            period = table.get("period")
            return PiecewiseConstantForce(
                breaks=_as_vector(_require(table, "breaks", path), f"{path}.breaks"),
                values=np.stack(rows),
                period=None if period is None else _as_number(period, f"{path}.period"))
        csv_path = _require(table, "path", path)
        if not isinstance(csv_path, str):
            raise ConfigError(f"{path}.path: expected a string")
        interpolation = table.get("interpolation", "linear")
        return load_samples(base_dir / csv_path, interpolation)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_force_section(table: dict, dim: int, base_dir: Path
                         ) -> tuple[Force | None, ForceSequence | None]:
    if "family" in table:
        _reject_unknown(table, {"family", "amplitude", "base"}, "force")
        family = table["family"]
        amplitude = _as_vector(_require(table, "amplitude", "force"), "force.amplitude")
        base_table = table.get("base", {"kind": "zero"})
        if not isinstance(base_table, dict):
            raise ConfigError("force.base: expected a table")
        base = _parse_plain_force(base_table, dim, "force.base", base_dir)
        if family == "sinusoid":
            return None, oscillatory_family(base, amplitude)
        if family == "square_wave":
            return None, square_wave_family(base, amplitude)
        raise ConfigError(f"force.family: unknown family {family!r}")
    return _parse_plain_force(table, dim, "force", base_dir), None


def load_scenario(path) -> ScenarioConfig:
    """Parse and validate a scenario file; raises ConfigError on any
    schema violation, naming the offending key."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    _reject_unknown(data, {"name", "problem", "force", "solver", "sweep", "output"}, "config")
    name = data.get("name", path.stem)
    if not isinstance(name, str) or not name:
        raise ConfigError("config.name: expected a nonempty string")

    prob_tbl = _require(data, "problem", "config")
    _reject_unknown(prob_tbl, {"m", "u0", "v0"}, "problem")
    u0 = _as_vector(_require(prob_tbl, "u0", "problem"), "problem.u0")
    v0 = _as_vector(_require(prob_tbl, "v0", "problem"), "problem.v0")
    m = _as_number(_require(prob_tbl, "m", "problem"), "problem.m")
    if u0.size != v0.size:
        raise ConfigError("problem.u0 and problem.v0 must have the same length")

    force_tbl = _require(data, "force", "config")
    force, sequence = _parse_force_section(force_tbl, u0.size, path.parent)
    try:
        problem = CauchyProblem(m, u0, v0,
                                force if force is not None else sequence.weak_star_limit)
    except ValueError as exc:
        raise ConfigError(f"problem: {exc}") from exc

    solver_tbl = _require(data, "solver", "config")
    _reject_unknown(solver_tbl, {"T_view", "s_tail", "ds", "quad_order", "solve_tol"}, "solver")
    kw = {"T_view": _as_number(_require(solver_tbl, "T_view", "solver"), "solver.T_view")}
    for key in ("s_tail", "ds", "solve_tol"):
        if key in solver_tbl:
            kw[key] = _as_number(solver_tbl[key], f"solver.{key}")
    if "quad_order" in solver_tbl:
        q = solver_tbl["quad_order"]
        if isinstance(q, bool) or not isinstance(q, int):
            raise ConfigError("solver.quad_order: expected an integer")
        kw["quad_order"] = q
    try:
        solver = SolverConfig(**kw)
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from exc

    h_values = None
    if "sweep" in data:
        _reject_unknown(data["sweep"], {"h"}, "sweep")
        hs = _as_int_list(_require(data["sweep"], "h", "sweep"), "sweep.h")
        if any(b <= a for a, b in zip(hs, hs[1:])) or hs[0] < 1:
            raise ConfigError("sweep.h: must be strictly increasing positive integers")
        h_values = tuple(hs)

    output_dir = "out"
    formats = ("csv", "json", "png")
    if "output" in data:
        out_tbl = data["output"]
        _reject_unknown(out_tbl, {"directory", "formats"}, "output")
        if "directory" in out_tbl:
            if not isinstance(out_tbl["directory"], str):
                raise ConfigError("output.directory: expected a string")
            output_dir = out_tbl["directory"]
        if "formats" in out_tbl:
            fmts = out_tbl["formats"]
            if not isinstance(fmts, list) or not fmts:
                raise ConfigError("output.formats: expected a nonempty list")
            for i, fmt in enumerate(fmts):
                if fmt not in VALID_FORMATS:
                    raise ConfigError(
                        f"output.formats[{i}]: {fmt!r} not one of {VALID_FORMATS}")
            formats = tuple(fmts)

    return ScenarioConfig(name=name, problem=problem, sequence=sequence,
                          solver=solver, h_values=h_values,
                          output_dir=output_dir, formats=formats)
