"""Weighted inertia-energy minimization lab.

Minimizers of m/2 int |u''|^2 e^{-s} ds - h^{-2} int f_h(s/h).u e^{-s} ds,
subject to u(0) = u0 and u'(0) = v0/h, converge after the rescaling
y(t) = u(h t) to the solution of m y'' = f as h grows, including under
weak-* convergent forcing families.  This package assembles and solves the
discretized problem, ships independent oracles for every checkable
statement, and drives convergence experiments.
"""

from .errors import (AccuracyError, ConditioningError, ConfigError,
                     ConfigurationError, OutOfDomainError, ResolutionError,
                     SampleParseError, WieError)
from .model import (CauchyProblem, HermiteTrajectory, SolverConfig, TimeGrid,
                    eval_trajectory, make_uniform_grid)
from .forces import (ConstantForce, Force, ForceSequence, PiecewiseConstantForce,
                     PolynomialForce, SampledForce, SinusoidForce, SumForce,
                     ZeroForce, eval_force, load_samples, oscillatory_family,
                     square_wave_family, weakstar_gap)
from .fem import (MinimizerOutput, WeightedQuadraticForm, assemble,
                  el_residual, element_weighted_integrals, jh_value,
                  minimize_Jh, rescale_to_fast)
from .oracles import (LemmaReport, SupNormReport, check_lemma21,
                      check_scaling_identity, check_supnorm_bound,
                      classical_solution, el_second_derivative, kernel_mass)
from .lab import (ErrorMetrics, SweepReport, mesh_refinement_study, run_single,
                  run_single_detailed, run_sweep)
from .config import ScenarioConfig, load_scenario

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "CauchyProblem", "ConditioningError", "ConfigError",
    "ConfigurationError", "ConstantForce", "ErrorMetrics", "Force",
    "ForceSequence", "HermiteTrajectory", "LemmaReport", "MinimizerOutput",
    "OutOfDomainError", "PiecewiseConstantForce", "PolynomialForce",
    "ResolutionError", "SampleParseError", "SampledForce", "ScenarioConfig",
    "SinusoidForce", "SolverConfig", "SumForce", "SupNormReport", "SweepReport",
    "TimeGrid", "WeightedQuadraticForm", "WieError", "ZeroForce", "assemble",
    "check_lemma21", "check_scaling_identity", "check_supnorm_bound",
    "classical_solution", "el_residual", "el_second_derivative",
    "element_weighted_integrals", "eval_force", "eval_trajectory", "jh_value",
    "kernel_mass", "load_samples", "load_scenario", "make_uniform_grid",
    "mesh_refinement_study", "minimize_Jh", "oscillatory_family",
    "rescale_to_fast", "run_single", "run_single_detailed", "run_sweep",
    "square_wave_family", "weakstar_gap",
]
