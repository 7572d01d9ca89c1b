"""Choose-the-leader alignment dynamics on the torus.

Simulation of the pair-interaction jump process (compiled event loop with a
pure-Python fallback), empirical Fourier coefficients of k-particle marginals,
an exact Fourier-space solver for the marginal hierarchy in all scaling
regimes, and diagnostics quantifying order, chaos, and the in-between.
"""

from .backend import available_backends, resolve_backend
from .expsum import ExpPolySum, exp_diff_ratio
from .harness import ExperimentConfig, ZReport, compare_mc_analytic, run_experiment
from .hierarchy import (BalancedLimit, ChaoticInitial, FiniteN, HierarchySolution,
                        OrderedInitial, StrongLimit, TableInitial,
                        TupleUnavailableError, Unscaled, balanced_f2, first_marginal,
                        h_coeff, h_peak, h_profile, limit_density_k,
                        order_decay_constant, second_marginal_finiteN,
                        solve_hierarchy, unscaled_meanfield)
from .kernels import BaseDensity, BoundCheck, NoiseKernel, gaussian, laplace, uniform_sym
from .marginals import CoeffTable, estimate, merge, per_run_coefficient
from .metrics import (DiagnosticsReport, chaos_residual, diag_gap, diagnostics,
                      order_residual, partial_order_residual)
from .profiles import CoverageError, OrderProfile
from .simulate import (Configuration, InitialCondition, SimParams, init, run,
                       run_ensemble, run_rng, step)

__version__ = "0.1.0"
