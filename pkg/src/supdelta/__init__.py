"""Directional derivatives of supremum-type functionals and their limit laws.

The library evaluates the sup-norm, supremum, infimum and amplitude of
functions on finite grids, computes their Hadamard directional derivatives
through epsilon-level sets, simulates the Gaussian limit processes behind
Kolmogorov-Smirnov, Kuiper, copula, Berk-Jones and maximum-mean-discrepancy
statistics under the alternative, and checks simulated statistics against
their limits via an experiment harness.
"""

__version__ = "0.1.0"

from .grid import FunctionalKind, GridDomain, GridFunction, LevelSet
from .functionals import (
    argmax_set,
    argmin_set,
    difference_quotient,
    directional_derivative,
    evaluate,
    full_differentiability_witness,
    sublevel_set,
    superlevel_set,
)
from .empirical import (
    Sample,
    ecdf,
    empirical_copula,
    empirical_process,
    copula_partials,
    survival_copula,
)
from .samplers import (
    bridge_sampler,
    copula_limit_sampler,
    finite_class_sampler,
    mixture_sampler,
    weighted_bridge_sampler,
)
from .stats import (
    FiniteFunctionClass,
    StatResult,
    berk_jones_Bn,
    berk_jones_R,
    berk_jones_null_centered,
    copula_stat_Tn,
    copula_symmetry_stat,
    kernel_mmd,
    kl_bernoulli,
    ks_one_sample,
    ks_two_sample,
    mmd_finite,
    mmd_statistic,
)
from .limits import (
    LimitReplicates,
    LimitSpec,
    bj_limit,
    compare_distributions,
    copula_limit_Tn,
    copula_symmetry_limit,
    gaussian_shortcut,
    mmd_limit,
    simulate_limit,
)
from .experiments import ExperimentConfig, ExperimentReport, run

__all__ = [
    "FunctionalKind",
    "GridDomain",
    "GridFunction",
    "LevelSet",
    "evaluate",
    "superlevel_set",
    "sublevel_set",
    "directional_derivative",
    "difference_quotient",
    "argmax_set",
    "argmin_set",
    "full_differentiability_witness",
    "Sample",
    "ecdf",
    "empirical_process",
    "empirical_copula",
    "survival_copula",
    "copula_partials",
    "bridge_sampler",
    "copula_limit_sampler",
    "weighted_bridge_sampler",
    "mixture_sampler",
    "finite_class_sampler",
    "StatResult",
    "ks_one_sample",
    "ks_two_sample",
    "copula_stat_Tn",
    "copula_symmetry_stat",
    "kl_bernoulli",
    "berk_jones_R",
    "berk_jones_null_centered",
    "berk_jones_Bn",
    "FiniteFunctionClass",
    "mmd_finite",
    "mmd_statistic",
    "kernel_mmd",
    "LimitSpec",
    "LimitReplicates",
    "simulate_limit",
    "gaussian_shortcut",
    "bj_limit",
    "copula_limit_Tn",
    "copula_symmetry_limit",
    "mmd_limit",
    "compare_distributions",
    "ExperimentConfig",
    "ExperimentReport",
    "run",
]
