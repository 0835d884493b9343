"""Density estimation from length-biased samples.

Observations arrive from the biased density ``g(y)`` proportional to
``y * f(y)``.  This package fits a Dirichlet-process mixture of log-normals to
``g`` with a slice-augmented Gibbs sampler, converts posterior-predictive
draws into draws from ``f`` with a tuning-free Metropolis step, and ships
classical and indirect-data kernel density baselines for comparison.
"""
from ._kernels import available_backends, default_backend
from .debias import (
    DebiasChain,
    DebiasRun,
    WeightFn,
    accept_probability,
    debias_normalizer,
    debias_step,
    exact_debias_density,
    exact_debias_density_grid,
    run_debias,
)
from .diagnostics import TraceSummary, acf, average_clusters, ks_statistic, l1_distance, running_average
from .dpmm import (
    ChainRun,
    ChainState,
    Dataset,
    Hyperparams,
    gibbs_sweep,
    init_chain,
    mixture_density,
    mixture_density_grid,
    run_chain,
    sample_predictive,
    state_from_weights,
    update_atoms,
    update_lambda,
    update_slices_allocations,
    update_sticks,
)
from .errors import (
    ConfigurationError,
    DataError,
    DegenerateConditionalError,
    NumericalError,
    TruncationError,
)
from .experiment import ExperimentConfig, PRESETS, compare, consistency, fit, gen_synthetic, load_csv
from .kde import (
    Bandwidth,
    DensityEstimate,
    classical_kde,
    default_grid,
    harmonic_mean,
    jones_kde,
    select_bandwidth,
    silverman_bandwidth,
)
from .report import RunReport
from .rng import make_rng, split_rng

__version__ = "0.1.0"
