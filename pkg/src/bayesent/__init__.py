"""Bayesian estimates of entropy and information from counts under Dirichlet priors.

Both the concentration c and the number of bins |Z| may be random, with
independent hyperpriors so that unseen variables never change the answer.
"""

from .baselines import (
    NoCoincidencesError,
    asymptotic_nsb_entropy,
    cae_entropy,
    nsb_large_z_entropy,
    plugin_entropy,
)
from .estimators import (
    EstimatorConfig,
    entropy_mean_fixed,
    entropy_mean_unknown_size,
    entropy_moments_full,
    entropy_second_moment_fixed,
    entropy_variance_fixed,
    fixed_size_marginal_c,
    mi_mean_fixed,
    mi_mean_full,
    multi_information,
    tsallis_mean_fixed,
)
from .likelihood import (
    SizePosterior,
    c_max,
    log_likelihood_size,
    log_likelihood_size_marginal_c,
    prior_entropy_variance,
    size_posterior,
    subset_log_likelihood,
    subset_log_likelihood_normalized,
)
from .model import (
    CountVector,
    DirichletSpec,
    ExponentialSize,
    GeometricSize,
    InfeasibleModelError,
    JointCountTable,
    LogUniformC,
    MomentEstimate,
    PointMassC,
    PointMassSize,
    UniformSize,
    log_G,
    marginalize,
    read_counts,
    read_table,
)
from .quad import LogGrid, c_grid, log_sum_exp, size_sum
from .simulate import (
    DirichletGen,
    PowerLawGen,
    SweepResult,
    SweepSpec,
    mc_posterior_oracle,
    run_sweep,
    sample_counts,
    sample_dirichlet,
)
from .specfun import DomainError, delta_phi1, delta_phi2, digamma, ln_gamma, tetragamma, trigamma

__version__ = "0.1.0"
