"""
edgekit - Soft-edge eigenvalue laws of beta-ensembles

Samples the largest eigenvalues of beta-ensembles four ways (tridiagonal
Hermite/Laguerre matrices, the discretized stochastic Airy operator, and
explosion times of its Riccati diffusion) and checks them against the
Tracy-Widom laws computed from Painleve II.

Examples:
    >>> import edgekit as ek

    # Edge statistics of a beta-Hermite draw
    >>> stream = ek.make_stream(master_seed=1, stream_id=0)
    >>> ek.edge_sample(ek.HermiteSpec(n=10_000, beta=2.0), k=3, stream=stream).values

    # Stochastic Airy operator at grid step 0.01
    >>> ek.sao_eigs(beta=2.0, h=0.01, x_max=15.0, k=3, stream=stream)

    # Lambda_0 straight from the Riccati diffusion
    >>> ek.sample_lambda0(beta=2.0, config=ek.RiccatiConfig(), stream=stream)

    # Reference law: P(Lambda_0 > 0) = F_2(0)
    >>> sol = ek.get_reference_solution()
    >>> ek.reference_survival(2, 0.0, sol)

    # Whole experiments, persisted as CSV + JSON manifest
    >>> cfg = ek.RiccatiCdfExperiment(beta=2.0, samples=1000, seed=1, out="r.csv")
    >>> ek.run_experiment(cfg).estimate.to_frame()
"""

import logging

from edgekit.airyop import NoiseGrid, build_sao, couple_refine, make_noise_grid, rayleigh, sao_eigs
from edgekit.ensembles import (
    EdgeSample,
    HermiteSpec,
    LaguerreSpec,
    edge_sample,
    hermite_edge_scale,
    laguerre_edge_scale,
    sample_hermite,
    sample_laguerre,
)
from edgekit.exceptions import (
    ConvergenceError,
    EdgekitError,
    ExperimentError,
    InvalidParameterError,
    OutOfSupportError,
    PainleveBlowupError,
    TruncationWarning,
    UndecidedPathError,
)
from edgekit.harness import (
    HermiteExperiment,
    LaguerreExperiment,
    PainleveExperiment,
    RiccatiCdfExperiment,
    RunManifest,
    SaoExperiment,
    TailExperiment,
    compare,
    parse_config,
    plot_output,
    run_experiment,
)
from edgekit.painleve import (
    PainleveSolution,
    airy_ai,
    airy_ai_prime,
    get_reference_solution,
    ode_residual,
    reference_survival,
    solve_hastings_mcleod,
    tw_density,
    tw_moments,
    tw_reference,
)
from edgekit.randkit import RngStream, make_stream, sample_chi, sample_gamma, sample_gaussian
from edgekit.riccati import (
    ExplosionRecord,
    RiccatiConfig,
    count_explosions,
    estimate_cdf,
    sample_lambda0,
    sample_lambda_k,
    simulate_path,
    tail_probability,
)
from edgekit.stats import (
    CdfEstimate,
    TailEstimate,
    binomial_ci,
    fit_tail_exponent,
    ks_distance,
)
from edgekit.tridiag import (
    TridiagSym,
    eigen_extreme,
    eigenvector,
    riccati_count_discrete,
    sturm_count,
)

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    # Random streams
    "RngStream",
    "make_stream",
    "sample_gaussian",
    "sample_gamma",
    "sample_chi",
    # Tridiagonal solver
    "TridiagSym",
    "sturm_count",
    "riccati_count_discrete",
    "eigen_extreme",
    "eigenvector",
    # Ensembles
    "HermiteSpec",
    "LaguerreSpec",
    "EdgeSample",
    "sample_hermite",
    "sample_laguerre",
    "hermite_edge_scale",
    "laguerre_edge_scale",
    "edge_sample",
    # Stochastic Airy operator
    "NoiseGrid",
    "make_noise_grid",
    "build_sao",
    "sao_eigs",
    "rayleigh",
    "couple_refine",
    # Riccati diffusion
    "RiccatiConfig",
    "ExplosionRecord",
    "simulate_path",
    "count_explosions",
    "sample_lambda0",
    "sample_lambda_k",
    "estimate_cdf",
    "tail_probability",
    # Painleve II reference
    "PainleveSolution",
    "airy_ai",
    "airy_ai_prime",
    "solve_hastings_mcleod",
    "ode_residual",
    "tw_reference",
    "reference_survival",
    "tw_density",
    "tw_moments",
    "get_reference_solution",
    # Statistics
    "CdfEstimate",
    "TailEstimate",
    "ks_distance",
    "fit_tail_exponent",
    "binomial_ci",
    # Experiments
    "HermiteExperiment",
    "LaguerreExperiment",
    "SaoExperiment",
    "RiccatiCdfExperiment",
    "PainleveExperiment",
    "TailExperiment",
    "RunManifest",
    "parse_config",
    "run_experiment",
    "compare",
    "plot_output",
    # Exceptions
    "EdgekitError",
    "InvalidParameterError",
    "OutOfSupportError",
    "ConvergenceError",
    "UndecidedPathError",
    "PainleveBlowupError",
    "ExperimentError",
    "TruncationWarning",
]
