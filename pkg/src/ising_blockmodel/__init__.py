"""Ising blockmodel: exact law, free energy, sampling and partition recovery."""
from .bounds import SampleComplexityReport, kl_pair, sample_size_bounds
from .covariance import (
    CovarianceSummary,
    GapMode,
    asymptotic_gap,
    empirical_gamma,
    exact_delta_omega,
    population_gamma,
)
from .errors import BoundaryError, DomainError, ResourceError
from .experiments import ExperimentConfig, TrialRow, emit_contour, emit_phase_diagram, run_recovery_curve
from .free_energy import (
    Phase,
    curvature_constants,
    ground_states,
    hessian_at,
    ibm_free_energy,
    mean_field_solve,
)
from .magnetization import MagnetizationLaw, exact_moment, gaussian_mixture_expectation, magnetization_law
from .model import ModelParams, Partition, hamiltonian, log_density, log_partition_exact
from .recovery import (
    Method,
    RecoveryResult,
    diamond_distance,
    laplacian_certificate,
    mle_bruteforce,
    recover,
    sdp_solve,
    spectral_partition,
)
from .sampler import SampleBatch, random_balanced_partition, sample_configurations

__all__ = [name for name in dir() if not name.startswith("_")]
