"""Polarization entanglement of cascade photon pairs under nuclear spin noise.

Quantifies how Overhauser fluctuations and the fine-structure splitting
limit the Bell-state fidelity, purity and concurrence of photon pairs from
the biexciton-exciton decay, and provides the counting-experiment
simulation and maximum-likelihood tomography used to characterize them.
"""

from .linalg import (
    HBAR_UEV_PS,
    InvalidDensityMatrixError,
    NotHermitianError,
    NotPSDError,
    eig_hermitian,
    sqrt_psd,
    tensor,
    unitary_exp,
)
from .metrics import (
    EntanglementMetrics,
    NotNormalizedError,
    concurrence,
    concurrence_pure,
    fidelity_phi_plus,
    metrics_from_rho,
    purity,
    trace_distance,
)
from .model import (
    NuclearSpecies,
    PhysicalParams,
    SimConfig,
    SpeciesParams,
    analytic_fidelity,
    apply_multipair_mixing,
    build_hamiltonian,
    coherence_loss,
    emission_phase_average,
    exciton_eigensystem,
    k_from_g2,
    monte_carlo_rho,
    overhauser_samples,
    propagate_rho,
    sigma_from_composition,
    sigma_from_t2star,
    time_averaged_rho,
    two_photon_state,
)
from .tomography import (
    BasisSetting,
    CountRecord,
    InsufficientSettingsError,
    ReconstructionResult,
    ZeroCountsError,
    correlation_visibilities,
    fidelity_from_visibilities,
    load_count_records_csv,
    mle_reconstruct,
    save_count_records_csv,
    simulate_counts,
    standard_settings,
    visibility,
)

__version__ = "0.1.0"

__all__ = [
    "HBAR_UEV_PS",
    "BasisSetting",
    "CountRecord",
    "EntanglementMetrics",
    "InsufficientSettingsError",
    "InvalidDensityMatrixError",
    "NotHermitianError",
    "NotNormalizedError",
    "NotPSDError",
    "NuclearSpecies",
    "PhysicalParams",
    "ReconstructionResult",
    "SimConfig",
    "SpeciesParams",
    "ZeroCountsError",
    "analytic_fidelity",
    "apply_multipair_mixing",
    "build_hamiltonian",
    "coherence_loss",
    "concurrence",
    "concurrence_pure",
    "correlation_visibilities",
    "eig_hermitian",
    "emission_phase_average",
    "exciton_eigensystem",
    "fidelity_from_visibilities",
    "fidelity_phi_plus",
    "k_from_g2",
    "load_count_records_csv",
    "metrics_from_rho",
    "mle_reconstruct",
    "monte_carlo_rho",
    "overhauser_samples",
    "propagate_rho",
    "purity",
    "save_count_records_csv",
    "sigma_from_composition",
    "sigma_from_t2star",
    "simulate_counts",
    "sqrt_psd",
    "standard_settings",
    "tensor",
    "time_averaged_rho",
    "trace_distance",
    "two_photon_state",
    "unitary_exp",
    "visibility",
]
