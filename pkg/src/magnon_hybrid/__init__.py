"""Multimode cavity-magnon modeling toolkit.

Builds lumped mode networks for multi-post reentrant cavities, assembles the
corresponding quadratic photon-magnon Hamiltonians with all counter-rotating
terms, computes exact polariton branches versus magnetic field, synthesises
and analyses transmission maps, fits model parameters to avoided-crossing
data and classifies strong/ultrastrong/superstrong coupling regimes.
"""

__version__ = "0.1.0"

from .errors import (
    AllUnstableError,
    ConfigError,
    DataError,
    DegenerateFitError,
    InstabilityError,
    InvalidArgumentError,
    MagnonHybridError,
    NoPeakError,
    NonPhysicalError,
    ResourceLimitError,
)
from .fitting import (
    FitProblem,
    FitResult,
    PairRegime,
    RegimeReport,
    classify,
    fit,
    photon_mode_spacing,
    residual_profile,
)
from .hamiltonian import (
    BranchSet,
    HybridModel,
    PolaritonSet,
    build_n4,
    build_n8,
    dynamical_matrix,
    eigen_full,
    eigen_rwa,
    fock_oracle,
    min_gap,
    sweep,
    two_mode_exact,
)
from .magnon import (
    GYRO_DEFAULT_GHZ_PER_T,
    MagnonMode,
    SpinEnsemble,
    estimate_coupling,
    estimate_filling,
    magnon_frequency,
)
from .network import (
    CavityMode,
    CavityNetwork,
    ModeSpectrum,
    double_chain_network,
    pattern_label,
    perturb_symmetry,
    ring_network,
    solve_modes,
    wgm_order,
)
from .spectra import (
    LorentzianLine,
    RidgePoints,
    SpectralMap,
    extract_ridges,
    fit_line,
    load_ridge_csv,
    lorentzian_value,
    synth_map,
)

__all__ = [
    "AllUnstableError",
    "BranchSet",
    "CavityMode",
    "CavityNetwork",
    "ConfigError",
    "DataError",
    "DegenerateFitError",
    "FitProblem",
    "FitResult",
    "GYRO_DEFAULT_GHZ_PER_T",
    "HybridModel",
    "InstabilityError",
    "InvalidArgumentError",
    "LorentzianLine",
    "MagnonHybridError",
    "MagnonMode",
    "ModeSpectrum",
    "NoPeakError",
    "NonPhysicalError",
    "PairRegime",
    "PolaritonSet",
    "RegimeReport",
    "ResourceLimitError",
    "RidgePoints",
    "SpectralMap",
    "SpinEnsemble",
    "build_n4",
    "build_n8",
    "classify",
    "double_chain_network",
    "dynamical_matrix",
    "eigen_full",
    "eigen_rwa",
    "estimate_coupling",
    "estimate_filling",
    "extract_ridges",
    "fit",
    "fit_line",
    "fock_oracle",
    "load_ridge_csv",
    "lorentzian_value",
    "magnon_frequency",
    "min_gap",
    "pattern_label",
    "perturb_symmetry",
    "photon_mode_spacing",
    "residual_profile",
    "ring_network",
    "solve_modes",
    "sweep",
    "synth_map",
    "two_mode_exact",
    "wgm_order",
]
