"""Numerical toolkit for pre- and post-selected quantum measurement models.

Finite-dimensional states and Hermitian observables, a Gaussian-pointer
coupling model with exact readout densities, projective and weakly coupled
measurements (including post-selected weak values), ensemble-averaged
operators with their 1/sqrt(N) residuals, and a qubit-record model of how a
measurement outcome stays reconstructible after part of its environment is
collapsed. Everything is deterministic under a seeded generator; the
`tsvf-sim` command-line tool runs the bundled experiments.
"""

from .errors import (
    ConfigError,
    DimensionError,
    InvariantError,
    NearOrthogonalPrePost,
    NoAcceptedTrials,
    NoConsistentHistory,
    NotInStrongRegime,
    OrthogonalCollapseForbidden,
    PostSelectionImpossible,
    TooLargeForOracle,
)
from .hilbert import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DensityMatrix,
    EigenBranch,
    HermitianOperator,
    StateVector,
    basis_state,
    eig_hermitian,
    identity,
    inner,
    partial_trace,
    projector,
    random_hermitian,
    random_state,
    tensor,
)
from .pointer import (
    GaussianPointer,
    JointPointerState,
    PointerBranch,
    ReadoutDensity,
    classify_strong,
    couple,
    readout_density,
    sample_reading,
)
from .measurement import (
    MeasurementRecord,
    TwoState,
    WeakEstimate,
    post_select,
    strong_measure,
    weak_estimate,
    weak_trial,
    weak_value,
)
from .ensemble import (
    Decomposition,
    EnsembleSpec,
    FluctuationResult,
    average_operator_residual,
    average_spin_commutator,
    brute_force_average,
    brute_force_spin_commutator,
    commute_on_state,
    decompose,
    deterministic_basis,
    fluctuation_robustness,
    is_deterministic,
)
from .twotime import (
    BranchState,
    CollapsedEnvironment,
    FinalBoundary,
    RobustnessModel,
    brute_force_ratio,
    classical_threshold,
    collapse_environment,
    core_decay,
    env_overlap,
    forward_chain,
    full_state,
    is_classically_robust,
    log_robustness_ratio,
    record_factor_i,
    record_factor_ii,
    robustness_ratio,
    sample_final_boundary,
    select_by_final,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DimensionError",
    "InvariantError",
    "NearOrthogonalPrePost",
    "NoAcceptedTrials",
    "NoConsistentHistory",
    "NotInStrongRegime",
    "OrthogonalCollapseForbidden",
    "PostSelectionImpossible",
    "TooLargeForOracle",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "DensityMatrix",
    "EigenBranch",
    "HermitianOperator",
    "StateVector",
    "basis_state",
    "eig_hermitian",
    "identity",
    "inner",
    "partial_trace",
    "projector",
    "random_hermitian",
    "random_state",
    "tensor",
    "GaussianPointer",
    "JointPointerState",
    "PointerBranch",
    "ReadoutDensity",
    "classify_strong",
    "couple",
    "readout_density",
    "sample_reading",
    "MeasurementRecord",
    "TwoState",
    "WeakEstimate",
    "post_select",
    "strong_measure",
    "weak_estimate",
    "weak_trial",
    "weak_value",
    "Decomposition",
    "EnsembleSpec",
    "FluctuationResult",
    "average_operator_residual",
    "average_spin_commutator",
    "brute_force_average",
    "brute_force_spin_commutator",
    "commute_on_state",
    "decompose",
    "deterministic_basis",
    "fluctuation_robustness",
    "is_deterministic",
    "BranchState",
    "CollapsedEnvironment",
    "FinalBoundary",
    "RobustnessModel",
    "brute_force_ratio",
    "classical_threshold",
    "collapse_environment",
    "core_decay",
    "env_overlap",
    "forward_chain",
    "full_state",
    "is_classically_robust",
    "log_robustness_ratio",
    "record_factor_i",
    "record_factor_ii",
    "robustness_ratio",
    "sample_final_boundary",
    "select_by_final",
    "__version__",
]
