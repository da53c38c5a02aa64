"""kaonlab: entangled neutral-kaon probabilities, Bell tests and decoherence fits."""

from .constants import PhysicalConstants, default_constants, load_config
from .states import QuasiSpinState, inner_product, named_state
from .evolution import (
    ComplexEigenvalue,
    EigenLabel,
    JointOutcomeTable,
    asymmetry_qm,
    joint_like_probability,
    joint_outcome_table,
    joint_unlike_probability,
    omega_overlap,
    pair_probabilities,
    survival_amplitude,
)
from .bell import (
    ChshSetting,
    MaximizationReport,
    expectation_qm,
    maximize_s,
    s_generalized,
    s_kaon_strangeness,
    s_photon,
)
from .decoherence import (
    AsymmetryPoint,
    Basis,
    FitMode,
    FitResult,
    bundled_cplear_points,
    fit_zeta,
    modified_asymmetry,
    modified_like_probability,
    modified_unlike_probability,
    read_asymmetry_csv,
)
from .wigner import (
    WignerEvaluation,
    ZetaBound,
    h_correction,
    violation_threshold,
    wigner_equal_times,
    wigner_t0,
    wigner_two_times,
    zeta_lower_bound,
)

__all__ = [
    "AsymmetryPoint",
    "Basis",
    "FitMode",
    "FitResult",
    "WignerEvaluation",
    "ZetaBound",
    "bundled_cplear_points",
    "fit_zeta",
    "h_correction",
    "modified_asymmetry",
    "modified_like_probability",
    "modified_unlike_probability",
    "read_asymmetry_csv",
    "violation_threshold",
    "wigner_equal_times",
    "wigner_t0",
    "wigner_two_times",
    "zeta_lower_bound",
    "PhysicalConstants",
    "default_constants",
    "load_config",
    "QuasiSpinState",
    "inner_product",
    "named_state",
    "ComplexEigenvalue",
    "EigenLabel",
    "JointOutcomeTable",
    "asymmetry_qm",
    "joint_like_probability",
    "joint_outcome_table",
    "joint_unlike_probability",
    "omega_overlap",
    "pair_probabilities",
    "survival_amplitude",
    "ChshSetting",
    "MaximizationReport",
    "expectation_qm",
    "maximize_s",
    "s_generalized",
    "s_kaon_strangeness",
    "s_photon",
]

__version__ = "0.1.0"
