"""Simulator and security-analysis toolkit for N-partner GHZ-state secure direct communication."""

from .analysis import (
    SecurityReport,
    SweepRow,
    basis_detection_rates,
    detection_bound_audit,
    detection_probability_exact,
    entropy_bound,
    entropy_bound_check,
    eve_accuracy,
    fidelity_deficit,
    ghz_diagonal_weights,
    holevo_bound,
    monte_carlo_detection,
    security_report,
    sweep,
    write_sweep_csv,
)
from .attacks import (
    AttackModel,
    Depolarize,
    GhzPauli,
    InterceptResend,
    KrausCustom,
    NoAttack,
    WSubstitution,
    apply_attack,
    apply_attack_sampled,
    attack_channel,
    attack_from_dict,
    attack_to_dict,
    eve_inference,
    parse_attack,
    parse_attack_family,
)
from .protocol import (
    MessageKind,
    Mode,
    PublicMessage,
    Round,
    SessionConfig,
    Transcript,
    decode_bit,
    encode_announcement,
    run_control_round,
    run_message_round,
    run_session,
)
from .quantum import (
    Basis,
    DensityOperator,
    MeasurementRecord,
    PureState,
    apply_channel,
    apply_unitary,
    fidelity_to_target,
    ghz_basis,
    ghz_basis_state,
    ghz_pairs,
    ghz_state,
    ket_string,
    measure_all,
    measure_all_density,
    von_neumann_entropy,
    w_state,
)

__version__ = "0.1.0"

__all__ = [
    "AttackModel",
    "Basis",
    "DensityOperator",
    "Depolarize",
    "GhzPauli",
    "InterceptResend",
    "KrausCustom",
    "MeasurementRecord",
    "MessageKind",
    "Mode",
    "NoAttack",
    "PublicMessage",
    "PureState",
    "Round",
    "SecurityReport",
    "SessionConfig",
    "SweepRow",
    "Transcript",
    "WSubstitution",
    "apply_attack",
    "apply_attack_sampled",
    "apply_channel",
    "apply_unitary",
    "attack_channel",
    "attack_from_dict",
    "attack_to_dict",
    "basis_detection_rates",
    "decode_bit",
    "detection_bound_audit",
    "detection_probability_exact",
    "encode_announcement",
    "entropy_bound",
    "entropy_bound_check",
    "eve_accuracy",
    "eve_inference",
    "fidelity_deficit",
    "fidelity_to_target",
    "ghz_basis",
    "ghz_basis_state",
    "ghz_diagonal_weights",
    "ghz_pairs",
    "ghz_state",
    "holevo_bound",
    "ket_string",
    "measure_all",
    "measure_all_density",
    "monte_carlo_detection",
    "parse_attack",
    "parse_attack_family",
    "run_control_round",
    "run_message_round",
    "run_session",
    "security_report",
    "sweep",
    "von_neumann_entropy",
    "w_state",
    "write_sweep_csv",
    "__version__",
]
