"""Effective logical channels of noisy syndrome-extraction rounds on small stabilizer codes."""
from .channels import (
    Channel,
    ConfusionMatrix,
    bitflip_confusion,
    decoding_operation,
    encoding_isometry,
    encoding_operation,
    encoding_unitary,
    gadget_retraction,
    noisy_recovery_map,
    recovery_map,
)
from .code import StabilizerCode, builtin_five_qubit, builtin_rep3, get_code, make_code, parse_code_file
from .errors import (
    CapacityError,
    CodeValidationError,
    DimensionError,
    DomainError,
    HypothesisError,
    LogicalNMError,
    PauliParseError,
    SearchExhaustedError,
)
from .experiments import composability_check, polarization_sequence, verify_theorem1
from .markov import spectral_summary, transition_matrix
from .pauli import PauliOperator, parse_pauli

__all__ = [
    "CapacityError",
    "Channel",
    "CodeValidationError",
    "ConfusionMatrix",
    "DimensionError",
    "DomainError",
    "HypothesisError",
    "LogicalNMError",
    "PauliOperator",
    "PauliParseError",
    "SearchExhaustedError",
    "StabilizerCode",
    "bitflip_confusion",
    "builtin_five_qubit",
    "builtin_rep3",
    "composability_check",
    "decoding_operation",
    "encoding_isometry",
    "encoding_operation",
    "encoding_unitary",
    "gadget_retraction",
    "get_code",
    "make_code",
    "noisy_recovery_map",
    "parse_code_file",
    "parse_pauli",
    "polarization_sequence",
    "recovery_map",
    "spectral_summary",
    "transition_matrix",
    "verify_theorem1",
]
