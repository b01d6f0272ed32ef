"""Healthcare contract: state, guards, and guarded operations."""

from .guards import GUARD_MESSAGES, GUARD_NAMES, evaluate_guard
from .ops import OPS, apply_operation, validate_args
from .state import (
    MAX_BALANCE,
    TOKEN,
    ContractState,
    DoctorProfile,
    InsuranceLink,
    MedicalRecord,
    PatientProfile,
    PharmacyGrant,
    Role,
)

__all__ = [
    "GUARD_MESSAGES",
    "GUARD_NAMES",
    "MAX_BALANCE",
    "TOKEN",
    "OPS",
    "ContractState",
    "DoctorProfile",
    "InsuranceLink",
    "MedicalRecord",
    "PatientProfile",
    "PharmacyGrant",
    "Role",
    "apply_operation",
    "evaluate_guard",
    "validate_args",
]
