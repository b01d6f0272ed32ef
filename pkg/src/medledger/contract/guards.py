"""The sixteen access guards evaluated before contract operations.

Each guard is a pure predicate over committed state. The failure message
attached to every guard is the exact string an operation reports when the
guard rejects its call.

Two guards have a relaxed, compatibility evaluation enabled by
``ContractState.permissive``:

* ``recexist`` admits record id 0 (the bound becomes ``id <= count``
  instead of ``1 <= id <= count``);
* ``icustomer`` always passes, mirroring a guard whose condition was an
  assignment rather than a comparison.
"""

from __future__ import annotations

from typing import Callable

from ..errors import UnknownGuard
from .state import ContractState

# guard name -> (message on failure, context keys consumed)
GUARD_MESSAGES: dict[str, str] = {
    "checkp": "Already Registered",
    "checkpe": "Not Registered",
    "recexist": "Not Valid",
    "allowins": "Don't Have Insurance",
    "checkd": "Already Registered",
    "checkde": "Not Registered",
    "hospitalreg": "Already Registered",
    "hospitalexists": "Not Registered",
    "recordexist": "Record Don't Exist",
    "icompreg": "Already Registered",
    "icompexists": "Not Registered",
    "icustomer": "Not a customer",
    "payrequire": "Request Not Raised",
    "phcompreg": "Already Registered",
    "phcompexists": "Not Registered",
    "isall": "Not Allowed",
}

GUARD_NAMES = tuple(GUARD_MESSAGES)


def checkp(state: ContractState, patient: str) -> bool:
    return not state.is_patient(patient)


def checkpe(state: ContractState, patient: str) -> bool:
    return state.is_patient(patient)


def recexist(state: ContractState, patient: str, record_id: int) -> bool:
    if state.permissive:
        return record_id <= state.record_count(patient)
    return 1 <= record_id <= state.record_count(patient)


def allowins(state: ContractState, patient: str) -> bool:
    return state.is_insured(patient)


def checkd(state: ContractState, doctor: str) -> bool:
    return not state.is_doctor(doctor)


def checkde(state: ContractState, doctor: str) -> bool:
    return state.is_doctor(doctor)


def hospitalreg(state: ContractState, hospital: str) -> bool:
    return not state.is_hospital(hospital)


def hospitalexists(state: ContractState, hospital: str) -> bool:
    return state.is_hospital(hospital)


def recordexist(state: ContractState, patient: str, doctor: str) -> bool:
    # The latest record slot must name this doctor; with no records the
    # zeroed slot never matches a real doctor account.
    latest = state.record_slot(patient, state.record_count(patient))
    return latest.doctor == doctor


def icompreg(state: ContractState, insurer: str) -> bool:
    return not state.is_insurer(insurer)


def icompexists(state: ContractState, insurer: str) -> bool:
    return state.is_insurer(insurer)


def icustomer(state: ContractState, insurer: str, patient: str) -> bool:
    if state.permissive:
        return True
    return state.link_for(patient, insurer).is_customer


def payrequire(state: ContractState, insurer: str, patient: str) -> bool:
    return state.link_for(patient, insurer).flag_raised


def phcompreg(state: ContractState, pharmacy: str) -> bool:
    return not state.is_pharmacy(pharmacy)


def phcompexists(state: ContractState, pharmacy: str) -> bool:
    return state.is_pharmacy(pharmacy)


def isall(state: ContractState, patient: str, pharmacy: str) -> bool:
    return state.grant_for(patient, pharmacy).allowed


_GUARD_ARGS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "checkp": (checkp, ("patient",)),
    "checkpe": (checkpe, ("patient",)),
    "recexist": (recexist, ("patient", "record_id")),
    "allowins": (allowins, ("patient",)),
    "checkd": (checkd, ("doctor",)),
    "checkde": (checkde, ("doctor",)),
    "hospitalreg": (hospitalreg, ("hospital",)),
    "hospitalexists": (hospitalexists, ("hospital",)),
    "recordexist": (recordexist, ("patient", "doctor")),
    "icompreg": (icompreg, ("insurer",)),
    "icompexists": (icompexists, ("insurer",)),
    "icustomer": (icustomer, ("insurer", "patient")),
    "payrequire": (payrequire, ("insurer", "patient")),
    "phcompreg": (phcompreg, ("pharmacy",)),
    "phcompexists": (phcompexists, ("pharmacy",)),
    "isall": (isall, ("patient", "pharmacy")),
}


def evaluate_guard(state: ContractState, guard: str, context: dict) -> bool:
    """Evaluate one named guard against a context of accounts/ids.

    Pure: never mutates state. Raises :class:`UnknownGuard` for a name
    outside the catalog and ``ValueError`` when the context misses a key
    the guard inspects.
    """
    try:
        fn, keys = _GUARD_ARGS[guard]
    except KeyError:
        raise UnknownGuard(guard) from None
    try:
        args = [context[k] for k in keys]
    except KeyError as exc:
        raise ValueError(f"guard {guard!r} needs context key {exc.args[0]!r}") from None
    return bool(fn(state, *args))
