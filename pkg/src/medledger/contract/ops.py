"""Contract operations: guarded reads and writes over :class:`ContractState`.

Every handler takes the transaction signer as ``caller`` and follows a
strict validate-then-mutate discipline, so a rejected call leaves the
state untouched. Guard checks run in the order the on-chain functions
declare them; the first failing guard decides the error.

``OPS`` is the dispatch catalog the ledger and gateway use: argument
schemas, whether an operation moves token value, and whether it is a
pure read.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from ..errors import (
    AlreadyRegistered,
    AlreadySet,
    HospitalNotRegistered,
    InsufficientFunds,
    InvalidArgument,
    InvalidRecordId,
    NotACustomer,
    NotAdministrator,
    NotAllowed,
    NotInsured,
    NotRegistered,
    RecordDoesNotExist,
    RequestNotRaised,
    UnknownOperation,
    ValueOverflow,
)
from ..keys import is_account_id
from ..store import is_content_hash
from . import guards
from .state import (
    MAX_BALANCE,
    ContractState,
    DoctorProfile,
    InsuranceLink,
    MedicalRecord,
    PatientProfile,
    PharmacyGrant,
    Role,
)


def _require_admin(state: ContractState, caller: str) -> None:
    if not state.is_administrator(caller):
        raise NotAdministrator(caller)


def _transfer(state: ContractState, sender: str, beneficiary: str, value: int) -> None:
    if state.balance(sender) < value:
        raise InsufficientFunds()
    if state.balance(beneficiary) + value > MAX_BALANCE:
        raise ValueOverflow()
    if value == 0 or sender == beneficiary:
        return
    state.balances[sender] = state.balance(sender) - value
    state.balances[beneficiary] = state.balance(beneficiary) + value
    if state.balances[sender] == 0:
        del state.balances[sender]


# -- registration (administrator writes) --------------------------------------

def register_patient(state: ContractState, caller: str, patient: str, age: int, gender: str):
    _require_admin(state, caller)
    if not guards.checkp(state, patient):
        raise AlreadyRegistered(patient)
    profile = state.patients.get(patient)
    if profile is None:
        state.patients[patient] = PatientProfile(age=age, gender=gender)
    else:
        # History survives removal; re-registration refreshes demographics
        # but the record counter never resets.
        profile.age = age
        profile.gender = gender
    state.roles[patient] = Role.PATIENT


def register_doctor(
    state: ContractState, caller: str, doctor: str, name: str, hospital: str, spec: str
):
    _require_admin(state, caller)
    if not guards.checkd(state, doctor):
        raise AlreadyRegistered(doctor)
    if not guards.hospitalexists(state, hospital):
        raise HospitalNotRegistered(hospital)
    state.doctors[doctor] = DoctorProfile(name=name, hospital=hospital, specialization=spec)
    state.roles[doctor] = Role.DOCTOR


def register_hospital(state: ContractState, caller: str, hospital: str):
    _require_admin(state, caller)
    if not guards.hospitalreg(state, hospital):
        raise AlreadyRegistered(hospital)
    state.roles[hospital] = Role.HOSPITAL


def register_insurer(state: ContractState, caller: str, insurer: str):
    _require_admin(state, caller)
    if not guards.icompreg(state, insurer):
        raise AlreadyRegistered(insurer)
    state.roles[insurer] = Role.INSURER


def register_pharmacy(state: ContractState, caller: str, pharmacy: str):
    _require_admin(state, caller)
    if not guards.phcompreg(state, pharmacy):
        raise AlreadyRegistered(pharmacy)
    state.roles[pharmacy] = Role.PHARMACY


def remove_stakeholder(state: ContractState, caller: str, target: str):
    _require_admin(state, caller)
    if target not in state.roles:
        raise NotRegistered(target)
    role = state.roles.pop(target)
    # Records stay (append-only history) but every live permission involving
    # the removed account is revoked so no guard passes for it afterwards.
    for grant in state.grants.get(target, {}).values():
        grant.allowed = False
    for link in state.links.get(target, {}).values():
        link.is_customer = False
        link.flag_raised = False
    if role is Role.PHARMACY:
        for by_ph in state.grants.values():
            if target in by_ph:
                by_ph[target].allowed = False
    if role is Role.INSURER:
        for by_ins in state.links.values():
            if target in by_ins:
                by_ins[target].is_customer = False
                by_ins[target].flag_raised = False


# -- records and prescriptions -------------------------------------------------

def add_record(
    state: ContractState, caller: str, patient: str, doctor: str, admission: int, discharge: int
) -> int:
    if not guards.hospitalexists(state, caller):
        raise NotRegistered("hospital")
    if not guards.checkpe(state, patient):
        raise NotRegistered("patient")
    if not guards.checkde(state, doctor):
        raise NotRegistered("doctor")
    profile = state.patients[patient]
    profile.record_count += 1
    state.records.setdefault(patient, {})[profile.record_count] = MedicalRecord(
        hospital=caller, doctor=doctor, admission=admission, discharge=discharge
    )
    return profile.record_count


def add_prescription(state: ContractState, caller: str, patient: str, prescription: str):
    if not guards.checkde(state, caller):
        raise NotRegistered("doctor")
    if not guards.recordexist(state, patient, caller):
        raise RecordDoesNotExist()
    record = state.records[patient][state.record_count(patient)]
    if record.prescription is not None:
        raise AlreadySet("prescription")
    record.prescription = prescription


def get_record(state: ContractState, caller: str, record_id: int) -> dict:
    if not guards.checkpe(state, caller):
        raise NotRegistered("patient")
    if not guards.recexist(state, caller, record_id):
        raise InvalidRecordId(str(record_id))
    record = state.record_slot(caller, record_id)
    return {
        "record_id": record_id,
        "doctor": record.doctor,
        "admission": record.admission,
        "discharge": record.discharge,
        "prescription": record.prescription or "",
        "bill": record.bill or "",
    }


def get_record_count(state: ContractState, caller: str) -> int:
    if not guards.checkpe(state, caller):
        raise NotRegistered("patient")
    return state.record_count(caller)


def trigger_payment(state: ContractState, caller: str, beneficiary: str, value: int):
    # Deliberately role-unguarded: any funded account may pay any other.
    _transfer(state, caller, beneficiary, value)


def allow_pharmacy(state: ContractState, caller: str, pharmacy: str, record_id: int):
    if not guards.recexist(state, caller, record_id):
        raise InvalidRecordId(str(record_id))
    if not guards.phcompexists(state, pharmacy):
        raise NotRegistered("pharmacy")
    # A repeated call overwrites the prior grant: last write wins.
    state.grants.setdefault(caller, {})[pharmacy] = PharmacyGrant(
        record_id=record_id, allowed=True
    )


def allow_insurer(state: ContractState, caller: str, insurer: str, record_id: int):
    if not guards.allowins(state, caller):
        raise NotInsured(caller)
    if not guards.icustomer(state, insurer, caller):
        raise NotACustomer()
    if not guards.recexist(state, caller, record_id):
        raise InvalidRecordId(str(record_id))
    link = state.links.setdefault(caller, {}).setdefault(insurer, InsuranceLink())
    link.claimed_record_id = record_id
    link.flag_raised = True


def get_doctor(state: ContractState, caller: str, doctor: str) -> dict:
    if not guards.checkde(state, doctor):
        raise NotRegistered("doctor")
    profile = state.doctors[doctor]
    return {
        "name": profile.name,
        "hospital": profile.hospital,
        "spec": profile.specialization,
    }


# -- doctor views ---------------------------------------------------------------

def doctor_get_record(state: ContractState, caller: str, patient: str, record_id: int) -> str:
    if not guards.checkde(state, caller):
        raise NotRegistered("doctor")
    if not guards.checkpe(state, patient):
        raise NotRegistered("patient")
    if not guards.recexist(state, patient, record_id):
        raise InvalidRecordId(str(record_id))
    return state.record_slot(patient, record_id).prescription or ""


def doctor_get_patient(state: ContractState, caller: str, patient: str) -> dict:
    if not guards.checkde(state, caller):
        raise NotRegistered("doctor")
    if not guards.checkpe(state, patient):
        raise NotRegistered("patient")
    profile = state.patients[patient]
    return {"age": profile.age, "gender": profile.gender}


def doctor_get_record_count(state: ContractState, caller: str, patient: str) -> int:
    if not guards.checkde(state, caller):
        raise NotRegistered("doctor")
    if not guards.checkpe(state, patient):
        raise NotRegistered("patient")
    return state.record_count(patient)


# -- insurance ------------------------------------------------------------------

def add_customer(state: ContractState, caller: str, patient: str):
    if not guards.icompexists(state, caller):
        raise NotRegistered("insurer")
    link = state.links.setdefault(patient, {}).setdefault(caller, InsuranceLink())
    link.is_customer = True


def remove_customer(state: ContractState, caller: str, patient: str):
    if not guards.icompexists(state, caller):
        raise NotRegistered("insurer")
    if not guards.icustomer(state, caller, patient):
        raise NotACustomer()
    link = state.links.setdefault(patient, {}).setdefault(caller, InsuranceLink())
    link.is_customer = False


def insurer_get_record(state: ContractState, caller: str, patient: str) -> dict:
    if not guards.payrequire(state, caller, patient):
        raise RequestNotRaised()
    record = state.record_slot(patient, state.link_for(patient, caller).claimed_record_id)
    return {"prescription": record.prescription or "", "bill": record.bill or ""}


def insurance_payment(state: ContractState, caller: str, patient: str, value: int):
    if not guards.payrequire(state, caller, patient):
        raise RequestNotRaised()
    _transfer(state, caller, patient, value)
    state.links[patient][caller].flag_raised = False


# -- pharmacy -------------------------------------------------------------------

def pharmacy_get_record(state: ContractState, caller: str, patient: str) -> str:
    if not guards.isall(state, patient, caller):
        raise NotAllowed()
    grant = state.grant_for(patient, caller)
    return state.record_slot(patient, grant.record_id).prescription or ""


def set_bill(state: ContractState, caller: str, patient: str, bill: str):
    if not guards.isall(state, patient, caller):
        raise NotAllowed()
    grant = state.grants[patient][caller]
    slot = state.record_slot(patient, grant.record_id)
    if slot.bill is not None:
        raise AlreadySet("bill")
    # Permissive slot 0 materializes on first write, like raw map storage.
    record = state.records.setdefault(patient, {}).setdefault(grant.record_id, MedicalRecord())
    record.bill = bill
    grant.allowed = False


# -- dispatch catalog -------------------------------------------------------------

ARG_ACCOUNT = "account"
ARG_UINT = "uint"
ARG_STR = "str"
ARG_HASH = "hash"


@dataclass(frozen=True)
class OpSpec:
    handler: Callable[..., Any]
    params: tuple[tuple[str, str], ...]
    read_only: bool = False
    accepts_value: bool = False


OPS: dict[str, OpSpec] = {
    "register_patient": OpSpec(
        register_patient,
        (("patient", ARG_ACCOUNT), ("age", ARG_UINT), ("gender", ARG_STR)),
    ),
    "register_doctor": OpSpec(
        register_doctor,
        (
            ("doctor", ARG_ACCOUNT),
            ("name", ARG_STR),
            ("hospital", ARG_ACCOUNT),
            ("spec", ARG_STR),
        ),
    ),
    "register_hospital": OpSpec(register_hospital, (("hospital", ARG_ACCOUNT),)),
    "register_insurer": OpSpec(register_insurer, (("insurer", ARG_ACCOUNT),)),
    "register_pharmacy": OpSpec(register_pharmacy, (("pharmacy", ARG_ACCOUNT),)),
    "remove_stakeholder": OpSpec(remove_stakeholder, (("target", ARG_ACCOUNT),)),
    "add_record": OpSpec(
        add_record,
        (
            ("patient", ARG_ACCOUNT),
            ("doctor", ARG_ACCOUNT),
            ("admission", ARG_UINT),
            ("discharge", ARG_UINT),
        ),
    ),
    "add_prescription": OpSpec(
        add_prescription, (("patient", ARG_ACCOUNT), ("prescription", ARG_HASH))
    ),
    "get_record": OpSpec(get_record, (("record_id", ARG_UINT),), read_only=True),
    "get_record_count": OpSpec(get_record_count, (), read_only=True),
    "trigger_payment": OpSpec(
        trigger_payment, (("beneficiary", ARG_ACCOUNT),), accepts_value=True
    ),
    "allow_pharmacy": OpSpec(
        allow_pharmacy, (("pharmacy", ARG_ACCOUNT), ("record_id", ARG_UINT))
    ),
    "allow_insurer": OpSpec(
        allow_insurer, (("insurer", ARG_ACCOUNT), ("record_id", ARG_UINT))
    ),
    "get_doctor": OpSpec(get_doctor, (("doctor", ARG_ACCOUNT),), read_only=True),
    "doctor_get_record": OpSpec(
        doctor_get_record, (("patient", ARG_ACCOUNT), ("record_id", ARG_UINT)), read_only=True
    ),
    "doctor_get_patient": OpSpec(
        doctor_get_patient, (("patient", ARG_ACCOUNT),), read_only=True
    ),
    "doctor_get_record_count": OpSpec(
        doctor_get_record_count, (("patient", ARG_ACCOUNT),), read_only=True
    ),
    "add_customer": OpSpec(add_customer, (("patient", ARG_ACCOUNT),)),
    "remove_customer": OpSpec(remove_customer, (("patient", ARG_ACCOUNT),)),
    "insurer_get_record": OpSpec(
        insurer_get_record, (("patient", ARG_ACCOUNT),), read_only=True
    ),
    "insurance_payment": OpSpec(
        insurance_payment, (("patient", ARG_ACCOUNT),), accepts_value=True
    ),
    "pharmacy_get_record": OpSpec(
        pharmacy_get_record, (("patient", ARG_ACCOUNT),), read_only=True
    ),
    "set_bill": OpSpec(set_bill, (("patient", ARG_ACCOUNT), ("bill", ARG_HASH))),
}


def validate_args(op: str, args: dict) -> dict:
    """Check an argument mapping against the operation schema.

    Returns the validated arguments in schema order. Raises
    :class:`UnknownOperation` or :class:`InvalidArgument`.
    """
    spec = OPS.get(op)
    if spec is None:
        raise UnknownOperation(op)
    if not isinstance(args, dict):
        raise InvalidArgument("args must be an object")
    expected = {name for name, _ in spec.params}
    extra = set(args) - expected
    if extra:
        raise InvalidArgument(f"unexpected argument(s): {', '.join(sorted(extra))}")
    clean: dict[str, Any] = {}
    for name, kind in spec.params:
        if name not in args:
            raise InvalidArgument(f"missing argument: {name}")
        value = args[name]
        if kind == ARG_ACCOUNT:
            if not is_account_id(value):
                raise InvalidArgument(f"{name}: not an account id")
        elif kind == ARG_UINT:
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise InvalidArgument(f"{name}: not an unsigned integer")
            if value >= 1 << 64:
                raise InvalidArgument(f"{name}: exceeds 64 bits")
        elif kind == ARG_STR:
            if not isinstance(value, str) or len(value) > 256:
                raise InvalidArgument(f"{name}: not a short string")
        elif kind == ARG_HASH:
            if not is_content_hash(value):
                raise InvalidArgument(f"{name}: not a content hash")
        clean[name] = value
    return clean


def apply_operation(state: ContractState, caller: str, op: str, args: dict, value: int = 0):
    """Validate and run one operation against mutable state.

    Guard rejections propagate as :class:`GuardRejection` subclasses with
    the state unchanged; the return value is the operation result (None
    for plain acknowledgements).
    """
    spec = OPS.get(op)
    if spec is None:
        raise UnknownOperation(op)
    clean = validate_args(op, args)
    if spec.accepts_value:
        return spec.handler(state, caller, value=value, **clean)
    if value:
        raise InvalidArgument(f"{op} does not accept token value")
    return spec.handler(state, caller, **clean)
