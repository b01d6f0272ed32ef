"""Ledger-side healthcare state: registry, records, grants, claims, balances.

All mutation goes through the operation handlers in :mod:`medledger.contract.ops`;
this module only defines the containers, the canonical digest, and small
read helpers shared by guards and operations.

Records are 1-indexed: the hospital increments the patient's counter first
and then writes the slot it now points at, so slot 0 is never written in
strict mode. Slots are kept in a per-patient mapping rather than a list so
the permissive compatibility mode can materialize slot 0 the way a raw
storage map would.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum

from .. import codec
from ..keys import ZERO_ACCOUNT

MAX_BALANCE = (1 << 128) - 1
TOKEN = 10**18  # base units per whole token


class Role(str, Enum):
    ADMINISTRATOR = "Administrator"
    PATIENT = "Patient"
    DOCTOR = "Doctor"
    HOSPITAL = "Hospital"
    INSURER = "Insurer"
    PHARMACY = "Pharmacy"


@dataclass
class PatientProfile:
    age: int = 0
    gender: str = ""
    record_count: int = 0


@dataclass
class DoctorProfile:
    name: str = ""
    hospital: str = ZERO_ACCOUNT
    specialization: str = ""


@dataclass
class MedicalRecord:
    hospital: str = ZERO_ACCOUNT
    doctor: str = ZERO_ACCOUNT
    admission: int = 0
    discharge: int = 0
    prescription: str | None = None
    bill: str | None = None


@dataclass
class PharmacyGrant:
    record_id: int = 0
    allowed: bool = False


@dataclass
class InsuranceLink:
    is_customer: bool = False
    flag_raised: bool = False
    claimed_record_id: int = 0


# Read of an unwritten slot (permissive mode only) sees zeroed storage.
EMPTY_RECORD = MedicalRecord()


@dataclass
class ContractState:
    """Full committed contract state for one chain.

    ``permissive`` switches the two paper-literal guard relaxations
    (record index 0 admitted, customer check vacuous); everything else is
    identical between modes.
    """

    permissive: bool = False
    roles: dict[str, Role] = field(default_factory=dict)
    patients: dict[str, PatientProfile] = field(default_factory=dict)
    doctors: dict[str, DoctorProfile] = field(default_factory=dict)
    # patient -> record_id -> record
    records: dict[str, dict[int, MedicalRecord]] = field(default_factory=dict)
    # patient -> pharmacy -> grant
    grants: dict[str, dict[str, PharmacyGrant]] = field(default_factory=dict)
    # patient -> insurer -> link
    links: dict[str, dict[str, InsuranceLink]] = field(default_factory=dict)
    balances: dict[str, int] = field(default_factory=dict)
    nonces: dict[str, int] = field(default_factory=dict)

    # -- registry helpers --------------------------------------------------

    def role_of(self, account: str) -> Role | None:
        return self.roles.get(account)

    def is_administrator(self, account: str) -> bool:
        return self.roles.get(account) is Role.ADMINISTRATOR

    def is_patient(self, account: str) -> bool:
        return self.roles.get(account) is Role.PATIENT

    def is_doctor(self, account: str) -> bool:
        return self.roles.get(account) is Role.DOCTOR

    def is_hospital(self, account: str) -> bool:
        return self.roles.get(account) is Role.HOSPITAL

    def is_insurer(self, account: str) -> bool:
        return self.roles.get(account) is Role.INSURER

    def is_pharmacy(self, account: str) -> bool:
        return self.roles.get(account) is Role.PHARMACY

    def is_insured(self, account: str) -> bool:
        """True while at least one insurer lists the account as a customer."""
        return any(l.is_customer for l in self.links.get(account, {}).values())

    # -- record helpers ----------------------------------------------------

    def record_count(self, patient: str) -> int:
        profile = self.patients.get(patient)
        return profile.record_count if profile else 0

    def record_slot(self, patient: str, record_id: int) -> MedicalRecord:
        """Record at a slot; unwritten slots read as the zeroed record."""
        return self.records.get(patient, {}).get(record_id, EMPTY_RECORD)

    def grant_for(self, patient: str, pharmacy: str) -> PharmacyGrant:
        return self.grants.get(patient, {}).get(pharmacy, PharmacyGrant())

    def link_for(self, patient: str, insurer: str) -> InsuranceLink:
        return self.links.get(patient, {}).get(insurer, InsuranceLink())

    def balance(self, account: str) -> int:
        return self.balances.get(account, 0)

    def nonce(self, account: str) -> int:
        return self.nonces.get(account, 0)

    # -- lifecycle ---------------------------------------------------------

    def clone(self) -> "ContractState":
        return copy.deepcopy(self)

    def to_canonical(self) -> dict:
        """Plain-value tree behind the state digest.

        Keys sort lexicographically in the canonical encoding; records are
        emitted as (id, fields) pairs ordered by id so numeric order is
        preserved. Absent hashes become zero-length strings; zero balances
        and zero nonces are pruned so they are indistinguishable from
        untouched accounts.
        """
        return {
            "balances": {a: v for a, v in sorted(self.balances.items()) if v},
            "doctors": {
                a: {"hospital": d.hospital, "name": d.name, "spec": d.specialization}
                for a, d in sorted(self.doctors.items())
            },
            "grants": {
                p: {
                    ph: {"allowed": g.allowed, "record_id": g.record_id}
                    for ph, g in sorted(by_ph.items())
                }
                for p, by_ph in sorted(self.grants.items())
                if by_ph
            },
            "links": {
                p: {
                    i: {
                        "claimed_record_id": l.claimed_record_id,
                        "customer": l.is_customer,
                        "raised": l.flag_raised,
                    }
                    for i, l in sorted(by_ins.items())
                }
                for p, by_ins in sorted(self.links.items())
                if by_ins
            },
            "nonces": {a: n for a, n in sorted(self.nonces.items()) if n},
            "patients": {
                a: {"age": p.age, "gender": p.gender, "recn": p.record_count}
                for a, p in sorted(self.patients.items())
            },
            "records": {
                p: [
                    [
                        rid,
                        {
                            "admission": r.admission,
                            "bill": r.bill or "",
                            "discharge": r.discharge,
                            "doctor": r.doctor,
                            "hospital": r.hospital,
                            "prescription": r.prescription or "",
                        },
                    ]
                    for rid, r in sorted(by_id.items())
                ]
                for p, by_id in sorted(self.records.items())
                if by_id
            },
            "roles": {a: r.value for a, r in sorted(self.roles.items())},
        }

    def digest(self) -> str:
        return codec.digest(self.to_canonical())
