"""Independent model of the contract rules for differential testing.

Deliberately written with a different shape than the implementation: flat
tuple-keyed dicts, no guard framework, no dataclasses. It models outcomes
("ok" or an error code) and the observable state the properties care about
(balances, record tuples, grant/claim flags, counters). Property tests run
the same call sequence through this model and through the real state
machine and require identical outcomes and observations.

Only stdlib here; never import the package under test.
"""

MAX_BALANCE = (1 << 128) - 1


class Model:
    def __init__(self, admins=(), balances=None, permissive=False):
        self.permissive = permissive
        self.role = {a: "administrator" for a in admins}
        self.age = {}
        self.gender = {}
        self.recn = {}            # patient -> count
        self.records = {}         # (patient, n) -> [hospital, doctor, adm, dis, pres, bill]
        self.docname = {}
        self.dochosp = {}
        self.docspec = {}
        self.grant = {}           # (patient, pharmacy) -> [record_id, allowed]
        self.customer = {}        # (patient, insurer) -> bool
        self.claim = {}           # (patient, insurer) -> [record_id, raised]
        self.balance = dict(balances or {})

    # -- helpers -------------------------------------------------------------

    def _insured(self, p):
        return any(v for (pp, _), v in self.customer.items() if pp == p)

    def _rec_ok(self, p, n):
        top = self.recn.get(p, 0)
        return (0 <= n <= top) if self.permissive else (1 <= n <= top)

    def total_supply(self):
        return sum(self.balance.values())

    # -- operations: each returns ("ok", result) or ("err", code) --------------

    def call(self, caller, op, args, value=0):
        fn = getattr(self, "op_" + op)
        return fn(caller, value=value, **args)

    def _admin_gate(self, caller):
        return self.role.get(caller) == "administrator"

    # Registration guards are per-kind: each checks only its own role
    # mapping, so an account may be re-registered under a different kind
    # (the single role map then reassigns the role).

    def op_register_patient(self, caller, patient, age, gender, value=0):
        if not self._admin_gate(caller):
            return "err", "NotAdministrator"
        if self.role.get(patient) == "patient":
            return "err", "AlreadyRegistered"
        self.role[patient] = "patient"
        self.age[patient] = age
        self.gender[patient] = gender
        self.recn.setdefault(patient, 0)
        return "ok", None

    def op_register_doctor(self, caller, doctor, name, hospital, spec, value=0):
        if not self._admin_gate(caller):
            return "err", "NotAdministrator"
        if self.role.get(doctor) == "doctor":
            return "err", "AlreadyRegistered"
        if self.role.get(hospital) != "hospital":
            return "err", "HospitalNotRegistered"
        self.role[doctor] = "doctor"
        self.docname[doctor] = name
        self.dochosp[doctor] = hospital
        self.docspec[doctor] = spec
        return "ok", None

    def _register_simple(self, caller, target, role):
        if not self._admin_gate(caller):
            return "err", "NotAdministrator"
        if self.role.get(target) == role:
            return "err", "AlreadyRegistered"
        self.role[target] = role
        return "ok", None

    def op_register_hospital(self, caller, hospital, value=0):
        return self._register_simple(caller, hospital, "hospital")

    def op_register_insurer(self, caller, insurer, value=0):
        return self._register_simple(caller, insurer, "insurer")

    def op_register_pharmacy(self, caller, pharmacy, value=0):
        return self._register_simple(caller, pharmacy, "pharmacy")

    def op_remove_stakeholder(self, caller, target, value=0):
        if not self._admin_gate(caller):
            return "err", "NotAdministrator"
        if self.role.get(target) is None:
            return "err", "NotRegistered"
        was = self.role.pop(target)
        for key in list(self.grant):
            if key[0] == target or (was == "pharmacy" and key[1] == target):
                self.grant[key][1] = False
        for key in list(self.customer):
            if key[0] == target or (was == "insurer" and key[1] == target):
                self.customer[key] = False
        for key in list(self.claim):
            if key[0] == target or (was == "insurer" and key[1] == target):
                self.claim[key][1] = False
        return "ok", None

    def op_add_record(self, caller, patient, doctor, admission, discharge, value=0):
        if self.role.get(caller) != "hospital":
            return "err", "NotRegistered"
        if self.role.get(patient) != "patient":
            return "err", "NotRegistered"
        if self.role.get(doctor) != "doctor":
            return "err", "NotRegistered"
        n = self.recn.get(patient, 0) + 1
        self.recn[patient] = n
        self.records[(patient, n)] = [caller, doctor, admission, discharge, None, None]
        return "ok", n

    def op_add_prescription(self, caller, patient, prescription, value=0):
        if self.role.get(caller) != "doctor":
            return "err", "NotRegistered"
        top = self.recn.get(patient, 0)
        rec = self.records.get((patient, top))
        if rec is None or rec[1] != caller:
            return "err", "RecordDoesNotExist"
        if rec[4] is not None:
            return "err", "AlreadySet"
        rec[4] = prescription
        return "ok", None

    def op_get_record(self, caller, record_id, value=0):
        if self.role.get(caller) != "patient":
            return "err", "NotRegistered"
        if not self._rec_ok(caller, record_id):
            return "err", "InvalidRecordId"
        rec = self.records.get((caller, record_id), [None, None, 0, 0, None, None])
        return "ok", {
            "record_id": record_id,
            "doctor": rec[1] or "0x" + "0" * 40,
            "admission": rec[2],
            "discharge": rec[3],
            "prescription": rec[4] or "",
            "bill": rec[5] or "",
        }

    def op_get_record_count(self, caller, value=0):
        if self.role.get(caller) != "patient":
            return "err", "NotRegistered"
        return "ok", self.recn.get(caller, 0)

    def _pay(self, src, dst, value):
        if self.balance.get(src, 0) < value:
            return "err", "InsufficientFunds"
        if self.balance.get(dst, 0) + value > MAX_BALANCE:
            return "err", "ValueOverflow"
        if value and src != dst:
            self.balance[src] = self.balance.get(src, 0) - value
            self.balance[dst] = self.balance.get(dst, 0) + value
            if self.balance[src] == 0:
                del self.balance[src]
        return "ok", None

    def op_trigger_payment(self, caller, beneficiary, value=0):
        return self._pay(caller, beneficiary, value)

    def op_allow_pharmacy(self, caller, pharmacy, record_id, value=0):
        if not self._rec_ok(caller, record_id):
            return "err", "InvalidRecordId"
        if self.role.get(pharmacy) != "pharmacy":
            return "err", "NotRegistered"
        self.grant[(caller, pharmacy)] = [record_id, True]
        return "ok", None

    def op_allow_insurer(self, caller, insurer, record_id, value=0):
        if not self._insured(caller):
            return "err", "NotInsured"
        if not self.permissive and not self.customer.get((caller, insurer), False):
            return "err", "NotACustomer"
        if not self._rec_ok(caller, record_id):
            return "err", "InvalidRecordId"
        self.claim[(caller, insurer)] = [record_id, True]
        return "ok", None

    def op_get_doctor(self, caller, doctor, value=0):
        if self.role.get(doctor) != "doctor":
            return "err", "NotRegistered"
        return "ok", {
            "name": self.docname[doctor],
            "hospital": self.dochosp[doctor],
            "spec": self.docspec[doctor],
        }

    def op_doctor_get_record(self, caller, patient, record_id, value=0):
        if self.role.get(caller) != "doctor":
            return "err", "NotRegistered"
        if self.role.get(patient) != "patient":
            return "err", "NotRegistered"
        if not self._rec_ok(patient, record_id):
            return "err", "InvalidRecordId"
        rec = self.records.get((patient, record_id))
        return "ok", (rec[4] or "") if rec else ""

    def op_doctor_get_patient(self, caller, patient, value=0):
        if self.role.get(caller) != "doctor":
            return "err", "NotRegistered"
        if self.role.get(patient) != "patient":
            return "err", "NotRegistered"
        return "ok", {"age": self.age[patient], "gender": self.gender[patient]}

    def op_doctor_get_record_count(self, caller, patient, value=0):
        if self.role.get(caller) != "doctor":
            return "err", "NotRegistered"
        if self.role.get(patient) != "patient":
            return "err", "NotRegistered"
        return "ok", self.recn.get(patient, 0)

    def op_add_customer(self, caller, patient, value=0):
        if self.role.get(caller) != "insurer":
            return "err", "NotRegistered"
        self.customer[(patient, caller)] = True
        return "ok", None

    def op_remove_customer(self, caller, patient, value=0):
        if self.role.get(caller) != "insurer":
            return "err", "NotRegistered"
        if not self.permissive and not self.customer.get((patient, caller), False):
            return "err", "NotACustomer"
        self.customer[(patient, caller)] = False
        return "ok", None

    def op_insurer_get_record(self, caller, patient, value=0):
        claim = self.claim.get((patient, caller))
        if not claim or not claim[1]:
            return "err", "RequestNotRaised"
        rec = self.records.get((patient, claim[0]))
        return "ok", {
            "prescription": (rec[4] or "") if rec else "",
            "bill": (rec[5] or "") if rec else "",
        }

    def op_insurance_payment(self, caller, patient, value=0):
        claim = self.claim.get((patient, caller))
        if not claim or not claim[1]:
            return "err", "RequestNotRaised"
        status, code = self._pay(caller, patient, value)
        if status == "err":
            return status, code
        claim[1] = False
        return "ok", None

    def op_pharmacy_get_record(self, caller, patient, value=0):
        grant = self.grant.get((patient, caller))
        if not grant or not grant[1]:
            return "err", "NotAllowed"
        rec = self.records.get((patient, grant[0]))
        return "ok", (rec[4] or "") if rec else ""

    def op_set_bill(self, caller, patient, bill, value=0):
        grant = self.grant.get((patient, caller))
        if not grant or not grant[1]:
            return "err", "NotAllowed"
        rec = self.records.get((patient, grant[0]))
        if rec is not None and rec[5] is not None:
            return "err", "AlreadySet"
        if rec is None:
            rec = self.records[(patient, grant[0])] = [
                "0x" + "0" * 40, "0x" + "0" * 40, 0, 0, None, None,
            ]
        rec[5] = bill
        grant[1] = False
        return "ok", None
