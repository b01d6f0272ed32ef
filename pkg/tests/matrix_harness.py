"""Replays every (caller kind, operation) cell against the state machine.

Shared by the unit matrix test and the acceptance gate. Arguments per cell
are the minimal valid ones in the standard world (see world_setup): the
patient holds record 1, is the insurer's customer with a raised claim, and
the pharmacy holds a live grant.
"""

from medledger.contract.ops import apply_operation
from medledger.contract.state import ContractState, Role
from medledger.errors import GuardRejection

from permission_oracle import CALLERS, MATRIX, MESSAGES
from world_setup import START_BALANCE, build_world, make_cast

FRESH = "0x" + "f" * 40  # never registered, never funded

# caller kind -> world alias
KIND_TO_ALIAS = {
    "administrator": "admin",
    "patient": "patient",
    "doctor": "doctor",
    "hospital": "hospital",
    "insurer": "insurer",
    "pharmacy": "pharmacy",
    "unregistered": "outsider",
}

HASH_A = "sha256:" + "11" * 32


def standard_world(permissive: bool = False):
    """The shared world, plus its alias -> account mapping."""
    cast = make_cast()
    accounts = {alias: kp.account for alias, kp in cast.items()}
    state = ContractState(permissive=permissive)
    state.roles[accounts["admin"]] = Role.ADMINISTRATOR
    for account in accounts.values():
        state.balances[account] = START_BALANCE
    build_world(state, accounts)
    return state, accounts


def cell_args(op, accounts):
    """Minimal valid arguments (and value) for one operation."""
    a = accounts
    table = {
        "register_patient": ({"patient": FRESH, "age": 50, "gender": "M"}, 0),
        "register_doctor": (
            {"doctor": FRESH, "name": "n", "hospital": a["hospital"], "spec": "s"}, 0),
        "register_hospital": ({"hospital": FRESH}, 0),
        "register_insurer": ({"insurer": FRESH}, 0),
        "register_pharmacy": ({"pharmacy": FRESH}, 0),
        "remove_stakeholder": ({"target": a["pharmacy2"]}, 0),
        "add_record": (
            {"patient": a["patient"], "doctor": a["doctor"],
             "admission": 1, "discharge": 2}, 0),
        "add_prescription": ({"patient": a["patient"], "prescription": HASH_A}, 0),
        "get_record": ({"record_id": 1}, 0),
        "get_record_count": ({}, 0),
        "trigger_payment": ({"beneficiary": a["doctor"]}, 1),
        "allow_pharmacy": ({"pharmacy": a["pharmacy"], "record_id": 1}, 0),
        "allow_insurer": ({"insurer": a["insurer"], "record_id": 1}, 0),
        "get_doctor": ({"doctor": a["doctor"]}, 0),
        "doctor_get_record": ({"patient": a["patient"], "record_id": 1}, 0),
        "doctor_get_patient": ({"patient": a["patient"]}, 0),
        "doctor_get_record_count": ({"patient": a["patient"]}, 0),
        "add_customer": ({"patient": a["patient"]}, 0),
        "remove_customer": ({"patient": a["patient"]}, 0),
        "insurer_get_record": ({"patient": a["patient"]}, 0),
        "insurance_payment": ({"patient": a["patient"]}, 1),
        "pharmacy_get_record": ({"patient": a["patient"]}, 0),
        "set_bill": ({"patient": a["patient"], "bill": HASH_A}, 0),
    }
    return table[op]


def run_cell(world, accounts, op, kind):
    """Outcome of one cell on a fresh clone: ("ok", None) or (code, message)."""
    caller = accounts[KIND_TO_ALIAS[kind]]
    args, value = cell_args(op, accounts)
    try:
        apply_operation(world.clone(), caller, op, args, value)
        return "ok", None
    except GuardRejection as exc:
        return exc.code, exc.message


def enumerate_matrix(world, accounts):
    """Yield (op, kind, expected_outcome, actual_outcome, message_mismatch)."""
    for op, row in MATRIX.items():
        for kind in CALLERS:
            expected = row[kind]
            actual, message = run_cell(world, accounts, op, kind)
            message_bad = (
                actual != "ok" and MESSAGES.get(actual) is not None
                and message != MESSAGES[actual]
            )
            yield op, kind, expected, actual, message_bad
