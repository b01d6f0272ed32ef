"""Shared builders for the standard test world.

The world: one registered actor per role (plus spares and an outsider),
one record for the main patient, an insurance customer link, a live
pharmacy grant, and a raised claim. Prescription and bill stay absent so
writes that set them still have room to succeed.
"""

from medledger.chain import GenesisConfig
from medledger.contract.ops import apply_operation
from medledger.contract.state import TOKEN
from medledger.keys import Keypair

ALIASES = (
    "admin",
    "patient",
    "patient2",
    "doctor",
    "doctor2",
    "hospital",
    "insurer",
    "insurer2",
    "pharmacy",
    "pharmacy2",
    "outsider",
)

START_BALANCE = 1000 * TOKEN

WORLD_SETUP = (
    ("admin", "register_hospital", {"hospital": "@hospital"}),
    ("admin", "register_doctor",
     {"doctor": "@doctor", "name": "Dr. Crane", "hospital": "@hospital",
      "spec": "cardiology"}),
    ("admin", "register_patient", {"patient": "@patient", "age": 34, "gender": "F"}),
    ("admin", "register_patient", {"patient": "@patient2", "age": 61, "gender": "M"}),
    ("admin", "register_insurer", {"insurer": "@insurer"}),
    ("admin", "register_insurer", {"insurer": "@insurer2"}),
    ("admin", "register_pharmacy", {"pharmacy": "@pharmacy"}),
    ("admin", "register_pharmacy", {"pharmacy": "@pharmacy2"}),
    ("hospital", "add_record",
     {"patient": "@patient", "doctor": "@doctor", "admission": 1000, "discharge": 2000}),
    ("insurer", "add_customer", {"patient": "@patient"}),
    ("patient", "allow_pharmacy", {"pharmacy": "@pharmacy", "record_id": 1}),
    ("patient", "allow_insurer", {"insurer": "@insurer", "record_id": 1}),
)


def make_cast() -> dict[str, Keypair]:
    return {alias: Keypair.from_seed(f"test-cast:{alias}") for alias in ALIASES}


def make_config(cast, permissive: bool = False, chain_id: str = "test") -> GenesisConfig:
    return GenesisConfig(
        chain_id=chain_id,
        authorities=[cast["admin"].account],
        administrators=[cast["admin"].account],
        balances={kp.account: START_BALANCE for kp in cast.values()},
        genesis_time=0,
        permissive_guards=permissive,
    )


def resolve_args(args: dict, accounts: dict[str, str]) -> dict:
    out = {}
    for key, val in args.items():
        if isinstance(val, str) and val.startswith("@"):
            out[key] = accounts[val[1:]]
        else:
            out[key] = val
    return out


def build_world(state, accounts) -> None:
    for alias, op, args in WORLD_SETUP:
        apply_operation(state, accounts[alias], op, resolve_args(args, accounts))


def build_model_world(model, accounts) -> None:
    """Replay the identical setup into the independent test model."""
    for alias, op, args in WORLD_SETUP:
        status, detail = model.call(accounts[alias], op, resolve_args(args, accounts))
        assert status == "ok", f"model setup failed at {op}: {detail}"
