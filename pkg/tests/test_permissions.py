"""Role/operation permission matrix against the hand-written oracle."""

import matrix_harness
from matrix_harness import standard_world
from permission_oracle import CALLERS, MATRIX


def test_matrix_full_agreement():
    state, accounts = standard_world()
    mismatches = [
        (op, kind, expected, actual)
        for op, kind, expected, actual, _ in matrix_harness.enumerate_matrix(state, accounts)
        if actual != expected
    ]
    assert mismatches == []


def test_matrix_messages_verbatim():
    state, accounts = standard_world()
    bad = [
        (op, kind, actual)
        for op, kind, _, actual, message_bad in matrix_harness.enumerate_matrix(state, accounts)
        if message_bad
    ]
    assert bad == []


def test_matrix_covers_every_operation():
    from medledger.contract.ops import OPS

    assert set(MATRIX) == set(OPS)
    for row in MATRIX.values():
        assert set(row) == set(CALLERS)


def test_matrix_has_per_op_success_shape():
    # every operation is reachable by at least one caller kind, and no
    # operation is open to everyone except the explicitly open ones
    open_ops = {"trigger_payment", "get_doctor"}
    for op, row in MATRIX.items():
        outcomes = set(row.values())
        assert "ok" in outcomes, op
        if op not in open_ops:
            assert outcomes != {"ok"}, op
