"""Error taxonomy: stable machine codes paired with the on-chain message strings.

Guard rejections keep the exact message text the contract emits (including
the historical "Transaction Unsucessful" spelling) so receipts, HTTP bodies
and CLI output all agree byte-for-byte.
"""

from __future__ import annotations


class LedgerError(Exception):
    """Base error carrying a stable code and a human-readable message."""

    code = "LedgerError"
    message = "error"

    def __init__(self, detail: str | None = None):
        self.detail = detail
        super().__init__(self.message if detail is None else f"{self.message} ({detail})")


class GuardRejection(LedgerError):
    """A contract guard refused the call; state is left untouched."""


# -- contract guard rejections -----------------------------------------------

class NotAdministrator(GuardRejection):
    code = "NotAdministrator"
    message = "Not Administrator"


class AlreadyRegistered(GuardRejection):
    code = "AlreadyRegistered"
    message = "Already Registered"


class NotRegistered(GuardRejection):
    code = "NotRegistered"
    message = "Not Registered"


class HospitalNotRegistered(GuardRejection):
    code = "HospitalNotRegistered"
    message = "Not Registered"


class InvalidRecordId(GuardRejection):
    code = "InvalidRecordId"
    message = "Not Valid"


class RecordDoesNotExist(GuardRejection):
    code = "RecordDoesNotExist"
    message = "Record Don't Exist"


class NotInsured(GuardRejection):
    code = "NotInsured"
    message = "Don't Have Insurance"


class NotACustomer(GuardRejection):
    code = "NotACustomer"
    message = "Not a customer"


class RequestNotRaised(GuardRejection):
    code = "RequestNotRaised"
    message = "Request Not Raised"


class NotAllowed(GuardRejection):
    code = "NotAllowed"
    message = "Not Allowed"


class InsufficientFunds(GuardRejection):
    code = "InsufficientFunds"
    message = "Transaction Unsucessful"


class AlreadySet(GuardRejection):
    code = "AlreadySet"
    message = "Already Set"


class ValueOverflow(GuardRejection):
    code = "ValueOverflow"
    message = "Value Overflow"


class UnknownGuard(LedgerError):
    code = "UnknownGuard"
    message = "Unknown Guard"


# -- transaction / block admission -------------------------------------------

class InvalidArgument(LedgerError):
    code = "InvalidArgument"
    message = "Invalid Argument"


class UnknownOperation(LedgerError):
    code = "UnknownOperation"
    message = "Unknown Operation"


class BadSignature(LedgerError):
    code = "BadSignature"
    message = "Bad Signature"


class BadNonce(LedgerError):
    code = "BadNonce"
    message = "Bad Nonce"


class NotYourTurn(LedgerError):
    code = "NotYourTurn"
    message = "Not Your Turn"


# -- content store ------------------------------------------------------------

class BlobTooLarge(LedgerError):
    code = "BlobTooLarge"
    message = "Blob Too Large"


class NotFound(LedgerError):
    code = "NotFound"
    message = "Not Found"


class IntegrityError(LedgerError):
    code = "IntegrityError"
    message = "Integrity Error"


# -- simulator / config -------------------------------------------------------

class InvalidConfig(LedgerError):
    code = "InvalidConfig"
    message = "Invalid Config"


class UnknownNode(LedgerError):
    code = "UnknownNode"
    message = "Unknown Node"
