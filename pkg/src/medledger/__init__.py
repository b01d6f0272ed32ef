"""medledger: a permissioned healthcare ledger with proof-of-authority sealing."""

__version__ = "0.1.0"
