from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import FPV, Hash256, Word, keccak256, word


class TxKind(enum.Enum):
    SET = "set"
    BUY = "buy"


@dataclass(frozen=True, slots=True)
class Transaction:
    """A signed contract call waiting in (or included from) the pool.

    ``data`` is the raw call input; well-formed HMS calls carry a 96-byte FPV.
    ``txn_id`` is the hash of the signed fields and is derived on construction.
    """

    sender: Word
    nonce: int
    kind: TxKind
    data: bytes
    submit_tick: int = 0
    txn_id: Hash256 = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.nonce < 0:
            raise ValueError("nonce must be non-negative")
        object.__setattr__(self, "data", bytes(self.data))
        preimage = self.sender + word(self.nonce) + self.kind.value.encode() + self.data
        object.__setattr__(self, "txn_id", keccak256(preimage))

    @classmethod
    def create(cls, sender: Word, nonce: int, kind: TxKind, fpv: FPV, submit_tick: int = 0) -> Transaction:
        return cls(sender, nonce, kind, fpv.encode(), submit_tick)

    @property
    def fpv(self) -> FPV:
        """Decoded payload; raises MalformedInputError for non-HMS input."""
        return FPV.decode(self.data)

    def __repr__(self):
        return f"Transaction({self.kind.value}, sender={self.sender.hex()[-6:]}, nonce={self.nonce}, tick={self.submit_tick})"
