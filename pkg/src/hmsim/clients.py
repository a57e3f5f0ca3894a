"""Transaction-generating actors: one price-setting owner and many buyers."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from .chain import ContractState
from .core import HEAD_FLAG, FPV, SUCCESS_FLAG, Word
from .hms import RaaResult
from .txn import Transaction, TxKind


class Strategy(enum.Enum):
    BASELINE_BUYER = "baseline_buyer"
    HMS_BUYER = "hms_buyer"
    OWNER_SETTER = "owner_setter"


class StrategyError(ValueError):
    pass


@dataclass
class Client:
    """An address with its own nonce counter.

    The owner may also buy, which is how single-sender histories are built.
    """

    address: Word
    strategy: Strategy
    next_nonce: int = 0

    def _take_nonce(self) -> int:
        n = self.next_nonce
        self.next_nonce += 1
        return n

    def _require(self, *allowed: Strategy):
        if self.strategy not in allowed:
            raise StrategyError(f"{self.strategy.value} client cannot do this")


def make_buy_baseline(client: Client, committed: ContractState, tick: int = 0) -> Transaction:
    """Buy at the last published price."""
    client._require(Strategy.BASELINE_BUYER, Strategy.OWNER_SETTER)
    fpv = FPV(SUCCESS_FLAG, committed.mark, committed.value)
    return Transaction.create(client.address, client._take_nonce(), TxKind.BUY, fpv, tick)


def make_buy_hms(client: Client, raa_view: RaaResult, tick: int = 0) -> Transaction:
    """Buy at the read-uncommitted price returned by an augmented view call."""
    client._require(Strategy.HMS_BUYER, Strategy.OWNER_SETTER)
    fpv = FPV(SUCCESS_FLAG, raa_view.mark, raa_view.value)
    return Transaction.create(client.address, client._take_nonce(), TxKind.BUY, fpv, tick)


def make_set(owner: Client, basis: Union[RaaResult, ContractState], new_value: Word, tick: int = 0) -> Transaction:
    """Set a new price chained onto ``basis``.

    Chaining from published state (a committed ContractState, or an RAA result
    that fell back to it) makes the set a head candidate; chaining from a
    pending series tail makes it a successor.
    """
    owner._require(Strategy.OWNER_SETTER)
    if isinstance(basis, RaaResult):
        flag = HEAD_FLAG if basis.flag == HEAD_FLAG else SUCCESS_FLAG
    else:
        flag = HEAD_FLAG
    fpv = FPV(flag, basis.mark, new_value)
    return Transaction.create(owner.address, owner._take_nonce(), TxKind.SET, fpv, tick)
