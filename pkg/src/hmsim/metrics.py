"""Raw throughput, state throughput and transaction efficiency.

All quantities are exact ``Fraction`` values so that
``t_state == t_raw * eta`` holds with no rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .chain import Block, Status
from .txn import Transaction, TxKind

TxnFilter = Callable[[Transaction], bool]


class InvalidDurationError(ValueError):
    pass


def is_buy(txn: Transaction) -> bool:
    return txn.kind is TxKind.BUY


def is_set(txn: Transaction) -> bool:
    return txn.kind is TxKind.SET


def any_txn(txn: Transaction) -> bool:
    return True


def tally(blocks: Iterable[Block], filter: TxnFilter = any_txn) -> tuple[int, int]:
    """(included, succeeded) counts over the transactions selected by ``filter``."""
    raw = ok = 0
    for block in blocks:
        for txn, status in zip(block.txns, block.statuses):
            if filter(txn):
                raw += 1
                ok += status is Status.SUCCEEDED
    return raw, ok


def efficiency(blocks: Iterable[Block], filter: TxnFilter = any_txn) -> Optional[Fraction]:
    """Share of included transactions that changed state; None when nothing was included."""
    raw, ok = tally(blocks, filter)
    return Fraction(ok, raw) if raw else None


def per_block_efficiency(blocks: Iterable[Block], filter: TxnFilter = any_txn) -> list[Optional[Fraction]]:
    return [efficiency([b], filter) for b in blocks]


@dataclass(frozen=True)
class RunStats:
    raw_count: int
    success_count: int
    duration_ticks: int

    def __post_init__(self):
        if not 0 <= self.success_count <= self.raw_count:
            raise ValueError("need 0 <= success_count <= raw_count")
        if self.duration_ticks <= 0:
            raise InvalidDurationError("duration must be positive")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Block], duration_ticks: int, filter: TxnFilter = any_txn) -> RunStats:
        raw, ok = tally(blocks, filter)
        return cls(raw, ok, duration_ticks)

    @property
    def eta(self) -> Optional[Fraction]:
        return Fraction(self.success_count, self.raw_count) if self.raw_count else None

    @property
    def t_raw(self) -> Fraction:
        return Fraction(self.raw_count, self.duration_ticks)

    @property
    def t_state(self) -> Fraction:
        return state_throughput(self)


def state_throughput(stats: RunStats) -> Fraction:
    """Successful transactions per tick."""
    if stats.duration_ticks <= 0:
        raise InvalidDurationError("duration must be positive")
    return Fraction(stats.success_count, stats.duration_ticks)
