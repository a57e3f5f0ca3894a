"""Blockchain substrate: nonce-ordered pool, miner policies and block replay.

Contract semantics follow the single-variable pricing contract: ``set`` moves
the (mark, value) pair forward when the caller names the current mark, ``buy``
succeeds only when both mark and value match. Failed calls stay in the block
and leave the state untouched.
"""

from __future__ import annotations

import enum
import heapq
import random
from collections import deque
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

from .core import (
    FPV,
    GENESIS_MARK,
    ZERO_WORD,
    Hash256,
    MalformedInputError,
    Word,
    compute_mark,
    keccak256,
    word,
)
from .hms import build_series, process
from .txn import Transaction, TxKind

DEFAULT_CAPACITY = 512


class Status(enum.Enum):
    SUCCEEDED = "succeeded"
    FAILED = "failed"


class MinerPolicy(enum.Enum):
    BASELINE = "baseline"
    SEMANTIC = "semantic"


class RejectedSubmissionError(ValueError):
    """Submission with a reused or skipped nonce."""


@dataclass(frozen=True, slots=True)
class ContractState:
    owner_address: Word
    mark: Hash256
    value: Word
    n_set: int = 0
    n_buy: int = 0

    @classmethod
    def genesis(cls, value: Word = ZERO_WORD) -> ContractState:
        return cls(ZERO_WORD, GENESIS_MARK, value)

    def to_bytes(self) -> bytes:
        return self.owner_address + self.mark + self.value + word(self.n_set) + word(self.n_buy)

    @classmethod
    def from_bytes(cls, data: bytes) -> ContractState:
        if len(data) != 160:
            raise MalformedInputError("contract state is 160 bytes")
        return cls(data[:32], data[32:64], data[64:96], int.from_bytes(data[96:128], "big"),
                   int.from_bytes(data[128:160], "big"))


def execute_set(state: ContractState, fpv: FPV, sender: Word) -> tuple[ContractState, Status]:
    if keccak256(fpv.previous_mark) != keccak256(state.mark):
        return state, Status.FAILED
    new = replace(state, owner_address=sender, mark=compute_mark(fpv.previous_mark, fpv.value),
                  value=fpv.value, n_set=state.n_set + 1)
    return new, Status.SUCCEEDED


def execute_buy(state: ContractState, fpv: FPV, sender: Word) -> tuple[ContractState, Status]:
    if fpv.previous_mark != state.mark or fpv.value != state.value:
        return state, Status.FAILED
    return replace(state, owner_address=sender, n_buy=state.n_buy + 1), Status.SUCCEEDED


def execute(state: ContractState, txn: Transaction) -> tuple[ContractState, Status]:
    try:
        fpv = txn.fpv
    except MalformedInputError:
        # undecodable calldata reverts
        return state, Status.FAILED
    if txn.kind is TxKind.SET:
        return execute_set(state, fpv, txn.sender)
    return execute_buy(state, fpv, txn.sender)


def apply_transactions(pre_state: ContractState, txns: Iterable[Transaction]):
    state = pre_state
    statuses = []
    for txn in txns:
        state, status = execute(state, txn)
        statuses.append(status)
    return state, tuple(statuses)


@dataclass(frozen=True)
class Block:
    height: int
    txns: tuple[Transaction, ...]
    pre_state: ContractState
    post_state: ContractState
    statuses: tuple[Status, ...]
    tick: int = 0

    def __len__(self):
        return len(self.txns)


def validate_block(block: Block) -> bool:
    """Replay the block from its pre-state and compare byte for byte."""
    if len(block.statuses) != len(block.txns):
        return False
    post, statuses = apply_transactions(block.pre_state, block.txns)
    return post.to_bytes() == block.post_state.to_bytes() and statuses == block.statuses


@dataclass(frozen=True, slots=True)
class Ack:
    txn_id: Hash256
    sequence: int


class TxPool:
    """Pending transactions, grouped per sender in nonce order."""

    def __init__(self):
        self._txns: dict[Hash256, Transaction] = {}  # insertion order == ingestion order
        self._seq: dict[Hash256, int] = {}
        self._by_sender: dict[Word, deque[Transaction]] = {}
        self._next_nonce: dict[Word, int] = {}
        self._counter = 0

    def next_nonce(self, sender: Word) -> int:
        return self._next_nonce.get(sender, 0)

    def submit(self, txn: Transaction) -> Ack:
        expected = self.next_nonce(txn.sender)
        if txn.nonce != expected:
            raise RejectedSubmissionError(
                f"sender {txn.sender.hex()[-8:]} expected nonce {expected}, got {txn.nonce}")
        self._txns[txn.txn_id] = txn
        self._seq[txn.txn_id] = self._counter
        self._by_sender.setdefault(txn.sender, deque()).append(txn)
        self._next_nonce[txn.sender] = expected + 1
        self._counter += 1
        return Ack(txn.txn_id, self._counter - 1)

    def snapshot(self) -> tuple[Transaction, ...]:
        return tuple(self._txns.values())

    def sequence(self, txn: Transaction) -> int:
        return self._seq[txn.txn_id]

    def remove(self, txns: Iterable[Transaction]) -> None:
        for txn in txns:
            del self._txns[txn.txn_id]
            del self._seq[txn.txn_id]
            queue = self._by_sender[txn.sender]
            if queue[0].txn_id != txn.txn_id:
                raise ValueError("transactions must leave the pool in nonce order")
            queue.popleft()
            if not queue:
                del self._by_sender[txn.sender]

    def __len__(self):
        return len(self._txns)

    def __contains__(self, txn):
        return txn.txn_id in self._txns


def merge_by_priority(snapshot: Sequence[Transaction], key: Callable[[Transaction], tuple],
                      capacity: int) -> list[Transaction]:
    """Greedy merge of per-sender nonce queues, lowest key first.

    Each step picks the best next-nonce transaction among all senders, so any
    prefix of the result respects every sender's nonce order.
    """
    queues: dict[Word, deque[Transaction]] = {}
    for txn in snapshot:
        queues.setdefault(txn.sender, deque()).append(txn)
    heap = []
    for i, (sender, q) in enumerate(queues.items()):
        heap.append((key(q[0]), i, sender))
    heapq.heapify(heap)
    out = []
    while heap and len(out) < capacity:
        _, i, sender = heapq.heappop(heap)
        q = queues[sender]
        out.append(q.popleft())
        if q:
            heapq.heappush(heap, (key(q[0]), i, sender))
    return out


def baseline_order(snapshot: Sequence[Transaction], capacity: int, rng: random.Random,
                   jitter: Optional[float] = None) -> list[Transaction]:
    """Fee-blind miner: random sender interleaving, nonce order kept per sender.

    With ``jitter=None`` every transaction gets an independent uniform priority.
    Otherwise the priority is ``submit_tick + U(0, jitter)``, so arrival order
    is only perturbed locally.
    """
    if jitter is None:
        keys = {t.txn_id: rng.random() for t in snapshot}
    else:
        keys = {t.txn_id: t.submit_tick + rng.uniform(0.0, jitter) for t in snapshot}
    seq = {t.txn_id: i for i, t in enumerate(snapshot)}
    return merge_by_priority(snapshot, lambda t: (keys[t.txn_id], seq[t.txn_id]), capacity)


def semantic_order(snapshot: Sequence[Transaction], pre_state: ContractState,
                   capacity: int) -> list[Transaction]:
    """Order by the HMS series: sets in series order, each buy right after the set it read."""
    series = build_series(process(snapshot))
    set_pos: dict[Hash256, int] = {}
    mark_pos: dict[Hash256, int] = {}
    if series is not None:
        for i, node in enumerate(series.nodes):
            set_pos[node.txn.txn_id] = i
            mark_pos[node.mark] = i
    unmatched = len(mark_pos) + 1

    def key_of(txn, seq):
        if txn.kind is TxKind.SET:
            if txn.txn_id in set_pos:
                return (set_pos[txn.txn_id], 0, seq)
            return (unmatched, 0, seq)
        try:
            previous = txn.fpv.previous_mark
        except MalformedInputError:
            return (unmatched, 0, seq)
        if previous in mark_pos:
            return (mark_pos[previous], 1, seq)
        if previous == pre_state.mark:
            return (-1, 1, seq)
        return (unmatched, 0, seq)

    keys = {t.txn_id: key_of(t, i) for i, t in enumerate(snapshot)}
    return merge_by_priority(snapshot, lambda t: keys[t.txn_id], capacity)


def mine_block(pool: TxPool, policy: MinerPolicy, pre_state: ContractState,
               capacity: int = DEFAULT_CAPACITY, rng: Optional[random.Random] = None,
               height: int = 0, tick: int = 0, jitter: Optional[float] = None,
               min_age: int = 0) -> Block:
    """Select, order and execute up to ``capacity`` pooled transactions.

    Only transactions submitted at least ``min_age`` ticks before ``tick`` are
    eligible; this models the lag between a miner fixing its block template
    and the block being published. Included transactions are removed from
    ``pool``.
    """
    if capacity < 1:
        raise ValueError("capacity must be at least 1")
    if min_age < 0:
        raise ValueError("min_age must be non-negative")
    snapshot = pool.snapshot()
    if min_age:
        snapshot = tuple(t for t in snapshot if t.submit_tick <= tick - min_age)
    if policy is MinerPolicy.BASELINE:
        order = baseline_order(snapshot, capacity, rng if rng is not None else random.Random(0), jitter)
    elif policy is MinerPolicy.SEMANTIC:
        order = semantic_order(snapshot, pre_state, capacity)
    else:
        raise ValueError(f"unknown miner policy {policy!r}")
    post, statuses = apply_transactions(pre_state, order)
    pool.remove(order)
    return Block(height, tuple(order), pre_state, post, statuses, tick)


class Chain:
    """Published blocks plus the pool; readers only ever see committed state."""

    def __init__(self, genesis: Optional[ContractState] = None, policy: MinerPolicy = MinerPolicy.BASELINE,
                 capacity: int = DEFAULT_CAPACITY, seed: int = 0, jitter: Optional[float] = None,
                 min_age: int = 0):
        self.pool = TxPool()
        self.min_age = min_age
        self.blocks: list[Block] = []
        self.policy = policy
        self.capacity = capacity
        self.jitter = jitter
        self.rng = random.Random(seed)
        self._committed = genesis if genesis is not None else ContractState.genesis()

    @property
    def committed(self) -> ContractState:
        """Post-state of the latest published block."""
        return self._committed

    @property
    def height(self) -> int:
        return len(self.blocks)

    def submit(self, txn: Transaction) -> Ack:
        return self.pool.submit(txn)

    def mine(self, tick: int = 0) -> Block:
        block = mine_block(self.pool, self.policy, self._committed, self.capacity, self.rng,
                           height=self.height, tick=tick, jitter=self.jitter,
                           min_age=self.min_age)
        self.blocks.append(block)
        self._committed = block.post_state
        return block
