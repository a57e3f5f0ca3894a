"""Hash-Mark-Set: serialize pending set transactions into a read-uncommitted view.

Pending ``set`` calls whose flag marks them as accepted are turned into nodes,
linked into a DAG by matching each node's ``previous_mark`` against the other
nodes' marks, and the deepest branch rooted at a head candidate becomes the
series. The series tail is the predicted next state of the contract.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import FPV, HEAD_FLAG, SUCCESS_FLAG, Hash256, MalformedInputError, Word
from .txn import Transaction, TxKind


class SeriesCycleError(RuntimeError):
    """The successor graph handed to deepest_branch is not acyclic."""


@dataclass(eq=False)
class TxnNode:
    txn: Optional[Transaction]
    fpv: FPV
    mark: Hash256
    prev: Optional[TxnNode] = None
    next: list[TxnNode] = field(default_factory=list)

    @classmethod
    def from_fpv(cls, fpv: FPV, txn: Optional[Transaction] = None) -> TxnNode:
        return cls(txn, fpv, fpv.mark)

    @property
    def sender(self) -> Optional[Word]:
        return self.txn.sender if self.txn is not None else None

    @property
    def nonce(self) -> Optional[int]:
        return self.txn.nonce if self.txn is not None else None

    def __repr__(self):
        return f"TxnNode(mark={self.mark.hex()[:8]}, prev={self.fpv.previous_mark.hex()[:8]})"


@dataclass(frozen=True)
class Series:
    nodes: tuple[TxnNode, ...]

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("a series has at least one node")

    @property
    def head(self) -> TxnNode:
        return self.nodes[0]

    @property
    def tail(self) -> TxnNode:
        return self.nodes[-1]

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


@dataclass(frozen=True, slots=True)
class RaaResult:
    """Augmented (flag, mark, value) handed back to a view call."""

    flag: Word
    mark: Hash256
    value: Word

    def to_fpv(self) -> FPV:
        return FPV(self.flag, self.mark, self.value)


def success(txn: Transaction) -> bool:
    """Whether the sender flagged this transaction as a head or a tail successor."""
    flag = txn.fpv.flag
    return flag == SUCCESS_FLAG or flag == HEAD_FLAG


def process(pool: Iterable[Transaction]) -> list[TxnNode]:
    """Filter a pool snapshot down to accepted set calls, in ingestion order."""
    nodes = []
    for txn in pool:
        if txn.kind is not TxKind.SET:
            continue
        try:
            fpv = txn.fpv
        except MalformedInputError:
            continue
        if fpv.flag == SUCCESS_FLAG or fpv.flag == HEAD_FLAG:
            nodes.append(TxnNode.from_fpv(fpv, txn))
    return nodes


def _reachable_count(head: TxnNode) -> int:
    seen = {id(head)}
    todo = [head]
    while todo:
        for child in todo.pop().next:
            if id(child) not in seen:
                seen.add(id(child))
                todo.append(child)
    return len(seen)


def deepest_branch(head: TxnNode, max_depth: Optional[int] = None) -> tuple[int, list[TxnNode]]:
    """Longest root-to-leaf path from ``head``.

    Equal-length branches resolve to the one whose tail mark is byte-wise
    smallest. The walk never goes deeper than ``max_depth`` nodes (default: the
    number of nodes reachable from ``head``), so a corrupt cyclic graph raises
    SeriesCycleError instead of looping.
    """
    limit = max_depth if max_depth is not None else _reachable_count(head)
    # id(node) -> (depth, tail mark, best child)
    best: dict[int, tuple[int, bytes, Optional[TxnNode]]] = {}
    stack = [(head, iter(head.next))]
    while stack:
        node, children = stack[-1]
        child = next(children, None)
        if child is not None:
            if id(child) in best:
                continue
            if len(stack) >= limit:
                raise SeriesCycleError(f"branch deeper than {limit} nodes; successor graph has a cycle")
            stack.append((child, iter(child.next)))
            continue
        stack.pop()
        choice = (1, node.mark, None)
        for c in node.next:
            depth, tail_mark, _ = best[id(c)]
            if depth + 1 > choice[0] or (depth + 1 == choice[0] and tail_mark < choice[1]):
                choice = (depth + 1, tail_mark, c)
        best[id(node)] = choice

    path = [head]
    step = best[id(head)][2]
    while step is not None:
        path.append(step)
        step = best[id(step)][2]
    return len(path), path


def can_follow(a: TxnNode, b: TxnNode) -> bool:
    """Edge a -> b: b names a's mark, is not itself a head candidate and, for one
    sender, comes later in nonce order."""
    if b.fpv.previous_mark != a.mark or b.fpv.flag == HEAD_FLAG:
        return False
    if a.txn is not None and b.txn is not None and a.txn.sender == b.txn.sender:
        return a.txn.nonce < b.txn.nonce
    return True


def link(txn_list: Sequence[TxnNode]) -> None:
    """Point every node at the nodes that may follow it (see ``can_follow``)."""
    by_previous = defaultdict(list)
    for node in txn_list:
        node.prev = None
        node.next = []
        by_previous[node.fpv.previous_mark].append(node)
    for node in txn_list:
        for succ in by_previous.get(node.mark, ()):
            if succ is not node and can_follow(node, succ):
                succ.prev = node
                node.next.append(succ)


def build_series(txn_list: Sequence[TxnNode]) -> Optional[Series]:
    """Deepest head-rooted branch of the pending-set DAG, or None without a head."""
    link(txn_list)
    chosen = None
    for node in txn_list:
        if node.fpv.flag != HEAD_FLAG:
            continue
        depth, path = deepest_branch(node, len(txn_list))
        if chosen is None or depth > len(chosen) or (depth == len(chosen) and path[-1].mark < chosen[-1].mark):
            chosen = path
    return Series(tuple(chosen)) if chosen else None


def hash_mark_set(input: Optional[FPV], pool: Iterable[Transaction], committed) -> RaaResult:
    """Read-uncommitted view of the contract value given the pending pool.

    Without a head-rooted series the committed (mark, value) comes back under
    HEAD_FLAG, telling the caller to start a new series from published state.
    ``input`` is the caller's original argument triple; it is always replaced.
    """
    txn_list = process(pool)
    series = build_series(txn_list) if txn_list else None
    if series is None:
        return RaaResult(HEAD_FLAG, committed.mark, committed.value)
    return RaaResult(SUCCESS_FLAG, series.tail.mark, series.tail.fpv.value)
