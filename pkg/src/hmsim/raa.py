"""Runtime argument augmentation for read-only contract calls.

A view call's argument triple is replaced by the HMS result before the call is
evaluated. Calls that can produce a transaction are signed by their sender, so
their arguments are never rewritten.
"""

from __future__ import annotations

import enum
from typing import Iterable

from .core import FPV, REJECTED, ZERO_WORD, Hash256, Word
from .hms import RaaResult, hash_mark_set
from .txn import Transaction


class ContractFunction(enum.Enum):
    MARK = "mark"
    GET = "get"
    SET = "set"
    BUY = "buy"

    @property
    def is_view(self) -> bool:
        return self in (ContractFunction.MARK, ContractFunction.GET)


class RefusedAugmentationError(PermissionError):
    """Attempt to rewrite the arguments of a state-changing call."""


def augment_view_call(function: ContractFunction, args: FPV, pool: Iterable[Transaction], committed) -> FPV:
    if not function.is_view:
        raise RefusedAugmentationError(f"{function.value}() may send a transaction; its arguments are signed")
    return hash_mark_set(args, tuple(pool), committed).to_fpv()


def view_mark(augmented: FPV) -> Hash256:
    return augmented.previous_mark


def view_get(augmented: FPV) -> Word:
    return augmented.value


def call_view(function: ContractFunction, args: FPV, pool: Iterable[Transaction], committed) -> bytes:
    """Augment then evaluate ``mark()`` or ``get()``."""
    augmented = augment_view_call(function, args, pool, committed)
    if function is ContractFunction.MARK:
        return view_mark(augmented)
    return view_get(augmented)


def read_uncommitted(pool: Iterable[Transaction], committed) -> RaaResult:
    """What a client learns from an augmented ``mark()``/``get()`` pair."""
    augmented = augment_view_call(ContractFunction.GET, FPV(REJECTED, ZERO_WORD, ZERO_WORD), pool, committed)
    return RaaResult(augmented.flag, view_mark(augmented), view_get(augmented))
