"""Byte-exact primitives: Keccak-256, mark chaining and FPV/AMV encoding.

Words and hashes are plain 32-byte ``bytes``. The Keccak kernel comes from the
compiled ``_speedups`` extension when it is importable, otherwise from the
pure-Python implementation; set ``HMSIM_PURE_PYTHON=1`` to force the latter.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

from . import _keccak_py

WORD_SIZE = 32
FPV_SIZE = 3 * WORD_SIZE

Hash256 = bytes
Word = bytes

if os.environ.get("HMSIM_PURE_PYTHON"):
    _speedups = None
else:
    try:
        from . import _speedups
    except ImportError:
        _speedups = None

if _speedups is not None:
    BACKEND = "compiled"
    _keccak = _speedups.keccak256
    _mark = _speedups.compute_mark
else:
    BACKEND = "python"
    _keccak = _keccak_py.keccak256

    def _mark(previous_mark, value):
        return _keccak_py.keccak256(previous_mark + value)


class MalformedInputError(ValueError):
    """Raised when bytes cannot be decoded into a fixed-layout value."""


def word(n: int) -> Word:
    """Big-endian 32-byte encoding of a non-negative integer."""
    return n.to_bytes(WORD_SIZE, "big")


def word_to_int(w: Word) -> int:
    return int.from_bytes(w, "big")


HEAD_FLAG = word(1)
SUCCESS_FLAG = word(2)
REJECTED = word(0)
ZERO_WORD = word(0)


def keccak256(data: bytes) -> Hash256:
    """Keccak-256 digest with the original (pre-NIST) padding, as Ethereum uses."""
    return _keccak(bytes(data))


@lru_cache(maxsize=1 << 16)
def _cached_mark(previous_mark: bytes, value: bytes) -> Hash256:
    return _mark(previous_mark, value)


def compute_mark(previous_mark: Hash256, value: Word) -> Hash256:
    """Chain a value onto a mark: ``keccak256(previous_mark || value)``."""
    if len(previous_mark) != WORD_SIZE or len(value) != WORD_SIZE:
        raise MalformedInputError("previous_mark and value must be 32 bytes each")
    return _cached_mark(bytes(previous_mark), bytes(value))


GENESIS_MARK = keccak256(ZERO_WORD)


def _check_word(name, value):
    if not isinstance(value, (bytes, bytearray)) or len(value) != WORD_SIZE:
        raise MalformedInputError(f"{name} must be {WORD_SIZE} bytes")


@dataclass(frozen=True, slots=True)
class FPV:
    """(flag, previous_mark, value) argument triple of a contract call."""

    flag: Word
    previous_mark: Hash256
    value: Word

    def __post_init__(self):
        for name in ("flag", "previous_mark", "value"):
            _check_word(name, getattr(self, name))
            object.__setattr__(self, name, bytes(getattr(self, name)))

    def encode(self) -> bytes:
        return self.flag + self.previous_mark + self.value

    @classmethod
    def decode(cls, data: bytes) -> FPV:
        if len(data) != FPV_SIZE:
            raise MalformedInputError(f"FPV payload must be {FPV_SIZE} bytes, got {len(data)}")
        data = bytes(data)
        return cls(data[:32], data[32:64], data[64:96])

    @property
    def mark(self) -> Hash256:
        """Mark this FPV produces when applied as a set."""
        return compute_mark(self.previous_mark, self.value)


@dataclass(frozen=True, slots=True)
class AMV:
    """(address, mark, value) triple describing a contract state transition."""

    address: Word
    mark: Hash256
    value: Word

    def __post_init__(self):
        for name in ("address", "mark", "value"):
            _check_word(name, getattr(self, name))

    @classmethod
    def from_fpv(cls, address: Word, fpv: FPV) -> AMV:
        return cls(address, fpv.mark, fpv.value)


def encode_fpv(fpv: FPV) -> bytes:
    return fpv.encode()


def decode_fpv(data: bytes) -> FPV:
    return FPV.decode(data)
