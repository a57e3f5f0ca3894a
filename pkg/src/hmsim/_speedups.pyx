# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Keccak-256 kernels."""

from libc.stdint cimport uint64_t, uint8_t
from libc.string cimport memcpy, memset

cdef uint64_t[24] RC = [
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808AULL, 0x8000000080008000ULL,
    0x000000000000808BULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008AULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000AULL,
    0x000000008000808BULL, 0x800000000000008BULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800AULL, 0x800000008000000AULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
]

# pi-lane walk: lane PILN[i] receives the previous lane rotated by ROTC[i]
cdef int[24] ROTC = [1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 2, 14,
                     27, 41, 56, 8, 25, 43, 62, 18, 39, 61, 20, 44]
cdef int[24] PILN = [10, 7, 11, 17, 18, 3, 5, 16, 8, 21, 24, 4,
                     15, 23, 19, 13, 12, 2, 20, 14, 22, 9, 6, 1]

DEF RATE = 136


cdef inline uint64_t rol(uint64_t v, int n) nogil:
    return (v << n) | (v >> (64 - n))


cdef void f1600(uint64_t* st) nogil:
    cdef uint64_t bc[5]
    cdef uint64_t t
    cdef int r, i, j
    for r in range(24):
        for i in range(5):
            bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20]
        for i in range(5):
            t = bc[(i + 4) % 5] ^ rol(bc[(i + 1) % 5], 1)
            for j in range(0, 25, 5):
                st[j + i] ^= t
        t = st[1]
        for i in range(24):
            j = PILN[i]
            bc[0] = st[j]
            st[j] = rol(t, ROTC[i])
            t = bc[0]
        for j in range(0, 25, 5):
            for i in range(5):
                bc[i] = st[j + i]
            for i in range(5):
                st[j + i] ^= (~bc[(i + 1) % 5]) & bc[(i + 2) % 5]
        st[0] ^= RC[r]


cdef void absorb_block(uint64_t* st, const uint8_t* p) nogil:
    cdef int i, k
    cdef uint64_t lane
    for i in range(RATE // 8):
        lane = 0
        for k in range(8):
            lane |= (<uint64_t>p[8 * i + k]) << (8 * k)
        st[i] ^= lane
    f1600(st)


cdef void digest(const uint8_t* data, Py_ssize_t n, uint8_t* out) nogil:
    cdef uint64_t st[25]
    cdef uint8_t last[RATE]
    cdef Py_ssize_t off = 0
    cdef Py_ssize_t rem
    cdef int i, k
    memset(st, 0, sizeof(st))
    while n - off >= RATE:
        absorb_block(st, data + off)
        off += RATE
    rem = n - off
    memset(last, 0, RATE)
    if rem:
        memcpy(last, data + off, rem)
    last[rem] ^= 0x01
    last[RATE - 1] ^= 0x80
    absorb_block(st, last)
    for i in range(4):
        for k in range(8):
            out[8 * i + k] = <uint8_t>(st[i] >> (8 * k))


def keccak256(data):
    cdef const uint8_t[:] view = memoryview(bytes(data)).cast("B") if not isinstance(data, bytes) else data
    cdef uint8_t out[32]
    cdef Py_ssize_t n = view.shape[0]
    if n == 0:
        digest(<const uint8_t*>b"", 0, out)
    else:
        digest(&view[0], n, out)
    return (<char*>out)[:32]


def compute_mark(bytes previous_mark, bytes value):
    """keccak256(previous_mark || value) without building the concatenation in Python."""
    cdef uint8_t buf[64]
    cdef uint8_t out[32]
    if len(previous_mark) != 32 or len(value) != 32:
        raise ValueError("mark inputs must be 32 bytes each")
    memcpy(buf, <const char*>previous_mark, 32)
    memcpy(buf + 32, <const char*>value, 32)
    digest(buf, 64, out)
    return (<char*>out)[:32]
