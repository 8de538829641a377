"""Bit-packed GF(2) linear algebra and GF(2^m) field arithmetic.

Vectors are plain Python integers (bit i of the payload = coordinate i),
matrices pack rows into uint64 words for vectorized elimination.  Everything
is immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

_WORD = 64


def _n_words(cols: int) -> int:
    return max(1, (cols + _WORD - 1) // _WORD)


def _int_to_words(value: int, cols: int) -> np.ndarray:
    nw = _n_words(cols)
    buf = value.to_bytes(nw * 8, "little")
    return np.frombuffer(buf, dtype="<u8").astype(np.uint64)


def _words_to_int(words: np.ndarray) -> int:
    return int.from_bytes(words.astype("<u8").tobytes(), "little")


@dataclass(frozen=True)
class BitVec:
    """A length-`length` vector over GF(2), packed into an int payload."""

    length: int
    payload: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be nonnegative")
        if self.payload < 0 or self.payload >> self.length:
            raise ValueError("payload has bits beyond `length`")

    def get(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.payload >> i) & 1

    def weight(self) -> int:
        return self.payload.bit_count()

    def __xor__(self, other: "BitVec") -> "BitVec":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVec(self.length, self.payload ^ other.payload)

    def to_array(self) -> np.ndarray:
        """Unpack into a uint8 0/1 array of shape (length,)."""
        nbytes = (self.length + 7) // 8
        raw = np.frombuffer(self.payload.to_bytes(nbytes or 1, "little"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        return bits[: self.length]

    @classmethod
    def from_array(cls, bits: Sequence[int] | np.ndarray) -> "BitVec":
        arr = np.asarray(bits, dtype=np.uint8) & 1
        packed = np.packbits(arr, bitorder="little")
        return cls(len(arr), int.from_bytes(packed.tobytes(), "little"))

    def __str__(self):
        return "".join(str(self.get(i)) for i in range(self.length))


class BitMatrix:
    """A rows x cols matrix over GF(2) with uint64-packed rows.

    The word array is frozen after construction; all operations allocate
    fresh matrices.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: np.ndarray, cols: int):
        data = np.ascontiguousarray(data, dtype=np.uint64)
        if data.ndim != 2 or data.shape[1] != _n_words(cols):
            raise ValueError("word array shape does not match cols")
        # mask stray bits beyond cols
        rem = cols % _WORD
        if rem and data.shape[0]:
            data = data.copy()
            data[:, -1] &= np.uint64((1 << rem) - 1)
        data.setflags(write=False)
        self.rows = data.shape[0]
        self.cols = cols
        self._data = data

    @classmethod
    def from_rows(cls, rows: Iterable[BitVec | int], cols: int) -> "BitMatrix":
        ints = [r.payload if isinstance(r, BitVec) else int(r) for r in rows]
        nw = _n_words(cols)
        if not ints:
            return cls(np.zeros((0, nw), dtype=np.uint64), cols)
        data = np.empty((len(ints), nw), dtype=np.uint64)
        for i, v in enumerate(ints):
            data[i] = _int_to_words(v, cols)
        return cls(data, cols)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, _n_words(cols)), dtype=np.uint64), cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        data = np.zeros((n, _n_words(n)), dtype=np.uint64)
        for i in range(n):
            data[i, i // _WORD] = np.uint64(1) << np.uint64(i % _WORD)
        return cls(data, n)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BitMatrix":
        """Pack a (rows, cols) 0/1 array."""
        arr = np.asarray(arr, dtype=np.uint8) & 1
        rows, cols = arr.shape
        nw = _n_words(cols)
        packed = np.packbits(arr, axis=1, bitorder="little")
        padded = np.zeros((rows, nw * 8), dtype=np.uint8)
        padded[:, : packed.shape[1]] = packed
        return cls(padded.view("<u8").astype(np.uint64), cols)

    def row(self, i: int) -> BitVec:
        return BitVec(self.cols, _words_to_int(self._data[i]))

    def row_ints(self) -> list[int]:
        return [_words_to_int(self._data[i]) for i in range(self.rows)]

    def to_array(self) -> np.ndarray:
        """Unpack into a (rows, cols) uint8 0/1 array."""
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        raw = self._data.astype("<u8").view(np.uint8)
        bits = np.unpackbits(raw, axis=1, bitorder="little")
        return np.ascontiguousarray(bits[:, : self.cols])

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self._data, other._data))
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self._data.tobytes()))

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols})"


def _column_bit(data: np.ndarray, col: int) -> np.ndarray:
    w, b = divmod(col, _WORD)
    return (data[:, w] >> np.uint64(b)) & np.uint64(1)


def rank(mat: BitMatrix) -> int:
    """Row rank over GF(2).  The input is not modified."""
    if mat.rows == 0 or mat.cols == 0:
        return 0
    data = mat._data.copy()
    r = 0
    for col in range(mat.cols):
        if r == mat.rows:
            break
        nz = np.nonzero(_column_bit(data[r:], col))[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            data[[r, p]] = data[[p, r]]
        flip = r + 1 + np.nonzero(_column_bit(data[r + 1 :], col))[0]
        data[flip] ^= data[r]
        r += 1
    return r


def rref(mat: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form and the (strictly increasing) pivot columns.

    The result has the same shape as the input; zero rows sink to the bottom.
    Pivoting is deterministic: the first nonzero column, topmost nonzero row.
    """
    data = mat._data.copy()
    pivots: list[int] = []
    r = 0
    for col in range(mat.cols):
        if r == mat.rows:
            break
        below = _column_bit(data[r:], col)
        nz = np.nonzero(below)[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            data[[r, p]] = data[[p, r]]
        ones = np.nonzero(_column_bit(data, col))[0]
        ones = ones[ones != r]
        data[ones] ^= data[r]
        pivots.append(col)
        r += 1
    return BitMatrix(data, mat.cols), pivots


def kernel_basis(mat: BitMatrix) -> BitMatrix:
    """Basis of the right null space {x : mat @ x^T = 0}.

    Row count equals cols - rank(mat).
    """
    reduced, pivots = rref(mat)
    pivot_set = set(pivots)
    free_cols = [c for c in range(mat.cols) if c not in pivot_set]
    red = reduced.to_array()
    out = np.zeros((len(free_cols), mat.cols), dtype=np.uint8)
    for idx, f in enumerate(free_cols):
        out[idx, f] = 1
        for i, p in enumerate(pivots):
            out[idx, p] = red[i, f]
    return BitMatrix.from_array(out) if len(free_cols) else BitMatrix.zeros(0, mat.cols)


def matmul_gf2(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """GF(2) product a @ b (a.cols must equal b.rows)."""
    if a.cols != b.rows:
        raise ValueError("inner dimensions disagree")
    aa = a.to_array().astype(np.uint8)
    bb = b.to_array().astype(np.uint8)
    prod = (aa.astype(np.uint32) @ bb.astype(np.uint32)) & 1
    return BitMatrix.from_array(prod.astype(np.uint8))


# ---------------------------------------------------------------------------
# GF(2^m)

# Primitive polynomials of minimal weight, bit i = coefficient of x^i
# (bit m included).  Primitivity is re-verified at construction time.
PRIMITIVE_POLYS: dict[int, int] = {
    2: 0x7,       # x^2 + x + 1
    3: 0xB,       # x^3 + x + 1
    4: 0x13,      # x^4 + x + 1
    5: 0x25,      # x^5 + x^2 + 1
    6: 0x43,      # x^6 + x + 1
    7: 0x83,      # x^7 + x + 1
    8: 0x11D,     # x^8 + x^4 + x^3 + x^2 + 1
    9: 0x211,     # x^9 + x^4 + 1
    10: 0x409,    # x^10 + x^3 + 1
    11: 0x805,    # x^11 + x^2 + 1
    12: 0x1053,   # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,   # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,   # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,   # x^15 + x + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}

# distinct prime factors of 2^m - 1, used for the primitivity order check
_ORDER_FACTORS: dict[int, tuple[int, ...]] = {
    2: (3,), 3: (7,), 4: (3, 5), 5: (31,), 6: (3, 7), 7: (127,),
    8: (3, 5, 17), 9: (7, 73), 10: (3, 11, 31), 11: (23, 89),
    12: (3, 5, 7, 13), 13: (8191,), 14: (3, 43, 127), 15: (7, 31, 151),
    16: (3, 5, 17, 257),
}


@dataclass(frozen=True)
class GF2mField:
    """GF(2^m) in the polynomial basis; elements are ints in [0, 2^m)."""

    m: int
    poly: int = field(default=0)

    def __post_init__(self):
        if not 2 <= self.m <= 16:
            raise ValueError("extension degree must be in [2, 16]")
        poly = self.poly or PRIMITIVE_POLYS[self.m]
        object.__setattr__(self, "poly", poly)
        if poly >> self.m != 1:
            raise ValueError(f"polynomial 0x{poly:x} does not have degree {self.m}")
        order = (1 << self.m) - 1
        if self.pow(2, order) != 1:
            raise ValueError(f"0x{poly:x} is not irreducible over GF(2)")
        for p in _ORDER_FACTORS[self.m]:
            if self.pow(2, order // p) == 1:
                raise ValueError(f"0x{poly:x} is irreducible but not primitive")

    @property
    def size(self) -> int:
        return 1 << self.m

    def mul(self, a: int, b: int) -> int:
        """Carry-less product reduced modulo the primitive polynomial."""
        res = 0
        x = a
        while b:
            if b & 1:
                res ^= x
            b >>= 1
            x <<= 1
            if x >> self.m:
                x ^= self.poly
        return res

    def pow(self, a: int, e: int) -> int:
        res, base = 1, a
        while e:
            if e & 1:
                res = self.mul(res, base)
            base = self.mul(base, base)
            e >>= 1
        return res

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.size - 2)

    def bits(self, a: int) -> list[int]:
        """Coefficients of `a` in the polynomial basis, degree 0 first."""
        return [(a >> i) & 1 for i in range(self.m)]


def gf2m_mul(fld: GF2mField, a: int, b: int) -> int:
    """Product of two field elements (see GF2mField.mul)."""
    if a >= fld.size or b >= fld.size or a < 0 or b < 0:
        raise ValueError("element out of range")
    return fld.mul(a, b)
