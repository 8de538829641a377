"""Monomial and linear codes of length 2^m.

Coordinates follow the standard bit ordering: coordinate i of an evaluation
vector is the value at the point whose j-th variable equals bit j of i
(bit 0 least significant).  Row v of the length-2^m Kronecker transform is
the evaluation vector of the monomial with exponent mask v, so the transform
maps coefficient vectors to codewords.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .bitmath import BitMatrix, BitVec, GF2mField, rank, rref


@functools.lru_cache(maxsize=None)
def variable_mask(m: int, j: int) -> int:
    """Evaluation payload of the single variable x_j over all 2^m points."""
    if not 0 <= j < m:
        raise ValueError(f"variable index {j} out of range for m={m}")
    n = 1 << m
    step = 1 << j
    block = ((1 << step) - 1) << step  # pattern 0^step 1^step
    out = 0
    for base in range(0, n, 2 * step):
        out |= block << base
    return out


@dataclass(frozen=True)
class Monomial:
    """A monomial over m variables; bit i of `mask` marks the presence of x_i."""

    mask: int
    m: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.m):
            raise ValueError("mask out of range")

    @property
    def degree(self) -> int:
        return self.mask.bit_count()


@dataclass(frozen=True)
class MonomialCode:
    """A binary code generated by the evaluation vectors of a set of monomials."""

    m: int
    gen_set: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "gen_set", frozenset(self.gen_set))
        n = 1 << self.m
        if any(not 0 <= v < n for v in self.gen_set):
            raise ValueError("generating-set mask out of range")

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def k(self) -> int:
        return len(self.gen_set)

    def sorted_masks(self) -> list[int]:
        return sorted(self.gen_set)


@dataclass(frozen=True)
class FrozenSpec:
    """The frozen index set of a polar code of length 2^m."""

    m: int
    frozen: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "frozen", frozenset(self.frozen))
        n = 1 << self.m
        if any(not 0 <= i < n for i in self.frozen):
            raise ValueError("frozen index out of range")

    @property
    def k(self) -> int:
        return (1 << self.m) - len(self.frozen)


class LinearCode:
    """A binary linear code given by a full-row-rank generator matrix."""

    __slots__ = ("n", "generator", "_canonical", "_array")

    def __init__(self, generator: BitMatrix, validate: bool = True):
        if validate and rank(generator) != generator.rows:
            raise ValueError("generator rows are linearly dependent")
        self.n = generator.cols
        self.generator = generator
        self._canonical = None
        self._array = None

    @classmethod
    def from_spanning_rows(cls, rows: Iterable[int | BitVec], n: int) -> "LinearCode":
        """Reduce an arbitrary spanning set to a canonical full-rank generator."""
        mat = BitMatrix.from_rows(list(rows), n)
        reduced, pivots = rref(mat)
        basis = BitMatrix.from_rows(reduced.row_ints()[: len(pivots)], n)
        return cls(basis, validate=False)

    @property
    def k(self) -> int:
        return self.generator.rows

    @property
    def m(self) -> int:
        m = self.n.bit_length() - 1
        if 1 << m != self.n:
            raise ValueError("code length is not a power of two")
        return m

    def generator_array(self):
        if self._array is None:
            self._array = self.generator.to_array()
        return self._array

    def canonical(self) -> BitMatrix:
        """RREF of the generator; equal row spaces give equal canonicals."""
        if self._canonical is None:
            reduced, pivots = rref(self.generator)
            self._canonical = BitMatrix.from_rows(
                reduced.row_ints()[: len(pivots)], self.n
            )
        return self._canonical

    def same_code(self, other: "LinearCode") -> bool:
        return self.n == other.n and self.canonical() == other.canonical()

    def __repr__(self):
        return f"LinearCode(n={self.n}, k={self.k})"


def evaluate_monomial(v: Monomial | int, m: int | None = None) -> BitVec:
    """Evaluation vector of a monomial over all 2^m points."""
    if isinstance(v, Monomial):
        mask, m = v.mask, v.m
    else:
        if m is None:
            raise ValueError("m required when passing a raw mask")
        mask = v
        if not 0 <= mask < (1 << m):
            raise ValueError("mask out of range")
    n = 1 << m
    out = (1 << n) - 1
    rem = mask
    while rem:
        j = (rem & -rem).bit_length() - 1
        out &= variable_mask(m, j)
        rem &= rem - 1
    return BitVec(n, out)


def encode(code: MonomialCode, u: BitVec) -> BitVec:
    """Map a coefficient vector through the Kronecker transform.

    u must be supported on the generating set; the transform is the in-place
    butterfly (each level XORs the lower half of a pair block into the upper),
    n log n bit operations in total.
    """
    n = code.n
    if u.length != n:
        raise ValueError(f"u has length {u.length}, expected {n}")
    support = u.payload
    allowed = 0
    for v in code.gen_set:
        allowed |= 1 << v
    if support & ~allowed:
        raise ValueError("u has support outside the generating set")
    return kronecker_transform(u, code.m)


def kronecker_transform(u: BitVec, m: int) -> BitVec:
    """The self-inverse length-2^m butterfly transform over GF(2)."""
    c = u.payload
    for j in range(m):
        lo = ~variable_mask(m, j)
        c ^= (c & lo) << (1 << j)
    return BitVec(1 << m, c)


def rm_code(r: int, m: int) -> MonomialCode:
    """Reed-Muller code of order r: all monomials of degree at most r."""
    if not 0 <= r <= m:
        raise ValueError("order must satisfy 0 <= r <= m")
    gens = frozenset(v for v in range(1 << m) if v.bit_count() <= r)
    return MonomialCode(m, gens)


def polar_code(spec: FrozenSpec) -> MonomialCode:
    """Monomial code keeping the masks of all non-frozen indices."""
    n = 1 << spec.m
    return MonomialCode(spec.m, frozenset(i for i in range(n) if i not in spec.frozen))


def monomial_min_distance(code: MonomialCode) -> int:
    """Minimum distance of a monomial code: 2^(m - max degree)."""
    if not code.gen_set:
        raise ValueError("empty generating set")
    max_deg = max(v.bit_count() for v in code.gen_set)
    return 1 << (code.m - max_deg)


def monomial_to_linear(code: MonomialCode) -> LinearCode:
    """Generator matrix whose rows evaluate the generating monomials (ascending)."""
    rows = [evaluate_monomial(v, code.m).payload for v in code.sorted_masks()]
    mat = BitMatrix.from_rows(rows, code.n)
    # distinct monomials have independent evaluations
    return LinearCode(mat, validate=False)


def ebch_code(fld: GF2mField, delta: int) -> LinearCode:
    """Extended BCH code of length 2^m from a design-distance parity check.

    The unextended check has a row of j-th powers of each nonzero field
    element for j = 1..delta-2, expanded over the polynomial basis; the
    extension adds the zero element's coordinate and an overall parity row.
    Coordinate x carries the field element whose polynomial-basis mask is x,
    so the ambient translations x -> x + b act as field translations and the
    affine symmetry of the code is visible to the derivative calculus.
    """
    m = fld.m
    n = 1 << m
    if not 2 <= delta <= n - 1:
        raise ValueError(f"design distance must be in [2, {n - 1}]")
    rows: list[int] = [(1 << n) - 1]  # overall parity across all n coordinates
    for j in range(1, delta - 1):
        powers = [fld.pow(x, j) for x in range(n)]  # 0^j = 0 at the extension
        for b in range(m):
            payload = 0
            for x, e in enumerate(powers):
                if (e >> b) & 1:
                    payload |= 1 << x
            rows.append(payload)
    h_ext = BitMatrix.from_rows(rows, n)
    from .bitmath import kernel_basis

    gen = kernel_basis(h_ext)
    return LinearCode(gen, validate=False)


# ---------------------------------------------------------------------------
# Code file format: a one-line header `m=<int> type=monomial|linear` followed
# by one lowercase hex payload per line (bit 0 of the value = coordinate 0;
# for monomial codes the value is the exponent mask).


def save_code(code: MonomialCode | LinearCode, path: str | Path) -> None:
    lines = []
    if isinstance(code, MonomialCode):
        lines.append(f"m={code.m} type=monomial")
        lines.extend(format(v, "x") for v in code.sorted_masks())
    else:
        lines.append(f"m={code.m} type=linear")
        lines.extend(format(r, "x") for r in code.generator.row_ints())
    Path(path).write_text("\n".join(lines) + "\n")


def load_code(path: str | Path) -> MonomialCode | LinearCode:
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise ValueError("empty code file")
    header = dict(part.split("=", 1) for part in text[0].split())
    m = int(header["m"])
    kind = header["type"]
    values = [int(line, 16) for line in text[1:] if line.strip()]
    if kind == "monomial":
        return MonomialCode(m, frozenset(values))
    if kind == "linear":
        return LinearCode(BitMatrix.from_rows(values, 1 << m))
    raise ValueError(f"unknown code type {kind!r}")


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)
