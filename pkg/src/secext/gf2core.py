"""Exact linear algebra over F_2 and the scalar maps between Z/4 and F_2.

Vectors are plain Python ints used as bit sets (bit ``j`` is coordinate ``j``),
so row operations are single word-level XORs on arbitrarily long rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def bits_to_int(bits: Iterable[int]) -> int:
    v = 0
    for j, b in enumerate(bits):
        if b & 1:
            v |= 1 << j
    return v


def int_to_bits(v: int, n: int) -> list[int]:
    return [(v >> j) & 1 for j in range(n)]


def iter_bits(v: int):
    """Yield the set bit positions of ``v`` in increasing order."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


@dataclass(frozen=True)
class F2Matrix:
    """Dense row-major matrix over F_2; row ``i`` is the int ``rows_bits[i]``."""

    nrows: int
    ncols: int
    rows_bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows_bits) != self.nrows:
            raise ValueError(f"expected {self.nrows} rows, got {len(self.rows_bits)}")
        limit = 1 << self.ncols
        for r in self.rows_bits:
            if r < 0 or r >= limit:
                raise ValueError("row has bits outside the column range")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "F2Matrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(bits_to_int(r) for r in rows))

    @classmethod
    def from_int_rows(cls, rows: Iterable[int], ncols: int) -> "F2Matrix":
        rows = tuple(rows)
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, cols: Sequence[int], nrows: int) -> "F2Matrix":
        """Build from column bit vectors (bit ``i`` of ``cols[j]`` is entry (i, j))."""
        rows = [0] * nrows
        for j, c in enumerate(cols):
            for i in iter_bits(c):
                if i >= nrows:
                    raise ValueError("column has bits outside the row range")
                rows[i] |= 1 << j
        return cls(nrows, len(cols), tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "F2Matrix":
        return cls(nrows, ncols, (0,) * nrows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"entry ({i}, {j}) outside {self.nrows}x{self.ncols}")
        return (self.rows_bits[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [int_to_bits(r, self.ncols) for r in self.rows_bits]

    def columns(self) -> list[int]:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows_bits):
            for j in iter_bits(r):
                cols[j] |= 1 << i
        return cols

    def transpose(self) -> "F2Matrix":
        return F2Matrix(self.ncols, self.nrows, tuple(self.columns()))

    def apply(self, x: int) -> int:
        """Matrix times column vector ``x`` (an int over the columns)."""
        out = 0
        for i, r in enumerate(self.rows_bits):
            if (r & x).bit_count() & 1:
                out |= 1 << i
        return out

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        rows = []
        for r in self.rows_bits:
            acc = 0
            for k in iter_bits(r):
                acc ^= other.rows_bits[k]
            rows.append(acc)
        return F2Matrix(self.nrows, other.ncols, tuple(rows))

    def rank(self) -> int:
        return rref(self)[0]


def _eliminate(rows: list[int]) -> tuple[list[int], list[int]]:
    """Gauss-Jordan on a private row list; returns (pivot rows, pivot columns).

    The pivot of a row is its lowest set bit. Pivot rows are kept fully
    reduced, so the result is the reduced row-echelon form.
    """
    pivots: dict[int, int] = {}
    for r in rows:
        for c, p in pivots.items():
            if (r >> c) & 1:
                r ^= p
        if not r:
            continue
        low = (r & -r).bit_length() - 1
        for c, p in pivots.items():
            if (p >> low) & 1:
                pivots[c] = p ^ r
        pivots[low] = r
    cols = sorted(pivots)
    return [pivots[c] for c in cols], cols


def rref(m: F2Matrix) -> tuple[int, F2Matrix, list[int]]:
    reduced, pivots = _eliminate(list(m.rows_bits))
    rank = len(reduced)
    rows = tuple(reduced) + (0,) * (m.nrows - rank)
    return rank, F2Matrix(m.nrows, m.ncols, rows), pivots


def kernel_basis(m: F2Matrix) -> list[int]:
    """Basis of {x : m x = 0}, one vector per free column in increasing order.

    The vector for free column ``f`` has bit ``f`` set and otherwise only
    pivot-column bits.
    """
    reduced, pivots = _eliminate(list(m.rows_bits))
    pivot_set = set(pivots)
    out = []
    for f in range(m.ncols):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, c in zip(reduced, pivots):
            if (r >> f) & 1:
                v |= 1 << c
        out.append(v)
    return out


@dataclass(frozen=True)
class Solution:
    consistent: bool
    particular: int | None
    kernel: list[int]


def solve(m: F2Matrix, rhs: int | Sequence[int]) -> Solution:
    """Solve ``m x = rhs``; free variables of the particular solution are 0."""
    if not isinstance(rhs, int):
        if len(rhs) != m.nrows:
            raise ValueError("rhs length must equal the row count")
        rhs = bits_to_int(rhs)
    elif rhs >> m.nrows:
        raise ValueError("rhs has bits beyond the row count")
    # eliminate the augmented matrix with the rhs in the top column
    n = m.ncols
    aug = [r | (((rhs >> i) & 1) << n) for i, r in enumerate(m.rows_bits)]
    reduced, pivots = _eliminate(aug)
    if pivots and pivots[-1] == n:
        return Solution(False, None, kernel_basis(m))
    x = 0
    for r, c in zip(reduced, pivots):
        if (r >> n) & 1:
            x |= 1 << c
    return Solution(True, x, kernel_basis(m))


class RowSpace:
    """Incrementally maintained echelon basis; used for image/complement tests."""

    def __init__(self):
        self._pivots: dict[int, int] = {}

    def __len__(self):
        return len(self._pivots)

    def reduce(self, v: int) -> int:
        """Remainder of ``v`` modulo the span (pivot = highest bit)."""
        out = 0
        while v:
            top = v.bit_length() - 1
            p = self._pivots.get(top)
            if p is None:
                out |= 1 << top
                v ^= 1 << top
            else:
                v ^= p
        return out

    def add(self, v: int) -> bool:
        """Insert ``v``; returns False if it was already in the span."""
        v = self.reduce(v)
        if not v:
            return False
        self._pivots[v.bit_length() - 1] = v
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0


# --- Z/4 and the maps pi, i, chi -------------------------------------------


@dataclass(frozen=True)
class ScalarZ4:
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % 4)

    def __add__(self, other):
        return ScalarZ4(self.value + _z4(other))

    def __mul__(self, other):
        return ScalarZ4(self.value * _z4(other))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return ScalarZ4(-self.value)

    def pi(self) -> int:
        return pi(self.value)


def _z4(x) -> int:
    return x.value if isinstance(x, ScalarZ4) else int(x)


def pi(c: int) -> int:
    """Reduction Z/4 -> F_2."""
    return c & 1


def chi(bit: int) -> int:
    """Set-theoretic section F_2 -> Z/4 with chi(0)=0, chi(1)=1."""
    return bit & 1


def embed_two(bit: int) -> int:
    """The isomorphism F_2 -> 2Z/4."""
    return 2 * (bit & 1)
