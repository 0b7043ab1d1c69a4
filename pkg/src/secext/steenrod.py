"""The mod 2 Steenrod algebra in the admissible (Serre-Cartan) basis.

A word ``(i1, ..., ik)`` stands for Sq^i1 ... Sq^ik; the empty word is the
unit. Elements are finite sets of admissible words (F_2 coefficients).
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable

Word = tuple[int, ...]


def binom2(n: int, k: int) -> int:
    """Binomial coefficient mod 2 (Lucas)."""
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (k & ~n) == 0 else 0


def is_admissible(w: Word) -> bool:
    return all(w[j] >= 2 * w[j + 1] for j in range(len(w) - 1))


def degree_of(w: Word) -> int:
    return sum(w)


def adem_terms(a: int, b: int) -> list[tuple[int, int]]:
    """Pairs (a+b-k, k) appearing in the Adem relation for Sq^a Sq^b, a < 2b.

    ``k = 0`` yields ``(a+b, 0)``, i.e. the single letter Sq^(a+b).
    """
    out = []
    for k in range(max(0, a - b + 1), min(b - 1, a // 2) + 1):
        if binom2(b - k - 1, a - 2 * k):
            out.append((a + b - k, k))
    return out


@lru_cache(maxsize=None)
def _sq_times(i: int, w: Word) -> frozenset:
    """Sq^i * w for admissible ``w``, expanded in the admissible basis."""
    if i == 0:
        return frozenset((w,))
    if not w or i >= 2 * w[0]:
        return frozenset(((i,) + w,))
    b, rest = w[0], w[1:]
    acc: set = set()
    for top, k in adem_terms(i, b):
        for u in _sq_times(k, rest):
            acc ^= _sq_times(top, u)
    return frozenset(acc)


@lru_cache(maxsize=None)
def _word_times(u: Word, v: Word) -> frozenset:
    """Product of an arbitrary word ``u`` with an admissible word ``v``."""
    if not u:
        return frozenset((v,))
    acc: set = set()
    for x in _word_times(u[1:], v):
        acc ^= _sq_times(u[0], x)
    return frozenset(acc)


def reduce_word(w: Word) -> frozenset:
    """Admissible expansion of an arbitrary word, as a set of words."""
    return _word_times(tuple(w), ())


@lru_cache(maxsize=None)
def admissible_basis(n: int) -> tuple[Word, ...]:
    """All admissible words of degree n, in lexicographic order."""
    if n < 0:
        return ()
    if n == 0:
        return ((),)
    out = []

    def grow(prefix: Word, remaining: int):
        if remaining == 0:
            out.append(prefix)
            return
        # next letter x must satisfy prefix[-1] >= 2x
        hi = remaining if not prefix else min(remaining, prefix[-1] // 2)
        for x in range(1, hi + 1):
            grow(prefix + (x,), remaining - x)

    grow((), n)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def basis_index(n: int) -> dict:
    return {w: i for i, w in enumerate(admissible_basis(n))}


def dimension(n: int) -> int:
    return len(admissible_basis(n))


@lru_cache(maxsize=None)
def product_mask(u: Word, v: Word) -> int:
    """Product of admissible words as a bit vector over admissible_basis(|u|+|v|)."""
    idx = basis_index(sum(u) + sum(v))
    m = 0
    for w in _word_times(u, v):
        m ^= 1 << idx[w]
    return m


class SteenrodElement:
    """Homogeneous element of the Steenrod algebra (a set of admissible words)."""

    __slots__ = ("terms", "_degree")

    def __init__(self, terms: Iterable[Word] = (), degree: int | None = None):
        t = frozenset(tuple(w) for w in terms)
        for w in t:
            if not is_admissible(w) or any(x < 1 for x in w):
                raise ValueError(f"not an admissible word: {w}")
        degs = {sum(w) for w in t}
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous element: degrees {sorted(degs)}")
        if degs:
            d = degs.pop()
            if degree is not None and degree != d:
                raise ValueError(f"degree {degree} does not match terms of degree {d}")
            degree = d
        self.terms = t
        self._degree = degree

    @classmethod
    def _raw(cls, terms: frozenset, degree: int | None) -> "SteenrodElement":
        x = cls.__new__(cls)
        x.terms = terms
        x._degree = degree
        return x

    @classmethod
    def from_word(cls, w: Iterable[int]) -> "SteenrodElement":
        w = tuple(w)
        return cls._raw(reduce_word(w), sum(w))

    @classmethod
    def unit(cls) -> "SteenrodElement":
        return cls._raw(frozenset(((),)), 0)

    @classmethod
    def zero(cls, degree: int | None = None) -> "SteenrodElement":
        return cls._raw(frozenset(), degree)

    @classmethod
    def from_mask(cls, mask: int, degree: int) -> "SteenrodElement":
        basis = admissible_basis(degree)
        terms = []
        j = 0
        while mask:
            if mask & 1:
                terms.append(basis[j])
            mask >>= 1
            j += 1
        return cls._raw(frozenset(terms), degree)

    @property
    def degree(self) -> int | None:
        return self._degree

    def to_mask(self) -> int:
        if not self.terms:
            return 0
        idx = basis_index(self._degree)
        m = 0
        for w in self.terms:
            m |= 1 << idx[w]
        return m

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, SteenrodElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def _check_degree(self, other: "SteenrodElement") -> int | None:
        if self.terms and other.terms and self._degree != other._degree:
            raise ValueError("adding elements of different degrees")
        return self._degree if self._degree is not None else other._degree

    def __add__(self, other: "SteenrodElement") -> "SteenrodElement":
        if isinstance(other, int) and other == 0:
            return self
        d = self._check_degree(other)
        return SteenrodElement._raw(self.terms ^ other.terms, d)

    __radd__ = __add__
    __sub__ = __add__

    def __mul__(self, other: "SteenrodElement") -> "SteenrodElement":
        return multiply(self, other)

    def __repr__(self):
        return f"SteenrodElement({format_element(self)!r})"

    def __str__(self):
        return format_element(self)

    def sorted_terms(self) -> list[Word]:
        return sorted(self.terms, reverse=True)


def Sq(*exponents: int) -> SteenrodElement:
    """Shorthand: Sq(4, 2, 1) is the (reduced) word Sq^4 Sq^2 Sq^1."""
    return SteenrodElement.from_word(exponents)


def adem_reduce(w: Iterable[int]) -> SteenrodElement:
    return SteenrodElement.from_word(w)


def multiply(x: SteenrodElement, y: SteenrodElement) -> SteenrodElement:
    acc: set = set()
    for u in x.terms:
        for v in y.terms:
            acc ^= _word_times(u, v)
    d = None
    if x.degree is not None and y.degree is not None:
        d = x.degree + y.degree
    return SteenrodElement._raw(frozenset(acc), d)


# --- text grammar ------------------------------------------------------------

_WORD_RE = re.compile(r"(?:Sq(\d+))")


def format_word(w: Word) -> str:
    return "".join(f"Sq{x}" for x in w) if w else "1"


def parse_word(s: str) -> Word:
    s = s.strip()
    if s == "1":
        return ()
    if not re.fullmatch(r"(?:Sq\d+)+", s):
        raise ValueError(f"cannot parse monomial {s!r}")
    w = tuple(int(x) for x in _WORD_RE.findall(s))
    if any(x < 1 for x in w):
        raise ValueError(f"Sq exponents must be positive: {s!r}")
    return w


def format_element(x: SteenrodElement) -> str:
    if not x.terms:
        return "0"
    return "+".join(format_word(w) for w in x.sorted_terms())


def parse_element(s: str, degree: int | None = None) -> SteenrodElement:
    """Parse ``Sq3+Sq2Sq1`` style sums; words need not be admissible."""
    s = s.strip()
    if s == "0":
        return SteenrodElement.zero(degree)
    acc: set = set()
    d = degree
    for part in s.split("+"):
        w = parse_word(part)
        if d is None:
            d = sum(w)
        elif sum(w) != d:
            raise ValueError(f"inhomogeneous sum {s!r}")
        acc ^= reduce_word(w)
    return SteenrodElement._raw(frozenset(acc), d)
