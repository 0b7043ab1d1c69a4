"""Degree-zero part of the pair algebra: the free Z/4-algebra on Sq^n (n >= 1).

Its kernel R under the projection to the Steenrod algebra is generated as a
right module by 2 and by the preadmissible relations Sq^{a_k}...Sq^{a_1}[a_0, b];
``decompose_R`` writes elements of R over these generators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .steenrod import (
    SteenrodElement,
    Word,
    adem_terms,
    format_word,
    is_admissible,
    parse_word,
    reduce_word,
)


class B0Element:
    """Z/4-linear combination of words, all of one degree."""

    __slots__ = ("terms", "_degree")

    def __init__(self, terms: dict | Iterable = (), degree: int | None = None):
        items = terms.items() if isinstance(terms, dict) else terms
        t: dict[Word, int] = {}
        for w, c in items:
            w = tuple(w)
            c = (t.get(w, 0) + int(c)) % 4
            if c:
                t[w] = c
            else:
                t.pop(w, None)
        degs = {sum(w) for w in t}
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous element: degrees {sorted(degs)}")
        if degs:
            degree = degs.pop() if degree is None else degree
        self.terms = t
        self._degree = degree

    @classmethod
    def word(cls, w: Iterable[int], coeff: int = 1) -> "B0Element":
        w = tuple(w)
        return cls({w: coeff % 4} if coeff % 4 else {}, sum(w))

    @classmethod
    def unit(cls, coeff: int = 1) -> "B0Element":
        return cls.word((), coeff)

    @classmethod
    def zero(cls, degree: int | None = None) -> "B0Element":
        return cls({}, degree)

    @property
    def degree(self) -> int | None:
        return self._degree

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, B0Element):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _combine(self, other: "B0Element", sign: int) -> "B0Element":
        if self.terms and other.terms and self._degree != other._degree:
            raise ValueError("adding elements of different degrees")
        t = dict(self.terms)
        for w, c in other.terms.items():
            v = (t.get(w, 0) + sign * c) % 4
            if v:
                t[w] = v
            else:
                t.pop(w, None)
        out = B0Element.__new__(B0Element)
        out.terms = t
        out._degree = self._degree if self._degree is not None else other._degree
        return out

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c: int) -> "B0Element":
        out = B0Element.__new__(B0Element)
        out.terms = {w: (v * c) % 4 for w, v in self.terms.items() if (v * c) % 4}
        out._degree = self._degree
        return out

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        t: dict[Word, int] = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                w = u + v
                c = (t.get(w, 0) + a * b) % 4
                if c:
                    t[w] = c
                else:
                    t.pop(w, None)
        out = B0Element.__new__(B0Element)
        out.terms = t
        if self._degree is not None and other._degree is not None:
            out._degree = self._degree + other._degree
        else:
            out._degree = None
        return out

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __repr__(self):
        return f"B0Element({format_b0(self)!r})"

    def __str__(self):
        return format_b0(self)


def project_pi(x: B0Element) -> SteenrodElement:
    """Reduce coefficients mod 2 and words to the admissible basis."""
    acc: set = set()
    for w, c in x.terms.items():
        if c & 1:
            acc ^= reduce_word(w)
    return SteenrodElement._raw(frozenset(acc), x.degree)


def lift_chi(x: SteenrodElement) -> B0Element:
    return B0Element({w: 1 for w in x.terms}, x.degree)


def adem_element(a: int, b: int) -> B0Element:
    """The Adem element [a, b] = Sq^a Sq^b + sum chi(binom) Sq^{a+b-k} Sq^k."""
    if not (0 < a < 2 * b):
        raise ValueError(f"Adem element [{a},{b}] needs 0 < a < 2b")
    t = {(a, b): 1}
    for top, k in adem_terms(a, b):
        w = (top, k) if k else (top,)
        t[w] = (t.get(w, 0) + 1) % 4
    return B0Element(t, a + b)


# --- right generators of R ----------------------------------------------------


@dataclass(frozen=True, order=True)
class RightGenerator:
    """Either the constant 2, or a preadmissible relation prefix * [a0, b]."""

    kind: str  # "two" or "pre"
    prefix: Word = ()
    pair: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind == "two":
            if self.prefix or self.pair is not None:
                raise ValueError("the generator 2 carries no prefix or pair")
            return
        if self.kind != "pre" or self.pair is None:
            raise ValueError(f"bad right generator {self!r}")
        a0, b = self.pair
        if not (0 < a0 < 2 * b):
            raise ValueError(f"pair [{a0},{b}] needs 0 < a0 < 2b")
        if not is_admissible(self.prefix + (a0,)):
            raise ValueError(f"prefix {self.prefix} is not admissible against {a0}")

    @property
    def degree(self) -> int:
        if self.kind == "two":
            return 0
        return sum(self.prefix) + sum(self.pair)

    def expand(self) -> B0Element:
        if self.kind == "two":
            return B0Element.unit(2)
        return B0Element.word(self.prefix) * adem_element(*self.pair)

    def __str__(self):
        if self.kind == "two":
            return "2"
        pre = "".join(f"Sq{x}" for x in self.prefix)
        return f"{pre}[{self.pair[0]},{self.pair[1]}]"


TWO = RightGenerator("two")


def pre(prefix: Iterable[int], a0: int, b: int) -> RightGenerator:
    return RightGenerator("pre", tuple(prefix), (a0, b))


def parse_generator(s: str) -> RightGenerator:
    s = s.strip()
    if s == "2":
        return TWO
    m = re.fullmatch(r"((?:Sq\d+)*)\[(\d+),(\d+)\]", s)
    if not m:
        raise ValueError(f"cannot parse right generator {s!r}")
    prefix = parse_word(m.group(1)) if m.group(1) else ()
    return pre(prefix, int(m.group(2)), int(m.group(3)))


def right_generators(n: int) -> list[RightGenerator]:
    """All right generators of R in degree n, deterministically ordered."""
    if n == 0:
        return [TWO]
    out = []

    def prefixes(total: int, bound: int | None):
        # admissible words of degree `total` whose last letter is >= bound
        if total == 0:
            yield ()
            return
        for w in _admissible_words(total):
            if bound is None or w[-1] >= bound:
                yield w

    for b in range(1, n + 1):
        for a0 in range(1, min(2 * b - 1, n - b) + 1):
            rest = n - a0 - b
            for p in prefixes(rest, 2 * a0):
                out.append(pre(p, a0, b))
    out.sort(key=lambda g: (g.prefix, g.pair))
    return out


def _admissible_words(n: int):
    from .steenrod import admissible_basis

    return admissible_basis(n)


# --- decomposition of R-elements ------------------------------------------------


@dataclass
class RDecomposition:
    parts: list = field(default_factory=list)  # [(RightGenerator, B0Element)]

    def reconstruct(self, degree: int | None = None) -> B0Element:
        acc = B0Element.zero(degree)
        for g, b in self.parts:
            acc = acc + g.expand() * b
        return acc

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


class NotInR(ValueError):
    pass


def first_violation(w: Word) -> int | None:
    for i in range(len(w) - 1):
        if w[i] < 2 * w[i + 1]:
            return i
    return None


def decompose_R(r: B0Element, strategy: str = "leftmost") -> RDecomposition:
    """Write r (with pi(r) = 0) as sum_j generator_j * right_factor_j.

    ``strategy="leftmost"`` splits coefficients as {0,1} + 2*c and rewrites the
    lexicographically smallest inadmissible word first. ``"alternate"`` keeps
    coefficients 3 as they are and rewrites the largest word first; it gives a
    second, generally different decomposition used for cross-checks.
    """
    if not project_pi(r).is_zero():
        raise NotInR(f"element {r} does not project to 0")
    degree = r.degree
    factors: dict[RightGenerator, dict] = {}

    def emit(g: RightGenerator, w: Word, c: int):
        f = factors.setdefault(g, {})
        v = (f.get(w, 0) + c) % 4
        if v:
            f[w] = v
        else:
            f.pop(w, None)

    work: dict[Word, int] = {}
    for w, c in r.terms.items():
        if strategy == "leftmost" and c >= 2:
            emit(TWO, w, 1)
            c -= 2
        elif strategy != "leftmost" and c == 2:
            emit(TWO, w, 1)
            continue
        if c:
            work[w] = c

    pick = min if strategy == "leftmost" else max
    while True:
        bad = [w for w in work if first_violation(w) is not None]
        if not bad:
            break
        w = pick(bad)
        c = work.pop(w)
        i = first_violation(w)
        prefix, (a, b), tail = w[:i], w[i : i + 2], w[i + 2 :]
        emit(pre(prefix, a, b), tail, c)
        # w = prefix [a,b] tail - prefix (adem sum) tail
        for top, k in adem_terms(a, b):
            nw = prefix + ((top, k) if k else (top,)) + tail
            v = (work.get(nw, 0) - c) % 4
            if v:
                work[nw] = v
            else:
                work.pop(nw, None)

    for w, c in work.items():
        if c & 1:
            raise NotInR(f"residual {format_word(w)} has odd coefficient")  # pragma: no cover
        emit(TWO, w, c // 2)

    parts = []
    for g in sorted(factors):
        f = factors[g]
        if f:
            parts.append((g, B0Element(f, degree - g.degree if degree is not None else None)))
    return RDecomposition(parts)


# --- text grammar ------------------------------------------------------------


def format_b0(x: B0Element) -> str:
    if not x.terms:
        return "0"
    parts = []
    for w in sorted(x.terms, reverse=True):
        c = x.terms[w]
        parts.append(format_word(w) if c == 1 else f"{c}*{format_word(w)}")
    return "+".join(parts)


def parse_b0(s: str, degree: int | None = None) -> B0Element:
    s = s.strip()
    if s == "0":
        return B0Element.zero(degree)
    t: dict[Word, int] = {}
    for part in s.split("+"):
        part = part.strip()
        m = re.fullmatch(r"(?:([0-3])\*)?(.+)", part)
        c = int(m.group(1)) if m.group(1) else 1
        w = parse_word(m.group(2))
        t[w] = (t.get(w, 0) + c) % 4
    return B0Element({w: c for w, c in t.items() if c}, degree)
