"""The multiplication map A: Steenrod x R -> Steenrod of degree -1.

Only generator values A(Sq^n, rho) are stored; everything else follows from

* right rule: A(a, rho * b) = A(a, rho) * pi(b)
* left rule:  A(Sq^n * w, r) = A(Sq^n, w * r) + Sq^n * A(w, r),   A(1, r) = 0

Well-definedness of these rules for a given table is checked by
``validate_table`` rather than assumed.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from pathlib import Path

from .bzero import (
    B0Element,
    RightGenerator,
    decompose_R,
    lift_chi,
    parse_generator,
    project_pi,
    right_generators,
)
from .steenrod import (
    SteenrodElement,
    Word,
    admissible_basis,
    format_element,
    is_admissible,
    multiply,
    parse_element,
)


class ATableError(ValueError):
    pass


class MissingEntry(ATableError):
    pass


class InconsistentA(ATableError):
    pass


class ATable:
    def __init__(self, entries: dict | None = None, max_degree: int | None = 0, zero: bool = False):
        self.entries: dict[tuple[int, RightGenerator], SteenrodElement] = dict(entries or {})
        self.max_degree = max_degree  # None = unbounded (only for the zero table)
        self.is_zero = zero
        self._word_cache: dict = {}
        self._sq_cache: dict = {}
        for (n, g), v in self.entries.items():
            check_entry_degree(n, g, v)
            if max_degree is not None and n + g.degree > max_degree:
                raise ATableError(f"entry A(Sq{n}, {g}) lies beyond maxdeg {max_degree}")

    @classmethod
    def zero(cls) -> "ATable":
        return cls({}, None, zero=True)

    def all_zero(self) -> bool:
        return self.is_zero or all(v.is_zero() for v in self.entries.values())

    def lookup(self, n: int, g: RightGenerator) -> SteenrodElement:
        if self.is_zero:
            return SteenrodElement.zero(n + g.degree - 1)
        v = self.entries.get((n, g))
        if v is None:
            raise MissingEntry(f"no table entry for A(Sq{n}, {g})")
        return v

    def expected_keys(self) -> list[tuple[int, RightGenerator]]:
        if self.max_degree is None:
            return []
        keys = []
        for total in range(1, self.max_degree + 1):
            for gdeg in range(0, total):
                for g in right_generators(gdeg):
                    keys.append((total - gdeg, g))
        return keys

    def missing_entries(self) -> list[tuple[int, RightGenerator]]:
        return [k for k in self.expected_keys() if k not in self.entries]

    def with_entry(self, n: int, g: RightGenerator, value: SteenrodElement) -> "ATable":
        entries = dict(self.entries)
        entries[(n, g)] = value
        md = self.max_degree
        if md is not None:
            md = max(md, n + g.degree)
        return ATable(entries, md)

    def content_key(self) -> str:
        return "zero" if self.is_zero else dump_table(self)

    # -- evaluation -------------------------------------------------------

    def _check_degree(self, total: int):
        if self.max_degree is not None and total > self.max_degree:
            raise MissingEntry(f"A needed in degree {total}, table reaches {self.max_degree}")

    def sq_on_r(self, n: int, r: B0Element, strategy: str = "leftmost") -> SteenrodElement:
        """A(Sq^n, r) through an R-decomposition of r."""
        out_deg = n + (r.degree or 0) - 1
        if self.is_zero or r.is_zero():
            return SteenrodElement.zero(out_deg)
        self._check_degree(n + r.degree)
        key = (n, frozenset(r.terms.items()), strategy)
        hit = self._sq_cache.get(key)
        if hit is not None:
            return hit
        acc = SteenrodElement.zero(out_deg)
        for g, b in decompose_R(r, strategy):
            pb = project_pi(b)
            if pb.is_zero():
                continue
            acc = acc + multiply(self.lookup(n, g), pb)
        self._sq_cache[key] = acc
        return acc

    def word_on_gen(self, w: Word, g: RightGenerator) -> SteenrodElement:
        """A(w, g) for an arbitrary (not necessarily admissible) word w."""
        out_deg = sum(w) + g.degree - 1
        if not w or self.is_zero:
            return SteenrodElement.zero(out_deg)
        key = (w, g)
        hit = self._word_cache.get(key)
        if hit is not None:
            return hit
        if len(w) == 1:
            self._check_degree(w[0] + g.degree)
            val = self.lookup(w[0], g)
        else:
            n, tail = w[0], w[1:]
            val = self.sq_on_r(n, B0Element.word(tail) * g.expand())
            val = val + multiply(SteenrodElement.from_word((n,)), self.word_on_gen(tail, g))
        self._word_cache[key] = val
        return val

    def word_on_r(self, w: Word, r: B0Element, strategy: str = "leftmost") -> SteenrodElement:
        out_deg = sum(w) + (r.degree or 0) - 1
        acc = SteenrodElement.zero(out_deg)
        if self.is_zero or r.is_zero() or not w:
            return acc
        for g, b in decompose_R(r, strategy):
            pb = project_pi(b)
            if pb.is_zero():
                continue
            acc = acc + multiply(self.word_on_gen(w, g), pb)
        return acc


def check_entry_degree(n: int, g: RightGenerator, v: SteenrodElement):
    if n < 1:
        raise ATableError(f"A(Sq{n}, {g}): exponent must be positive")
    want = n + g.degree - 1
    if not v.is_zero() and v.degree != want:
        raise ATableError(f"A(Sq{n}, {g}) = {v} has degree {v.degree}, expected {want}")


def eval_A(a: SteenrodElement, r: B0Element, table: ATable, strict: bool = False) -> SteenrodElement:
    """Evaluate A(a, r) for homogeneous a and r in R."""
    out_deg = None
    if a.degree is not None and r.degree is not None:
        out_deg = a.degree + r.degree - 1
    if table.is_zero or a.is_zero() or r.is_zero():
        if not project_pi(r).is_zero():
            raise ValueError("second argument of A must lie in R")
        return SteenrodElement.zero(out_deg)
    acc = SteenrodElement.zero(out_deg)
    for w in a.terms:
        acc = acc + table.word_on_r(w, r)
    if strict:
        other = SteenrodElement.zero(out_deg)
        for w in a.terms:
            other = other + table.word_on_r(w, r, "alternate")
        if other != acc:
            raise InconsistentA(f"A({a}, {r}) depends on the R-decomposition: {acc} vs {other}")
    return acc


# --- file format ------------------------------------------------------------------


def _entry_sort_key(item):
    (n, g), _ = item
    return (n + g.degree, n, g.kind != "two", g.prefix, g.pair or (0, 0))


def dump_table(t: ATable) -> str:
    lines = [f"maxdeg {t.max_degree if t.max_degree is not None else 0}"]
    for (n, g), v in sorted(t.entries.items(), key=_entry_sort_key):
        lines.append(f"A Sq{n} {g} = {format_element(v)}")
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> ATable:
    max_degree = None
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("maxdeg"):
            m = re.fullmatch(r"maxdeg\s+(\d+)", line)
            if not m or max_degree is not None:
                raise ATableError(f"line {lineno}: bad maxdeg header {raw!r}")
            max_degree = int(m.group(1))
            continue
        m = re.fullmatch(r"A\s+Sq(\d+)\s+(\S+)\s*=\s*(.+)", line)
        if not m:
            raise ATableError(f"line {lineno}: cannot parse {raw!r}")
        n = int(m.group(1))
        try:
            g = parse_generator(m.group(2))
            v = parse_element(m.group(3))
        except ValueError as e:
            raise ATableError(f"line {lineno}: {e}") from None
        if (n, g) in entries:
            raise ATableError(f"line {lineno}: duplicate entry A(Sq{n}, {g})")
        try:
            check_entry_degree(n, g, v)
        except ATableError as e:
            raise ATableError(f"line {lineno}: {e}") from None
        if v.is_zero():
            v = SteenrodElement.zero(n + g.degree - 1)
        entries[(n, g)] = v
    if max_degree is None:
        raise ATableError("missing 'maxdeg <N>' header")
    return ATable(entries, max_degree)


def load_table(path) -> ATable:
    if str(path) == "zero":
        return ATable.zero()
    return parse_table(Path(path).read_text())


def save_table(t: ATable, path):
    Path(path).write_text(dump_table(t))


def zero_table_file(max_degree: int) -> ATable:
    """A complete all-zero table through max_degree (explicit entries)."""
    entries = {}
    for total in range(1, max_degree + 1):
        for gdeg in range(0, total):
            for g in right_generators(gdeg):
                n = total - gdeg
                entries[(n, g)] = SteenrodElement.zero(n + gdeg - 1)
    return ATable(entries, max_degree)


# --- validation -------------------------------------------------------------------


@dataclass
class ValidationReport:
    cap: int
    checks: int = 0
    violations: list = field(default_factory=list)
    missing: list = field(default_factory=list)
    unevaluable: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = [f"cap {self.cap}: {self.checks} checks, {len(self.violations)} violations"]
        if self.missing:
            out.append(f"{len(self.missing)} table entries missing below maxdeg")
        if self.unevaluable:
            out.append(f"{self.unevaluable} samples skipped for missing entries")
        out.extend(f"violation: {v}" for v in self.violations)
        return out


def _compositions(n: int):
    if n == 0:
        yield ()
        return
    for i in range(1, n + 1):
        for c in _compositions(n - i):
            yield (i,) + c


def _random_word(rng: random.Random, n: int) -> Word:
    w = []
    while n:
        x = rng.randint(1, n)
        w.append(x)
        n -= x
    return tuple(w)


def random_r_element(rng: random.Random, n: int, nterms: int = 4) -> B0Element:
    """Random element of R in degree n: x - chi(pi(x)) for random x."""
    x = B0Element({_random_word(rng, n): rng.randint(1, 3) for _ in range(nterms)}, n)
    return x - lift_chi(project_pi(x))


def validate_table(t: ATable, cap: int, samples: int = 200, seed: int = 0) -> ValidationReport:
    """Check left/right-rule consistency of a table up to total degree ``cap``.

    (i)  A(a, r) must not depend on the R-decomposition of r; also
         A(Sq^n, rho * w) = A(Sq^n, rho) * pi(w) through a fresh decomposition.
    (ii) A(v, r) computed from a non-admissible word v by the left recursion
         must equal A evaluated on the admissible expansion of v.
    """
    rep = ValidationReport(cap)
    if t.max_degree is not None:
        cap = min(cap, t.max_degree)
        rep.missing = t.missing_entries()
    rng = random.Random(seed)

    def record(desc, lhs, rhs):
        rep.checks += 1
        if lhs != rhs:
            rep.violations.append(f"{desc}: {format_element(lhs)} != {format_element(rhs)}")

    def attempt(fn):
        try:
            fn()
        except MissingEntry:
            rep.unevaluable += 1

    # (i) exhaustive right-factor rule on short tails
    for total in range(1, cap + 1):
        for gdeg in range(0, total):
            for g in right_generators(gdeg):
                for tdeg in range(1, total - gdeg):
                    n = total - gdeg - tdeg
                    for tail in admissible_basis(tdeg)[:3]:
                        r = g.expand() * B0Element.word(tail)

                        def check(n=n, g=g, tail=tail, r=r):
                            lhs = t.sq_on_r(n, r)
                            rhs = multiply(t.lookup(n, g), SteenrodElement.from_word(tail))
                            record(f"A(Sq{n}, {g}*{tail}) right rule", lhs, rhs)

                        attempt(check)

    # (ii) exhaustive left rule on two-letter inadmissible words against generators
    for total in range(2, cap + 1):
        for gdeg in range(0, total - 1):
            for g in right_generators(gdeg):
                wdeg = total - gdeg
                for v in _compositions(wdeg):
                    if len(v) != 2 or is_admissible(v):
                        continue

                    def check(v=v, g=g):
                        lhs = t.word_on_gen(v, g)
                        rhs = SteenrodElement.zero(lhs.degree)
                        for w in SteenrodElement.from_word(v).terms:
                            rhs = rhs + t.word_on_gen(w, g)
                        record(f"A({v}, {g}) left rule", lhs, rhs)

                    attempt(check)

    # randomized: both rules against random R-elements
    for _ in range(samples):
        rdeg = rng.randint(2, max(2, cap))
        adeg = rng.randint(1, max(1, cap - rdeg))
        if adeg + rdeg > cap:
            continue
        r = random_r_element(rng, rdeg)
        if r.is_zero():
            continue
        basis = admissible_basis(adeg)
        a = SteenrodElement([rng.choice(basis)])
        v = _random_word(rng, adeg)

        def check(a=a, r=r, v=v):
            lhs = eval_A(a, r, t)
            rhs = SteenrodElement.zero(lhs.degree)
            for w in a.terms:
                rhs = rhs + t.word_on_r(w, r, "alternate")
            record(f"A({a}, {r}) decomposition independence", lhs, rhs)
            lit = t.word_on_r(v, r)
            red = eval_A(SteenrodElement.from_word(v), r, t)
            record(f"A({v}, {r}) word representative", lit, red)

        attempt(check)
    return rep
