"""Minimal free resolution of F_2 over the Steenrod algebra.

Generators are named ``g[m,d,q]``: filtration m, internal degree d, and an
index q counting generators in the same bidegree (q = 0, 1, 2 correspond to
g, 'g, ''g in the usual notation). The basis of the free module F_m in
internal degree t is the list of pairs (generator, admissible word), ordered
by generator (d, q) and then by the admissible basis order.
"""

from __future__ import annotations

import re
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import NamedTuple

from . import gf2core
from .bzero import B0Element, decompose_R, format_b0, lift_chi, parse_b0, project_pi
from .gf2core import F2Matrix, RowSpace
from .steenrod import (
    SteenrodElement,
    admissible_basis,
    format_element,
    parse_element,
    product_mask,
)

FORMAT_HEADER = "format secext-res 1"


class Generator(NamedTuple):
    m: int
    d: int
    q: int = 0

    def __str__(self):
        return f"g[{self.m},{self.d},{self.q}]"

    @property
    def stem(self) -> int:
        return self.d - self.m


def parse_gen(s: str) -> Generator:
    m = re.fullmatch(r"\s*g\[(\d+),(\d+),(\d+)\]\s*", s)
    if not m:
        raise ValueError(f"cannot parse generator {s!r}")
    return Generator(int(m.group(1)), int(m.group(2)), int(m.group(3)))


class FreeElt:
    """Element of a free module: generator -> coefficient.

    Coefficients are SteenrodElements (modules over the Steenrod algebra) or
    B0Elements (modules over the degree-zero pair algebra part).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {g: c for g, c in (terms or {}).items() if not c.is_zero()}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, FreeElt):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: "FreeElt") -> "FreeElt":
        t = dict(self.terms)
        for g, c in other.terms.items():
            t[g] = t[g] + c if g in t else c
        return FreeElt(t)

    def __sub__(self, other: "FreeElt") -> "FreeElt":
        t = dict(self.terms)
        for g, c in other.terms.items():
            t[g] = t[g] - c if g in t else -c if isinstance(c, B0Element) else c
        return FreeElt(t)

    def total_degree(self) -> int | None:
        for g, c in self.terms.items():
            return g.d + c.degree
        return None

    def generators(self):
        return sorted(self.terms)

    def __str__(self):
        return format_free(self)

    def __repr__(self):
        return f"FreeElt({format_free(self)!r})"


def _format_coeff(c) -> str:
    s = format_b0(c) if isinstance(c, B0Element) else format_element(c)
    return f"({s})" if "+" in s else s


def format_free(x: FreeElt) -> str:
    if not x.terms:
        return "0"
    return " + ".join(f"{_format_coeff(x.terms[g])} {g}" for g in sorted(x.terms))


_TERM_RE = re.compile(r"\s*(?:\(([^)]*)\)|([A-Za-z0-9*]+))?\s*g\[(\d+),(\d+),(\d+)\]\s*(?:\+|$)")


def parse_free(s: str, over: str = "A") -> FreeElt:
    """Parse ``Sq3 g[1,1,0] + (Sq4+Sq3Sq1) g[1,4,0]``; ``over`` is "A" or "B0"."""
    s = s.strip()
    if s == "0":
        return FreeElt()
    t = {}
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse free-module element at {s[pos:]!r}")
        g = Generator(int(m.group(3)), int(m.group(4)), int(m.group(5)))
        text = m.group(1) if m.group(1) is not None else (m.group(2) or "1")
        c = parse_b0(text) if over == "B0" else parse_element(text)
        if g in t:
            t[g] = t[g] + c
        else:
            t[g] = c
        pos = m.end()
    return FreeElt(t)


class ResolutionError(ValueError):
    pass


class Resolution:
    """Minimal resolution computed through a rectangle of bidegrees.

    ``max_filt`` and ``max_deg`` bound the filtration m and internal degree d
    of the generators computed so far.
    """

    def __init__(self):
        self.gens: dict[int, list[Generator]] = {}
        self.diff: dict[Generator, FreeElt] = {}
        self.max_filt = -1
        self.max_deg = -1
        self._matrix_cache: dict = {}
        self._dd_cache: dict = {}
        self._lock = threading.Lock()

    # -- bookkeeping --------------------------------------------------------

    def generators(self, m: int, d: int | None = None) -> list[Generator]:
        gs = self.gens.get(m, [])
        if d is None:
            return list(gs)
        return [g for g in gs if g.d == d]

    def all_generators(self) -> list[Generator]:
        return [g for m in sorted(self.gens) for g in self.gens[m]]

    def __contains__(self, g: Generator) -> bool:
        return g in self.diff or g == Generator(0, 0, 0) and 0 in self.gens

    def count(self, m: int, d: int) -> int:
        return sum(1 for g in self.gens.get(m, []) if g.d == d)

    def counts(self) -> dict[tuple[int, int], int]:
        out: dict = {}
        for m, gs in self.gens.items():
            for g in gs:
                out[(m, g.d)] = out.get((m, g.d), 0) + 1
        return out

    def within(self, m: int, d: int) -> bool:
        return 0 <= m <= self.max_filt and 0 <= d <= self.max_deg

    def _add_gen(self, m: int, d: int, diff: FreeElt | None) -> Generator:
        q = self.count(m, d)
        g = Generator(m, d, q)
        self.gens.setdefault(m, []).append(g)
        if diff is not None:
            self.diff[g] = diff
        return g

    # -- module bases and matrices ---------------------------------------------

    def basis(self, m: int, t: int) -> list[tuple[Generator, tuple]]:
        out = []
        for g in self.gens.get(m, []):
            if g.d <= t:
                out.extend((g, a) for a in admissible_basis(t - g.d))
        return out

    def offsets(self, m: int, t: int) -> tuple[dict, int]:
        off = {}
        n = 0
        for g in self.gens.get(m, []):
            if g.d <= t:
                off[g] = n
                n += len(admissible_basis(t - g.d))
        return off, n

    def element_to_vector(self, x: FreeElt, m: int, t: int) -> int:
        off, _ = self.offsets(m, t)
        v = 0
        for g, c in x.terms.items():
            if g not in off:
                raise ResolutionError(f"{g} is not a generator of F_{m} in degree <= {t}")
            v ^= c.to_mask() << off[g]
        return v

    def vector_to_element(self, v: int, m: int, t: int) -> FreeElt:
        off, n = self.offsets(m, t)
        terms = {}
        for g, o in off.items():
            size = len(admissible_basis(t - g.d))
            chunk = (v >> o) & ((1 << size) - 1)
            if chunk:
                terms[g] = SteenrodElement.from_mask(chunk, t - g.d)
        return FreeElt(terms)

    def _diff_masks(self, g: Generator) -> list[tuple[Generator, tuple]]:
        return [(h, tuple(c.terms)) for h, c in self.diff[g].terms.items()]

    def column(self, g: Generator, a: tuple, t: int, target_off: dict) -> int:
        """Image of the basis element a*g under d, as a vector over F_{m-1}(t)."""
        col = 0
        for h, words in self._diff_masks(g):
            acc = 0
            for u in words:
                acc ^= product_mask(a, u)
            col ^= acc << target_off[h]
        return col

    def diff_columns(self, m: int, t: int) -> list[int]:
        """Columns of d_m: F_m(t) -> F_{m-1}(t) (m >= 1)."""
        key = (m, t, len(self.gens.get(m, [])), len(self.gens.get(m - 1, [])))
        hit = self._matrix_cache.get(key)
        if hit is not None:
            return hit
        target_off, _ = self.offsets(m - 1, t)
        cols = []
        for g in self.gens.get(m, []):
            if g.d > t:
                continue
            for a in admissible_basis(t - g.d):
                cols.append(self.column(g, a, t, target_off))
        self._matrix_cache[key] = cols
        return cols

    def diff_matrix(self, m: int, t: int) -> F2Matrix:
        _, nrows = self.offsets(m - 1, t)
        return F2Matrix.from_columns(self.diff_columns(m, t), nrows)

    def augmentation_matrix(self, t: int) -> F2Matrix:
        _, n = self.offsets(0, t)
        return F2Matrix.from_columns([1 if t == 0 else 0] * n, 1)

    def map_matrix(self, m: int, t: int) -> F2Matrix:
        """d_m in degree t, with d_0 the augmentation onto F_2 (in degree 0)."""
        return self.augmentation_matrix(t) if m == 0 else self.diff_matrix(m, t)

    # -- construction -------------------------------------------------------

    def _kernel(self, m: int, t: int) -> list[int]:
        """Kernel basis of d_m in degree t (d_0 = augmentation)."""
        if m == 0:
            _, n = self.offsets(0, t)
            if t == 0:
                return []
            return [1 << j for j in range(n)]
        return gf2core.kernel_basis(self.diff_matrix(m, t))

    def _extend_cell(self, m: int, t: int, kernel: list[int]):
        """Adjoin the generators of F_m in degree t, given ker d_{m-1} in degree t."""
        space = RowSpace()
        for col in self.diff_columns(m, t):
            space.add(col)
        for v in kernel:
            if space.add(v):
                self._add_gen(m, t, self.vector_to_element(v, m - 1, t))

    def extend(self, max_filt: int, max_deg: int, jobs: int = 1) -> "Resolution":
        if max_filt < self.max_filt or max_deg < self.max_deg:
            raise ResolutionError("caps must not shrink the computed frontier")
        if not self.gens:
            self._add_gen(0, 0, None)
        old_f, old_d = self.max_filt, self.max_deg
        for m in range(1, max_filt + 1):
            degrees = [t for t in range(m, max_deg + 1) if not (m <= old_f and t <= old_d)]
            if not degrees:
                continue
            # kernels of d_{m-1} are independent across degrees once F_{m-1} is final
            if jobs > 1:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    kernels = list(pool.map(lambda t: self._kernel(m - 1, t), degrees))
            else:
                kernels = [self._kernel(m - 1, t) for t in degrees]
            for t, ker in zip(degrees, kernels):
                self._extend_cell(m, t, ker)
            self.gens.setdefault(m, [])
        self.gens[0].sort()
        for m in self.gens:
            self.gens[m].sort(key=lambda g: (g.d, g.q))
        self.max_filt, self.max_deg = max(max_filt, 0), max_deg
        self._matrix_cache.clear()
        return self

    # -- lifts to the pair algebra ---------------------------------------------------

    def lifted_diff(self, g: Generator) -> FreeElt:
        if g not in self.diff:
            raise ResolutionError(f"{g} has no differential in this resolution")
        return FreeElt({h: lift_chi(c) for h, c in self.diff[g].terms.items()})

    def dd(self, g: Generator) -> dict:
        """Composite of two lifted differentials: generator -> (R-element, decomposition)."""
        if g.m < 2:
            raise ResolutionError("dd needs filtration >= 2")
        hit = self._dd_cache.get(g)
        if hit is not None:
            return hit
        acc: dict[Generator, B0Element] = {}
        for h, c in self.lifted_diff(g).terms.items():
            for k, e in self.lifted_diff(h).terms.items():
                p = c * e
                acc[k] = acc[k] + p if k in acc else p
        out = {}
        for k in sorted(acc):
            r = acc[k]
            if r.is_zero():
                continue
            if not project_pi(r).is_zero():
                raise ResolutionError(f"dd({g}) has a coefficient outside R on {k}: d o d != 0")
            out[k] = (r, decompose_R(r))
        self._dd_cache[g] = out
        return out

    def dd_element(self, g: Generator) -> FreeElt:
        return FreeElt({k: r for k, (r, _) in self.dd(g).items()})

    # -- invariants ------------------------------------------------------------

    def check_d_squared(self) -> list[Generator]:
        bad = []
        for g in self.all_generators():
            if g.m < 2:
                continue
            acc: dict = {}
            for h, c in self.diff[g].terms.items():
                for k, e in self.diff[h].terms.items():
                    p = c * e
                    acc[k] = acc[k] + p if k in acc else p
            if any(not v.is_zero() for v in acc.values()):
                bad.append(g)
        return bad

    def check_minimal(self) -> list[Generator]:
        return [g for g, x in self.diff.items() if any(c.degree == 0 for c in x.terms.values())]

    def check_exactness(self) -> list[tuple[int, int]]:
        """Positions (m, t) where dim ker d_m != rank d_{m+1}, strictly inside the frontier."""
        bad = []
        for t in range(0, self.max_deg + 1):
            for m in range(0, self.max_filt):
                ker = len(self._kernel(m, t))
                rank = self.diff_matrix(m + 1, t).rank() if self.gens.get(m + 1) else 0
                if ker != rank:
                    bad.append((m, t))
        return bad


def resolve(max_filt: int, max_deg: int, jobs: int = 1) -> Resolution:
    return Resolution().extend(max_filt, max_deg, jobs=jobs)


# --- persistence ---------------------------------------------------------------


def dumps(res: Resolution) -> str:
    lines = [FORMAT_HEADER, f"caps {res.max_filt} {res.max_deg}"]
    gens = res.all_generators()
    lines.extend(f"gen {g.m} {g.d} {g.q}" for g in gens)
    for g in gens:
        if g in res.diff:
            lines.append(f"d {g} = {format_free(res.diff[g])}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Resolution:
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        head = lines[0] if lines else ""
        if head.startswith("format secext-res"):
            raise ResolutionError(f"unsupported resolution file version: {head!r}")
        raise ResolutionError("not a resolution file (missing format header)")
    m = re.fullmatch(r"caps (-?\d+) (-?\d+)", lines[1].strip()) if len(lines) > 1 else None
    if not m:
        raise ResolutionError("missing or malformed caps line")
    res = Resolution()
    res.max_filt, res.max_deg = int(m.group(1)), int(m.group(2))
    gens = []
    diffs = {}
    for lineno, line in enumerate(lines[2:], 3):
        if not line.strip():
            continue
        if line.startswith("gen "):
            parts = line.split()
            if len(parts) != 4:
                raise ResolutionError(f"line {lineno}: malformed generator line")
            gens.append(Generator(*map(int, parts[1:])))
        elif line.startswith("d "):
            mm = re.fullmatch(r"d (g\[\d+,\d+,\d+\]) = (.*)", line)
            if not mm:
                raise ResolutionError(f"line {lineno}: malformed differential line")
            try:
                diffs[parse_gen(mm.group(1))] = parse_free(mm.group(2))
            except ValueError as e:
                raise ResolutionError(f"line {lineno}: {e}") from None
        else:
            raise ResolutionError(f"line {lineno}: unexpected content {line!r}")
    for g in gens:
        res.gens.setdefault(g.m, []).append(g)
        if g.m > 0:
            if g not in diffs:
                raise ResolutionError(f"truncated file: no differential for {g}")
            res.diff[g] = diffs[g]
    for m in range(0, res.max_filt + 1):
        res.gens.setdefault(m, [])
    extra = set(diffs) - set(gens)
    if extra:
        raise ResolutionError(f"differentials for undeclared generators: {sorted(extra)[:3]}")
    for g, x in res.diff.items():
        for h, c in x.terms.items():
            if h not in set(res.gens.get(g.m - 1, [])):
                raise ResolutionError(f"d({g}) refers to unknown generator {h}")
            if h.d + c.degree != g.d:
                raise ResolutionError(f"d({g}) term on {h} has the wrong degree")
    return res


def save(res: Resolution, path):
    Path(path).write_text(dumps(res))


def load(path) -> Resolution:
    return loads(Path(path).read_text())
