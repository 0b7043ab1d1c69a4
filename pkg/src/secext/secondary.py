"""Secondary differential delta on a minimal resolution, and d2 / E3 from it.

delta(g) for a generator g = g[m,d,q] (m >= 2) is an element of the free
module on filtration m-2 generators, of internal degree d-1. It is extended
to B0-multiples by

    delta(b g) = pi(b) delta(g) + A(pi(b), dd(g)),

and must satisfy d delta(g) = delta(d g). The unknown coefficients of delta(g)
are exactly the coordinates of F_{m-2} in degree d-1, so each generator
gives a linear system whose matrix is the resolution differential
d_{m-2} in degree d-1.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import gf2core
from .amap import ATable, eval_A
from .bzero import B0Element, project_pi
from .gf2core import F2Matrix
from .resolution import FreeElt, Generator, Resolution, format_free, parse_free, parse_gen
from .steenrod import format_word, multiply


class DeltaError(ValueError):
    pass


class InconsistentSolve(DeltaError):
    def __init__(self, gen: Generator, residual: FreeElt):
        self.gen = gen
        self.residual = residual
        super().__init__(f"INCONSISTENT({gen}): no delta satisfies d delta = delta d; rhs {format_free(residual)}")


@dataclass
class EtaSystem:
    """The linear conditions on the unknown coefficients of delta(gen)."""

    gen: Generator
    unknowns: list  # [(target generator, admissible word)]
    matrix: F2Matrix
    rhs: int
    solution: gf2core.Solution

    def index(self, target: Generator, word: tuple) -> int:
        return self.unknowns.index((target, tuple(word)))

    def is_free(self, j: int) -> bool:
        return any((k >> j) & 1 for k in self.solution.kernel)

    def forced_value(self, j: int) -> int | None:
        """Value of unknown j if every solution agrees on it, else None."""
        if not self.solution.consistent or self.is_free(j):
            return None
        return (self.solution.particular >> j) & 1

    def label(self, j: int) -> str:
        h, w = self.unknowns[j]
        return f"eta_{self.gen}({format_word(w)}, {h})"


@dataclass
class DeltaTable:
    delta: dict = field(default_factory=dict)  # Generator -> FreeElt over the Steenrod algebra
    systems: dict = field(default_factory=dict)  # Generator -> EtaSystem (solved tables only)
    max_deg: int = -1
    inconsistent: Generator | None = None  # set when a solve failed

    def __getitem__(self, g: Generator) -> FreeElt:
        return self.delta[g]

    def __contains__(self, g):
        return g in self.delta

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.delta.values())


def check_shape(g: Generator, x: FreeElt):
    if g.m < 2:
        raise DeltaError(f"delta is only defined on filtration >= 2, got {g}")
    for h, c in x.terms.items():
        if h.m != g.m - 2:
            raise DeltaError(f"delta({g}) has a term on {h}, expected filtration {g.m - 2}")
        if h.d + c.degree != g.d - 1:
            raise DeltaError(f"delta({g}) term on {h} has total degree {h.d + c.degree}, expected {g.d - 1}")


def delta_of(g: Generator, table: DeltaTable) -> FreeElt:
    if g.m < 2:
        return FreeElt()
    try:
        return table.delta[g]
    except KeyError:
        raise DeltaError(f"missing delta entry for {g}") from None


def delta_on_module_elt(x: FreeElt, table: DeltaTable, A: ATable, res: Resolution) -> FreeElt:
    """delta on a B0-combination of generators of one filtration."""
    acc: dict = {}

    def add(h, c):
        if c.is_zero():
            return
        acc[h] = acc[h] + c if h in acc else c

    for g, b in x.terms.items():
        if g.m < 2:
            continue
        a = project_pi(b) if isinstance(b, B0Element) else b
        if a.is_zero():
            continue
        for h, c in delta_of(g, table).terms.items():
            add(h, multiply(a, c))
        if not A.is_zero:
            for k, (r, _) in res.dd(g).items():
                add(k, eval_A(a, r, A))
    return FreeElt(acc)


def _push(res: Resolution, x: FreeElt) -> FreeElt:
    """Apply the resolution differential to an element over the Steenrod algebra."""
    acc: dict = {}
    for g, a in x.terms.items():
        if g.m == 0:
            continue  # augmentation: kills positive degrees, and delta has degree >= 1
        for h, c in res.diff[g].terms.items():
            p = multiply(a, c)
            if not p.is_zero():
                acc[h] = acc[h] + p if h in acc else p
    return FreeElt(acc)


def build_system(res: Resolution, A: ATable, g: Generator, table: DeltaTable) -> EtaSystem:
    m, d = g.m, g.d
    unknowns = res.basis(m - 2, d - 1)
    if m == 2:
        # the target of d from filtration 0 is F_2 in degree 0: no conditions
        mat = F2Matrix.zeros(0, len(unknowns))
        rhs = 0
    else:
        mat = res.diff_matrix(m - 2, d - 1)
        rhs_elt = delta_on_module_elt(res.lifted_diff(g), table, A, res)
        rhs = res.element_to_vector(rhs_elt, m - 3, d - 1)
    sol = gf2core.solve(mat, rhs)
    return EtaSystem(g, unknowns, mat, rhs, sol)


def solve_generator(res: Resolution, A: ATable, g: Generator, table: DeltaTable) -> tuple[FreeElt, EtaSystem]:
    system = build_system(res, A, g, table)
    if not system.solution.consistent:
        raise InconsistentSolve(g, res.vector_to_element(system.rhs, g.m - 3, g.d - 1))
    value = res.vector_to_element(system.solution.particular, g.m - 2, g.d - 1)
    return value, system


def solve_degree(res: Resolution, A: ATable, d: int, partial: DeltaTable, jobs: int = 1) -> DeltaTable:
    """Solve for delta on all generators of internal degree d (filtration >= 2)."""
    if partial.max_deg < d - 1:
        raise DeltaError(f"delta must be complete below degree {d} (have {partial.max_deg})")
    if d > res.max_deg:
        raise DeltaError(f"resolution only reaches degree {res.max_deg}")
    gens = sorted((g for m in range(2, res.max_filt + 1) for g in res.generators(m, d)), key=lambda g: (g.m, g.q))
    try:
        if jobs > 1 and len(gens) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(lambda g: solve_generator(res, A, g, partial), gens))
        else:
            results = [solve_generator(res, A, g, partial) for g in gens]
    except InconsistentSolve as e:
        partial.inconsistent = e.gen
        raise
    for g, (value, system) in zip(gens, results):
        partial.delta[g] = value
        partial.systems[g] = system
    partial.max_deg = d
    return partial


def solve_through(res: Resolution, A: ATable, max_deg: int | None = None, jobs: int = 1) -> DeltaTable:
    max_deg = res.max_deg if max_deg is None else max_deg
    table = DeltaTable(max_deg=1)
    for d in range(2, max_deg + 1):
        solve_degree(res, A, d, table, jobs=jobs)
    table.max_deg = max(table.max_deg, max_deg)
    return table


def maineq_residual(res: Resolution, table: DeltaTable, A: ATable, g: Generator) -> FreeElt:
    """d delta(g) - delta(d g); zero for a valid secondary resolution."""
    lhs = _push(res, delta_of(g, table))
    rhs = delta_on_module_elt(res.lifted_diff(g), table, A, res) if g.m >= 3 else FreeElt()
    return lhs + rhs


def check_maineq(res: Resolution, table: DeltaTable, A: ATable) -> list[Generator]:
    return [g for g in sorted(table.delta) if not maineq_residual(res, table, A, g).is_zero()]


# --- d2 and E3 --------------------------------------------------------------------


@dataclass
class D2Map:
    arrows: set = field(default_factory=set)  # {(source, target)}

    def __len__(self):
        return len(self.arrows)

    def sorted_arrows(self) -> list:
        return sorted(self.arrows, key=lambda st: (st[0].d, st[0].m, st[0].q, st[1]))

    def sources(self, m: int, d: int) -> list:
        return [s for s, _ in self.arrows if (s.m, s.d) == (m, d)]

    def matrix(self, m: int, d: int, res: Resolution | None = None) -> tuple[list, list, F2Matrix]:
        """d2 from bidegree (m, d) to (m+2, d+1) in the dual basis of generators."""
        if res is not None:
            src = res.generators(m, d)
            tgt = res.generators(m + 2, d + 1)
        else:
            src = sorted({s for s, _ in self.arrows if (s.m, s.d) == (m, d)})
            tgt = sorted({t for s, t in self.arrows if (t.m, t.d) == (m + 2, d + 1)})
        cols = []
        for s in src:
            v = 0
            for i, t in enumerate(tgt):
                if (s, t) in self.arrows:
                    v |= 1 << i
            cols.append(v)
        return src, tgt, F2Matrix.from_columns(cols, len(tgt))

    def check_square_zero(self, res: Resolution | None = None) -> list[tuple[int, int]]:
        bad = []
        for m, d in sorted({(s.m, s.d) for s, _ in self.arrows}):
            _, mid, first = self.matrix(m, d, res)
            if not mid:
                continue
            _, _, second = self.matrix(m + 2, d + 1, res)
            if second.ncols != first.nrows:
                # targets of the first map that emit nothing: pad to the middle basis
                mid2, _, second = self._matrix_from_sources(mid, m + 2, d + 1, res)
            if any((second @ first).rows_bits):
                bad.append((m, d))
        return bad

    def _matrix_from_sources(self, src, m, d, res):
        if res is not None:
            tgt = res.generators(m + 2, d + 1)
        else:
            tgt = sorted({t for s, t in self.arrows if s in set(src)})
        cols = []
        for s in src:
            v = 0
            for i, t in enumerate(tgt):
                if (s, t) in self.arrows:
                    v |= 1 << i
            cols.append(v)
        return src, tgt, F2Matrix.from_columns(cols, len(tgt))


def extract_d2(table: DeltaTable) -> D2Map:
    """Arrows g[m,d] -> g[m+2,d+1] for unit-coefficient terms of delta(g[m+2,d+1])."""
    arrows = set()
    for target, x in table.delta.items():
        for h, c in x.terms.items():
            if c.degree == 0 and not c.is_zero():
                if (h.m, h.d) != (target.m - 2, target.d - 1):
                    raise DeltaError(f"unit term on {h} in delta({target}) has mismatched bidegree")
                arrows.add((h, target))
    return D2Map(arrows)


@dataclass
class E3Entry:
    m: int
    d: int
    e2: int
    e3: int

    @property
    def stem(self) -> int:
        return self.d - self.m


def e3_dimensions(res: Resolution, d2: D2Map) -> dict[tuple[int, int], E3Entry]:
    for s, t in d2.arrows:
        for g in (s, t):
            if not res.within(g.m, g.d) or g not in set(res.generators(g.m)):
                raise DeltaError(f"d2 arrow endpoint {g} lies outside the resolution")
    out = {}
    for (m, d), e2 in sorted(res.counts().items()):
        out_rank = d2.matrix(m, d, res)[2].rank() if res.within(m + 2, d + 1) else 0
        in_rank = d2.matrix(m - 2, d - 1, res)[2].rank() if m >= 2 else 0
        out[(m, d)] = E3Entry(m, d, e2, e2 - out_rank - in_rank)
    return out


# --- file formats --------------------------------------------------------------------


def _gen_key(g: Generator):
    return (g.d, g.m, g.q)


def dump_delta(table: DeltaTable) -> str:
    lines = [f"delta {g} = {format_free(table.delta[g])}" for g in sorted(table.delta, key=_gen_key)]
    return "\n".join(lines) + "\n"


def parse_delta(text: str, res: Resolution | None = None) -> DeltaTable:
    table = DeltaTable()
    known = set(res.all_generators()) if res is not None else None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"delta\s+(g\[\d+,\d+,\d+\])\s*=\s*(.*)", line)
        if not m:
            raise DeltaError(f"line {lineno}: cannot parse {raw!r}")
        try:
            g = parse_gen(m.group(1))
            x = parse_free(m.group(2))
        except ValueError as e:
            raise DeltaError(f"line {lineno}: {e}") from None
        if g in table.delta:
            raise DeltaError(f"line {lineno}: duplicate entry for {g}")
        check_shape(g, x)
        if known is not None:
            for h in [g, *x.terms]:
                if h not in known:
                    raise DeltaError(f"line {lineno}: unknown generator {h}")
        table.delta[g] = x
        table.max_deg = max(table.max_deg, g.d)
    return table


def import_delta(path, res: Resolution | None = None) -> DeltaTable:
    return parse_delta(Path(path).read_text(), res)


def export_delta(table: DeltaTable, path):
    Path(path).write_text(dump_delta(table))


def dump_d2(d2: D2Map) -> str:
    return "".join(f"d2 {s} -> {t}\n" for s, t in d2.sorted_arrows())


def parse_d2(text: str) -> D2Map:
    arrows = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"d2\s+(g\[\d+,\d+,\d+\])\s*->\s*(g\[\d+,\d+,\d+\])", line)
        if not m:
            raise DeltaError(f"line {lineno}: cannot parse {raw!r}")
        s, t = parse_gen(m.group(1)), parse_gen(m.group(2))
        if (t.m, t.d) != (s.m + 2, s.d + 1):
            raise DeltaError(f"line {lineno}: d2 must raise (m, d) by (2, 1)")
        arrows.add((s, t))
    return D2Map(arrows)


def load_d2(path) -> D2Map:
    return parse_d2(Path(path).read_text())


def save_d2(d2: D2Map, path):
    Path(path).write_text(dump_d2(d2))
