"""Secondary complex of free pair-algebra modules built from (resolution, delta, A).

Level m carries B0<g_m> in degree 0 and (R + Sigma A)<g_m> in degree 1, with
d0 the lifted differentials and H(g) = (dd(g), delta(g)). Two things are
checked:

* the defining identities on generators, with Z/4 arithmetic on the R side:
    d0 d0 = partial H          (the R component of H is dd)
    H d0  = d1 H               (R component: associativity; A component: d delta = delta d)
* exactness of the total complex. After eliminating R this is the mapping
  cone of delta-bar: A<g_m> -> Sigma A<g_{m-2}>, i.e. the F_2 complex
      T_n(t) = F_n(t) + F_{n-1}(t-1),   D(x, y) = (dx, delta-bar(x) + dy),
  and exactness is checked by ranks at every interior position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .amap import ATable, eval_A
from .bzero import project_pi
from .gf2core import F2Matrix
from .resolution import FreeElt, Generator, Resolution, format_free
from .secondary import DeltaTable
from .steenrod import SteenrodElement, admissible_basis, multiply, product_mask


class AssemblyError(ValueError):
    pass


@dataclass
class SecondaryComplexData:
    res: Resolution
    A: ATable
    levels: dict  # m -> [Generator]
    d0: dict  # Generator -> FreeElt over B0 (lifted differential)
    H: dict  # Generator (m >= 2) -> (FreeElt over B0 in R, FreeElt over A)
    max_filt: int
    max_deg: int  # degrees for which H is known on every level
    failures: list = field(default_factory=list)  # [(Generator, identity, detail)]

    def without(self, g: Generator) -> "SecondaryComplexData":
        """Copy with one generator removed (for negative controls)."""
        levels = {m: [h for h in gs if h != g] for m, gs in self.levels.items()}
        d0 = {h: x for h, x in self.d0.items() if h != g}
        H = {h: x for h, x in self.H.items() if h != g}
        return SecondaryComplexData(self.res, self.A, levels, d0, H, self.max_filt, self.max_deg)

    def with_H(self, g: Generator, r_part: FreeElt | None = None, a_part: FreeElt | None = None):
        r0, a0 = self.H[g]
        H = dict(self.H)
        H[g] = (r0 if r_part is None else r_part, a0 if a_part is None else a_part)
        return SecondaryComplexData(self.res, self.A, self.levels, self.d0, H, self.max_filt, self.max_deg)

    # -- graded pieces -------------------------------------------------------

    def offsets(self, m: int, t: int) -> tuple[dict, int]:
        off, n = {}, 0
        for g in self.levels.get(m, []):
            if g.d <= t:
                off[g] = n
                n += len(admissible_basis(t - g.d))
        return off, n

    def to_vector(self, x: FreeElt, off: dict) -> int:
        v = 0
        for g, c in x.terms.items():
            if g in off:
                v ^= c.to_mask() << off[g]
        return v

    def d_columns(self, m: int, t: int) -> tuple[list, int]:
        """d: F_m(t) -> F_{m-1}(t) over F_2, restricted to the kept generators."""
        src, _ = self.offsets(m, t)
        tgt, nrows = self.offsets(m - 1, t)
        cols = []
        for g in src:
            terms = [(h, project_pi(c)) for h, c in self.d0[g].terms.items() if h in tgt]
            for a in admissible_basis(t - g.d):
                col = 0
                for h, c in terms:
                    acc = 0
                    for u in c.terms:
                        acc ^= product_mask(a, u)
                    col ^= acc << tgt[h]
                cols.append(col)
        return cols, nrows

    def delta_bar_columns(self, m: int, t: int) -> tuple[list, int]:
        """delta-bar: F_m(t) -> F_{m-2}(t-1), a g -> a delta(g) + A(a, dd(g))."""
        src, _ = self.offsets(m, t)
        tgt, nrows = self.offsets(m - 2, t - 1)
        cols = []
        for g in src:
            r_part, a_part = self.H[g]
            for w in admissible_basis(t - g.d):
                a = SteenrodElement._raw(frozenset((w,)), sum(w))
                acc: dict = {}
                for h, c in a_part.terms.items():
                    acc[h] = multiply(a, c)
                if not self.A.is_zero and w:
                    for k, r in r_part.terms.items():
                        v = eval_A(a, r, self.A)
                        acc[k] = acc[k] + v if k in acc else v
                cols.append(self.to_vector(FreeElt(acc), tgt))
        return cols, nrows

    def cone_matrix(self, n: int, t: int) -> F2Matrix:
        """D_n: T_n(t) -> T_{n-1}(t), with T_n(t) = F_n(t) + F_{n-1}(t-1)."""
        _, top_rows = self.offsets(n - 1, t)
        _, bot_rows = self.offsets(n - 2, t - 1) if n >= 2 else ({}, 0)
        cols = []
        dx, _ = self.d_columns(n, t) if n >= 1 else ([], 0)
        if n >= 2:
            bx, _ = self.delta_bar_columns(n, t)
        else:
            bx = [0] * len(dx)
        for top, bot in zip(dx, bx):
            cols.append(top | (bot << top_rows))
        if n >= 2:
            dy, _ = self.d_columns(n - 1, t - 1)
            cols.extend(v << top_rows for v in dy)
        return F2Matrix.from_columns(cols, top_rows + bot_rows)

    def cone_dim(self, n: int, t: int) -> int:
        return self.offsets(n, t)[1] + (self.offsets(n - 1, t - 1)[1] if n >= 1 else 0)


def _z4_compose(coeffs: FreeElt, images: dict) -> FreeElt:
    """sum_i b_i * images[g_i] for a B0-combination sum_i b_i g_i."""
    acc: dict = {}
    for g, b in coeffs.terms.items():
        for k, c in images.get(g, FreeElt()).terms.items():
            p = b * c
            acc[k] = acc[k] + p if k in acc else p
    return FreeElt(acc)


def _right_compose(x: FreeElt, d0: dict) -> FreeElt:
    """sum_k r_k * d0(k) for x = sum_k r_k k."""
    acc: dict = {}
    for k, r in x.terms.items():
        if k not in d0:
            continue
        for h, c in d0[k].terms.items():
            p = r * c
            acc[h] = acc[h] + p if h in acc else p
    return FreeElt(acc)


def _a_compose(x: FreeElt, d0: dict) -> FreeElt:
    """d applied to an element over the Steenrod algebra."""
    acc: dict = {}
    for k, a in x.terms.items():
        if k.m == 0:
            continue
        for h, c in d0[k].terms.items():
            p = multiply(a, project_pi(c))
            acc[h] = acc[h] + p if h in acc else p
    return FreeElt(acc)


def _delta_of_lift(coeffs: FreeElt, H: dict, A: ATable) -> FreeElt:
    acc: dict = {}
    for g, b in coeffs.terms.items():
        if g.m < 2:
            continue
        a = project_pi(b)
        if a.is_zero():
            continue
        r_part, a_part = H[g]
        for h, c in a_part.terms.items():
            p = multiply(a, c)
            acc[h] = acc[h] + p if h in acc else p
        if not A.is_zero:
            for k, r in r_part.terms.items():
                v = eval_A(a, r, A)
                acc[k] = acc[k] + v if k in acc else v
    return FreeElt(acc)


def check_identities(c: SecondaryComplexData) -> list:
    failures = []
    for g in sorted(c.H, key=lambda g: (g.d, g.m, g.q)):
        r_part, a_part = c.H[g]
        for k, r in r_part.terms.items():
            if not project_pi(r).is_zero():
                failures.append((g, "H lands in R", f"coefficient on {k} does not project to 0"))
        dd = _right_compose(c.d0[g], c.d0)
        if dd != r_part:
            failures.append((g, "d0 d0 = partial H", f"{format_free(dd)} vs {format_free(r_part)}"))
        if g.m < 3:
            continue
        lhs_r = _z4_compose(c.d0[g], {h: c.H[h][0] for h in c.H})
        rhs_r = _right_compose(r_part, c.d0)
        if lhs_r != rhs_r:
            failures.append((g, "H d0 = d1 H (R)", f"{format_free(lhs_r)} vs {format_free(rhs_r)}"))
        lhs_a = _delta_of_lift(c.d0[g], c.H, c.A)
        rhs_a = _a_compose(a_part, c.d0)
        if lhs_a != rhs_a:
            failures.append((g, "H d0 = d1 H (A)", format_free(lhs_a + rhs_a)))
    return failures


def assemble(res: Resolution, delta: DeltaTable, A: ATable) -> SecondaryComplexData:
    if getattr(delta, "inconsistent", None) is not None:
        raise AssemblyError(f"refusing to assemble: the delta solve failed at {delta.inconsistent}")
    max_deg = min(res.max_deg, delta.max_deg)
    levels = {m: [g for g in res.generators(m) if g.d <= max_deg] for m in range(res.max_filt + 1)}
    d0 = {g: res.lifted_diff(g) for gs in levels.values() for g in gs if g.m >= 1}
    d0[Generator(0, 0, 0)] = FreeElt()
    H = {}
    for m in range(2, res.max_filt + 1):
        for g in levels[m]:
            if g not in delta:
                raise AssemblyError(f"delta has no entry for {g}")
            H[g] = (res.dd_element(g), delta[g])
    c = SecondaryComplexData(res, A, levels, d0, H, res.max_filt, max_deg)
    c.failures = check_identities(c)
    return c


@dataclass
class ExactnessReport:
    identity_failures: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)  # (n, t) -> status
    skipped: list = field(default_factory=list)  # [((n, t), reason)]

    @property
    def ok(self) -> bool:
        return not self.identity_failures and all(s == "exact" for s in self.checked.values())

    def failures(self) -> list:
        return [(p, s) for p, s in sorted(self.checked.items()) if s != "exact"]

    def to_json(self) -> str:
        return json.dumps(
            {
                "ok": self.ok,
                "identity_failures": [
                    {"generator": str(g), "identity": name, "detail": detail} for g, name, detail in self.identity_failures
                ],
                "checked": [{"position": n, "degree": t, "status": s} for (n, t), s in sorted(self.checked.items())],
                "skipped": [{"position": n, "degree": t, "reason": r} for (n, t), r in sorted(self.skipped)],
            },
            indent=1,
            sort_keys=True,
        )


def check_secondary_exactness(c: SecondaryComplexData, window: tuple[int, int, int, int]) -> ExactnessReport:
    """Exactness of the cone complex at positions n in [m0, m1], degrees t in [d0, d1].

    Position n needs the kept data on levels n+1 and n in degree t, so positions
    with n + 1 > max_filt, t > max_deg, or n < 2 (where the augmentation
    enters) are skipped.
    """
    m0, m1, d0, d1 = window
    rep = ExactnessReport(identity_failures=list(c.failures))
    for n in range(m0, m1 + 1):
        for t in range(d0, d1 + 1):
            if n < 2:
                rep.skipped.append(((n, t), "below the first position where delta-bar is defined"))
                continue
            if n + 1 > c.max_filt or t > c.max_deg:
                rep.skipped.append(((n, t), "at or beyond the computed frontier"))
                continue
            out = c.cone_matrix(n, t)
            inc = c.cone_matrix(n + 1, t)
            if any((out @ inc).rows_bits):
                rep.checked[(n, t)] = "composite nonzero"
                continue
            if out.rank() + inc.rank() != c.cone_dim(n, t):
                rep.checked[(n, t)] = "not exact"
            else:
                rep.checked[(n, t)] = "exact"
    return rep
