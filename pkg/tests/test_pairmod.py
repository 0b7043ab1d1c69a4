import json

import pytest

from secext import data_file
from secext.bzero import parse_generator
from secext.amap import zero_table_file
from secext.pairmod import AssemblyError, assemble, check_identities, check_secondary_exactness
from secext.resolution import FreeElt, Generator, parse_free, resolve
from secext.secondary import DeltaTable, InconsistentSolve, import_delta, solve_degree, solve_through
from secext.steenrod import Sq

G = Generator


@pytest.fixture(scope="module")
def zero_complex(res_small, zero_A):
    return assemble(res_small, solve_through(res_small, zero_A), zero_A)


def test_zero_assembly_through_degree6(zero_A):
    res = resolve(6, 6)
    c = assemble(res, solve_through(res, zero_A), zero_A)
    assert c.failures == []


def test_identities_and_exactness(zero_complex):
    assert zero_complex.failures == []
    rep = check_secondary_exactness(zero_complex, (0, 6, 0, 12))
    assert rep.ok
    assert set(rep.checked) == {(n, t) for n in range(2, 6) for t in range(13)}
    assert all(s == "exact" for s in rep.checked.values())


def test_frontier_positions_are_skipped(zero_complex):
    rep = check_secondary_exactness(zero_complex, (4, 8, 10, 14))
    skipped = {p for p, _ in rep.skipped}
    assert (6, 10) in skipped and (5, 13) in skipped and (8, 14) in skipped
    assert (4, 10) in rep.checked and (5, 12) in rep.checked
    assert json.loads(rep.to_json())["ok"] is True


def test_perturbed_delta_breaks_identity(zero_complex):
    bad = zero_complex.with_H(G(3, 6, 0), a_part=parse_free("Sq4 g[1,1,0]"))
    fails = check_identities(bad)
    assert (G(3, 6, 0), "H d0 = d1 H (A)") in [(g, n) for g, n, _ in fails]
    rep = check_secondary_exactness(bad, (2, 5, 0, 12))
    assert not rep.ok


def test_perturbed_dd_breaks_identity(zero_complex):
    r = zero_complex.H[G(2, 4, 0)][0]
    g, coeff = next(iter(r.terms.items()))
    bad = zero_complex.with_H(G(2, 4, 0), r_part=FreeElt({g: coeff.scale(3) + coeff}))
    names = {n for _, n, _ in check_identities(bad)}
    assert "d0 d0 = partial H" in names


def test_dropped_generator_is_localized(zero_complex):
    rep = check_secondary_exactness(zero_complex.without(G(3, 6, 0)), (2, 5, 0, 12))
    bad = [p for p, _ in rep.failures()]
    assert bad
    assert min(t for _, t in bad) == 6
    assert all(n in (2, 3, 4) for n, _ in bad)


def test_inconsistent_solve_is_refused(res_small):
    bad_A = zero_table_file(8).with_entry(1, parse_generator("[1,1]"), Sq(2))
    table = DeltaTable(max_deg=1)
    with pytest.raises(InconsistentSolve):
        for d in range(2, 9):
            solve_degree(res_small, bad_A, d, table)
    with pytest.raises(AssemblyError):
        assemble(res_small, table, bad_A)


def test_incomplete_table_is_refused(res_small, zero_A):
    with pytest.raises(AssemblyError):
        assemble(res_small, DeltaTable(max_deg=12), zero_A)


def test_published_delta_needs_its_own_A(res35, zero_A):
    # the published table was produced with a nonzero A; with A = 0 the
    # identities cannot all hold, and the checker must say so
    table = import_delta(data_file("published-delta-deg35.txt"), res35)
    c = assemble(res35, table, zero_A)
    assert c.failures
