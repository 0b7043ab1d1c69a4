import pytest

from secext import data_file
from secext.amap import zero_table_file
from secext.bzero import parse_generator
from secext.resolution import FreeElt, Generator, parse_free, resolve
from secext.secondary import (
    D2Map,
    DeltaError,
    DeltaTable,
    InconsistentSolve,
    check_maineq,
    delta_on_module_elt,
    dump_d2,
    dump_delta,
    e3_dimensions,
    export_delta,
    extract_d2,
    import_delta,
    load_d2,
    parse_d2,
    parse_delta,
    solve_degree,
    solve_through,
)
from secext.steenrod import Sq, SteenrodElement

G = Generator
BAD_A = zero_table_file(8).with_entry(1, parse_generator("[1,1]"), Sq(2))


@pytest.fixture(scope="module")
def published_table(res35):
    return import_delta(data_file("published-delta-deg35.txt"), res35)


def test_delta_on_unit_multiple(res_small, zero_A):
    t = DeltaTable({G(2, 2, 0): parse_free("Sq1 g[0,0,0]")})
    x = parse_free("1 g[2,2,0]", over="B0")
    assert delta_on_module_elt(x, t, zero_A, res_small) == t[G(2, 2, 0)]


def test_delta_on_sq1_g22(res_small, zero_A):
    x = parse_free("Sq1 g[2,2,0]", over="B0")
    t = DeltaTable({G(2, 2, 0): FreeElt()})
    assert delta_on_module_elt(x, t, zero_A, res_small).is_zero()
    # A(Sq1, Sq1Sq1) g0 with a table where the only relevant entry is zero
    other = zero_table_file(8).with_entry(1, parse_generator("[1,2]"), Sq(3))
    assert delta_on_module_elt(x, t, other, res_small).is_zero()


def test_missing_entry(res_small, zero_A):
    with pytest.raises(DeltaError):
        delta_on_module_elt(parse_free("Sq1 g[2,2,0]", over="B0"), DeltaTable(), zero_A, res_small)


def test_degree_two_and_three(res_small, zero_A):
    t = solve_through(res_small, zero_A, 3)
    s2 = t.systems[G(2, 2, 0)]
    assert s2.matrix.nrows == 0
    assert s2.is_free(s2.index(G(0, 0, 0), (1,)))
    assert t[G(2, 2, 0)].is_zero()
    s3 = t.systems[G(3, 3, 0)]
    assert s3.forced_value(s3.index(G(1, 2, 0), ())) == 0
    assert s3.is_free(s3.index(G(1, 1, 0), (1,)))


def test_zero_table_gives_zero_delta(res_small, zero_A):
    t = solve_through(res_small, zero_A)
    assert t.is_zero()
    assert len(t.delta) == sum(1 for g in res_small.all_generators() if g.m >= 2)
    assert check_maineq(res_small, t, zero_A) == []
    assert len(extract_d2(t)) == 0


def test_solve_needs_lower_degrees(res_small, zero_A):
    with pytest.raises(DeltaError):
        solve_degree(res_small, zero_A, 5, DeltaTable(max_deg=2))


def test_inconsistent_table_is_reported(res_small):
    with pytest.raises(InconsistentSolve) as e:
        solve_through(res_small, BAD_A, 8)
    assert e.value.gen == G(4, 4, 0)
    assert "INCONSISTENT(g[4,4,0])" in str(e.value)


def test_jobs_do_not_change_table(zero_A):
    res = resolve(8, 18)
    assert dump_delta(solve_through(res, zero_A, jobs=4)) == dump_delta(solve_through(res, zero_A))


def test_published_table_loads(published_table):
    assert len(published_table.delta) == 100
    assert published_table[G(2, 2, 0)].is_zero()


def test_extract_examples(published_table):
    t = DeltaTable({G(3, 6, 0): parse_free("Sq4 g[1,1,0]")})
    assert len(extract_d2(t)) == 0
    d2 = extract_d2(published_table)
    assert (G(1, 16, 0), G(3, 17, 0)) in d2.arrows
    assert (G(4, 21, 0), G(6, 22, 0)) in d2.arrows


def test_extract_matches_published_list(published_table):
    published = load_d2(data_file("published-d2.txt"))
    assert extract_d2(published_table).arrows == published.arrows
    assert len(published) == 12


def test_mismatched_unit_term_is_an_error():
    t = DeltaTable()
    t.delta[G(3, 6, 0)] = FreeElt({G(1, 4, 0): SteenrodElement.unit()})
    with pytest.raises(DeltaError):
        extract_d2(t)


def test_import_errors(res35):
    with pytest.raises(DeltaError, match="unknown generator"):
        parse_delta("delta g[3,7,0] = 0\n", res35)
    with pytest.raises(DeltaError, match="total degree"):
        parse_delta("delta g[3,6,0] = Sq3 g[1,1,0]\n")
    with pytest.raises(DeltaError, match="filtration"):
        parse_delta("delta g[3,6,0] = Sq3 g[2,2,0]\n")
    with pytest.raises(DeltaError, match="duplicate"):
        parse_delta("delta g[2,2,0] = 0\ndelta g[2,2,0] = 0\n")


def test_export_import_roundtrip(tmp_path, published_table):
    p = tmp_path / "d.txt"
    export_delta(published_table, p)
    again = import_delta(p)
    assert again.delta == published_table.delta
    assert dump_delta(again) == p.read_text()
    body = [l for l in data_file("published-delta-deg35.txt").read_text().splitlines() if not l.startswith("#")]
    assert "\n".join(body) + "\n" == dump_delta(published_table)


def test_e3_examples(res35, published_table):
    empty = e3_dimensions(res35, D2Map())
    assert all(e.e2 == e.e3 for e in empty.values())
    rep = e3_dimensions(res35, extract_d2(published_table))
    assert sum(e.e2 - e.e3 for e in rep.values()) == 24
    assert rep[(3, 17)].e3 == rep[(3, 17)].e2 - 1


def test_d2_squared_zero(res35, published_table):
    assert extract_d2(published_table).check_square_zero(res35) == []
    fake = D2Map({(G(1, 16, 0), G(3, 17, 0)), (G(3, 17, 0), G(5, 18, 0))})
    assert fake.check_square_zero() == [(1, 16)]


def test_d2_file_format():
    text = "d2 g[1,16,0] -> g[3,17,0]\n"
    assert dump_d2(parse_d2(text)) == text
    with pytest.raises(DeltaError):
        parse_d2("d2 g[1,16,0] -> g[3,18,0]\n")


def test_e3_rejects_arrows_outside(res_small):
    with pytest.raises(DeltaError):
        e3_dimensions(res_small, D2Map({(G(1, 16, 0), G(3, 17, 0))}))
