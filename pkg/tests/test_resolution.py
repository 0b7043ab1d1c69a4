from pathlib import Path

import pytest

from secext import gf2core
from secext.bzero import project_pi
from secext.resolution import (
    FreeElt,
    Generator,
    ResolutionError,
    dumps,
    format_free,
    load,
    loads,
    parse_free,
    parse_gen,
    resolve,
    save,
)
from secext.steenrod import multiply

G = Generator
DATA = Path(__file__).parent / "data"

# per-(stem, m) class counts read off a printed Adams chart, stems <= 22, m <= 8
CHART_DOTS = {
    (0, 0): 1, (0, 1): 1, (0, 2): 1, (0, 3): 1, (0, 4): 1, (0, 5): 1, (0, 6): 1, (0, 7): 1, (0, 8): 1,
    (1, 1): 1, (2, 2): 1, (3, 1): 1, (3, 2): 1, (3, 3): 1, (6, 2): 1,
    (7, 1): 1, (7, 2): 1, (7, 3): 1, (7, 4): 1, (8, 2): 1, (8, 3): 1, (9, 3): 1, (9, 4): 1, (9, 5): 1,
    (10, 6): 1, (11, 5): 1, (11, 6): 1, (11, 7): 1,
    (14, 2): 1, (14, 3): 1, (14, 4): 1, (14, 5): 1, (14, 6): 1,
    (15, 1): 1, (15, 2): 1, (15, 3): 1, (15, 4): 1, (15, 5): 2, (15, 6): 1, (15, 7): 1, (15, 8): 1,
    (16, 2): 1, (16, 6): 1, (16, 7): 1,
    (17, 3): 1, (17, 4): 1, (17, 5): 1, (17, 6): 1, (17, 7): 1, (17, 8): 1,
    (18, 2): 1, (18, 3): 1, (18, 4): 2, (18, 5): 1, (19, 3): 1,
    (20, 4): 1, (20, 5): 1, (20, 6): 1, (21, 3): 1, (21, 5): 1, (22, 4): 1, (22, 8): 1,
}


def load_published():
    out = {}
    for line in (DATA / "published_differentials.txt").read_text().splitlines():
        if line.startswith("d "):
            lhs, rhs = line[2:].split(" = ")
            out[parse_gen(lhs)] = parse_free(rhs)
    return out


def apply_d(diffs: dict, x: FreeElt) -> FreeElt:
    acc = FreeElt()
    for g, a in x.terms.items():
        acc = acc + FreeElt({h: multiply(a, c) for h, c in diffs[g].terms.items()})
    return acc


def test_filtration_one_and_two_degrees(res35):
    assert [g.d for g in res35.generators(1) if g.d <= 22] == [1, 2, 4, 8, 16]
    two = sorted(g.d for g in res35.generators(2) if g.d <= 22)
    expected = sorted({2**i + 2**j for i in range(6) for j in range(i, 6) if abs(i - j) != 1 and 2**i + 2**j <= 22})
    assert two == expected == [2, 4, 5, 8, 9, 10, 16, 17, 18, 20]


def test_counts_match_chart(res35):
    ours = {}
    for g in res35.all_generators():
        if g.stem <= 22 and g.m <= 8:
            ours[(g.stem, g.m)] = ours.get((g.stem, g.m), 0) + 1
    assert ours == CHART_DOTS


def test_invariants(res35):
    assert res35.check_d_squared() == []
    assert res35.check_minimal() == []


def test_exactness(res_small):
    assert res_small.check_exactness() == []


def test_forced_patterns(res35):
    for m in range(1, 15):
        assert format_free(res35.diff[G(m, m, 0)]) == f"Sq1 g[{m - 1},{m - 1},0]"
    for n in range(6):
        assert format_free(res35.diff[G(1, 2**n, 0)]) == f"Sq{2**n} g[0,0,0]"


def test_published_differentials_form_a_complex():
    pub = load_published()
    for g, x in pub.items():
        if g.m >= 2:
            assert apply_d(pub, x).is_zero(), g


def test_published_differentials_against_ours(res35):
    pub = load_published()
    verbatim = {G(2, 4, 0), G(2, 5, 0), G(3, 6, 0), G(3, 11, 0), G(5, 14, 0), G(5, 16, 0), G(6, 16, 0)}
    for g in verbatim:
        assert res35.diff[g] == pub[g]
    # at filtration 2 the lower level is forced, so any difference must be a boundary
    for g, x in pub.items():
        if g.m == 2:
            v = res35.element_to_vector(res35.diff[g] + x, 1, g.d)
            assert gf2core.solve(res35.diff_matrix(2, g.d), v).consistent


def test_lifted_diff_and_dd(res35):
    assert res35.lifted_diff(G(1, 2, 0)).terms[G(0, 0, 0)].terms == {(2,): 1}
    for g in res35.generators(3)[:10]:
        lifted = res35.lifted_diff(g)
        assert FreeElt({h: project_pi(c) for h, c in lifted.terms.items()}) == res35.diff[g]
    dd = res35.dd(G(2, 2, 0))
    r, _ = dd[G(0, 0, 0)]
    assert r.terms == {(1, 1): 1}
    for g in res35.all_generators():
        if g.m >= 2 and g.d <= 20:
            for k, (r, parts) in res35.dd(g).items():
                assert project_pi(r).is_zero()
                assert parts.reconstruct(r.degree) == r
    with pytest.raises(ResolutionError):
        res35.dd(G(1, 1, 0))


def test_save_load_roundtrip(tmp_path, res_small):
    p = tmp_path / "r.txt"
    save(res_small, p)
    again = load(p)
    assert dumps(again) == p.read_text()
    assert again.counts() == res_small.counts()


def test_resumed_equals_scratch():
    part = loads(dumps(resolve(4, 10)))
    part.extend(7, 16)
    assert dumps(part) == dumps(resolve(7, 16))


def test_jobs_do_not_change_result():
    assert dumps(resolve(8, 20, jobs=4)) == dumps(resolve(8, 20))


def test_load_errors(res_small):
    text = dumps(res_small)
    with pytest.raises(ResolutionError):
        loads(text.replace("format secext-res 1", "format secext-res 9"))
    lines = text.splitlines()
    with pytest.raises(ResolutionError):
        loads("\n".join(lines[: len(lines) // 2 + 3]) + "\n")
    with pytest.raises(ResolutionError):
        loads(text.replace("d g[2,4,0] = ", "d g[2,44,0] = "))


def test_extend_refuses_to_shrink(res_small):
    r = loads(dumps(res_small))
    with pytest.raises(ResolutionError):
        r.extend(3, 12)


def test_free_element_grammar():
    s = "Sq3 g[1,1,0] + (Sq4+Sq3Sq1) g[1,4,0] + 1 g[1,8,0]"
    assert format_free(parse_free(s)) == "Sq3 g[1,1,0] + (Sq4+Sq3Sq1) g[1,4,0] + 1 g[1,8,0]"
    assert parse_free("0").is_zero()
    x = parse_free("2*Sq2Sq1 g[0,0,0]", over="B0")
    assert x.terms[G(0, 0, 0)].terms == {(2, 1): 2}
