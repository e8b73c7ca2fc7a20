import itertools

import pytest
from hypothesis import given, strategies as st

from veerobs.geometry import h1_invariants
from veerobs.triangulation import (ALL_PERMS, EVEN_PERMS, DisconnectedInput, InvalidInput, InvolutionError,
                                   Perm4, SelfGluingError, Triangulation, TriSyntaxError, cusp_links,
                                   find_isomorphism, parse_triangulation, serialize)

from _fixtures import degree_one, facts, single_edge, small_fixtures, tri


def test_perm4_group_laws():
    for p, q in itertools.product(ALL_PERMS, repeat=2):
        assert (p * q).inverse() == q.inverse() * p.inverse()
        assert (p * q).sign == p.sign * q.sign
    assert len(EVEN_PERMS) == 12
    assert str(Perm4.from_string("1023")) == "1023"
    with pytest.raises(ValueError):
        Perm4.from_string("1123")


def test_m004_combinatorics():
    m004 = tri("m004")
    assert m004.tet_count == 2
    assert sorted(ec.degree for ec in m004.edge_classes) == [6, 6]
    assert m004.cusp_count == 1
    assert all(link.is_torus for link in cusp_links(m004))
    assert m004.is_orientable() and m004.problems() == []


def test_every_bundled_triangulation_is_valid():
    fb = facts()
    for name in fb.tri_paths:
        t = fb.triangulation(name)
        assert t.problems() == [], name
        assert t.cusp_count == fb.cusp_count(name), name
        assert len(t.cusp_rows) == t.cusp_count
        # every slot lies in exactly one edge class
        assert sum(ec.degree for ec in t.edge_classes) == 6 * t.tet_count


def test_edge_walk_is_consistent():
    """Each step of an edge class crosses a real face gluing and tracks the same end."""
    for _, t in small_fixtures():
        for ec in t.edge_classes:
            embs = ec.embeddings
            for i, e in enumerate(embs):
                nxt = embs[(i + 1) % len(embs)]
                t2, _, g = t.gluings[e.tet][e.perm[3]]
                assert nxt.tet == t2
                assert nxt.perm[0] == g[e.perm[0]] and nxt.perm[1] == g[e.perm[1]]


def test_serialize_round_trip():
    for name in ("m004", "L5a1", "t12066"):
        t = tri(name)
        again = parse_triangulation(serialize(t), name=name)
        assert again == t
        assert serialize(again) == serialize(t)


@pytest.mark.parametrize("text, lineno", [
    ("tets 1\n0: 0:1023 0:1023 0:0132 0:0132\n", 1),
    ("% TRI v1\ntets x\n", 2),
    ("% TRI v1\ntets 1\n0: 0:1023 0:1023 0:0132\n", 3),
    ("% TRI v1\ntets 1\n0: 0:1023 0:1023 0:0132 0:01x2\n", 3),
    ("% TRI v1\ntets 1\n0: 0:1023 0:1023 0:0132 3:0132\n", 3),
    ("% TRI v1\ntets 1\n0: 0:1023 0:1023 0:0132 0:0132\ncusps 1\nmeridian 0: 1 0 0\n", 5),
    ("% TRI v1\ntets 1\n0: 0:1023 0:1023 0:0132 0:0132\ncusps 1\nmeridian 0: 0 0 0\nlongitude 0: 0 0 0\nextra\n", 7),
])
def test_syntax_errors_carry_line_numbers(text, lineno):
    with pytest.raises(TriSyntaxError) as info:
        parse_triangulation(text)
    assert info.value.lineno == lineno


def test_structural_errors():
    with pytest.raises(InvolutionError):
        parse_triangulation("% TRI v1\ntets 1\n0: 0:1023 0:0132 0:0132 0:0132\n")
    ident = Perm4((0, 1, 2, 3))
    # the permutation must carry the face index to its partner
    with pytest.raises(InvolutionError):
        Triangulation((((0, 1, ident), (0, 0, ident), (0, 3, ident), (0, 2, ident)),))


def test_self_gluing_rejected():
    p = Perm4((0, 1, 2, 3))
    swap = Perm4((1, 0, 2, 3))
    with pytest.raises(SelfGluingError):
        Triangulation((((0, 0, p), (0, 1, p), (0, 3, Perm4((0, 1, 3, 2))), (0, 2, Perm4((0, 1, 3, 2)))),))
    assert Triangulation((((0, 1, swap), (0, 0, swap), (0, 3, Perm4((0, 1, 3, 2))),
                           (0, 2, Perm4((0, 1, 3, 2)))),)).tet_count == 1


def test_degenerate_fixtures_are_flagged():
    d1 = degree_one()
    assert sorted(ec.degree for ec in d1.edge_classes) == [1, 1, 4]
    assert d1.problems()
    with pytest.raises(InvalidInput):
        d1.require_valid()
    assert len(single_edge().edge_classes) == 1


def test_disjoint_union_is_disconnected():
    m004 = tri("m004")
    both = m004.disjoint_union(m004)
    assert not both.is_connected()
    assert both.components() == [[0, 1], [2, 3]]
    with pytest.raises(DisconnectedInput):
        find_isomorphism(both, both)


relabel_data = st.data()


def _random_relabel(data, t, even=False):
    n = t.tet_count
    tet_map = data.draw(st.permutations(range(n)))
    pool = EVEN_PERMS if even else ALL_PERMS
    perms = [data.draw(st.sampled_from(pool)) for _ in range(n)]
    return t.relabel(tet_map, perms), tet_map, perms


@given(st.sampled_from(["m004", "m006", "m015", "L5a1", "m129"]), relabel_data)
def test_relabel_preserves_invariants(name, data):
    t = tri(name)
    r, _, _ = _random_relabel(data, t)
    assert sorted(ec.degree for ec in r.edge_classes) == sorted(ec.degree for ec in t.edge_classes)
    assert r.cusp_count == t.cusp_count
    assert h1_invariants(r) == h1_invariants(t)
    assert r.problems() == []


@given(st.sampled_from(["m004", "m009", "L5a1"]), relabel_data)
def test_isomorphism_is_found_and_symmetric(name, data):
    t = tri(name)
    r, _, _ = _random_relabel(data, t)
    forward, backward = find_isomorphism(t, r), find_isomorphism(r, t)
    assert forward is not None and backward is not None
    assert forward.is_isomorphism(t, r) and backward.is_isomorphism(r, t)


def test_non_isomorphic_pairs():
    assert find_isomorphism(tri("m003"), tri("m004")) is None
    assert find_isomorphism(tri("m004"), tri("m006")) is None


@given(st.sampled_from(["L5a1", "t12048", "m129"]), relabel_data)
def test_cusp_rows_follow_their_cusps(name, data):
    """An even relabelling moves cusp rows together with the cusp they describe."""
    t = tri(name)
    r, tet_map, perms = _random_relabel(data, t, even=True)
    for (tt, v), c in t.vertex_classes.items():
        c2 = r.vertex_classes[tet_map[tt], perms[tt][v]]
        m, l = t.cusp_rows[c]
        m2, l2 = r.cusp_rows[c2]
        assert sorted(m) == sorted(m2) and sorted(l) == sorted(l2)
