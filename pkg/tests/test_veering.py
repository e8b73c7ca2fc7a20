import pytest
from hypothesis import given, strategies as st

from veerobs.covers import enumerate_double_covers
from veerobs.isosig import decode_isosig
from veerobs.triangulation import ALL_PERMS
from veerobs.veering import (Coorientation, NotTaut, VeeringStructure,
                             all_veering, angles_from_coorientation, find_veering, is_edge_orientable,
                             lift_veering, search_transverse_taut, solve_coloring, verify_veering)

from _brute import exhaustive, outward
from _fixtures import census, degree_one, single_edge, small_fixtures, tri


@pytest.mark.parametrize("label, t", small_fixtures(), ids=[l for l, _ in small_fixtures()])
def test_search_matches_exhaustive_enumeration(label, t):
    taut, veering = exhaustive(t)
    assert [c.bits for c in search_transverse_taut(t)] == taut
    assert set(all_veering(t)) == set(veering)
    # every veering structure is transverse taut
    assert {vs.coorientation.bits for vs in veering} <= set(taut)
    found = find_veering(t)
    assert (found is None) == (not veering)
    if found is not None:
        assert found in veering


def test_degree_one_edge_has_no_taut_structure():
    assert search_transverse_taut(degree_one()) == []


def test_single_edge_colouring_clash():
    t = single_edge()
    co = Coorientation((0, 0, 1, 1))
    assert all(sum(outward(t, co.bits, tet, f) for f in range(4)) == 2 for tet in range(2))
    assert solve_coloring(t, co, "L") is None
    assert solve_coloring(t, co, "R") is None


def test_census_structures_verify_and_reproduce_census_data():
    for e in census():
        t = decode_isosig(e.isosig)
        vs = find_veering(t, ("L",))
        assert vs is not None and verify_veering(t, vs), e.isosig
        want = tuple(int(c) for c in e.taut_angles)
        assert any(angles_from_coorientation(t, c).pi_pairs == want for c in search_transverse_taut(t))


def test_census_edge_orientability_flags():
    for e in census():
        t = decode_isosig(e.isosig)
        flags = {is_edge_orientable(t, vs) for vs in all_veering(t)}
        assert flags == {e.edge_orientable}, e.isosig


def test_m003_is_not_edge_orientable_and_m004_is():
    m003 = [e for e in census() if "m003" in e.names]
    m004 = [e for e in census() if "m004" in e.names]
    assert m003 and m004
    for e in m003:
        t = decode_isosig(e.isosig)
        assert not any(is_edge_orientable(t, vs) for vs in all_veering(t))
    for e in m004:
        t = decode_isosig(e.isosig)
        assert all(is_edge_orientable(t, vs) for vs in all_veering(t))


def test_non_veering_census_manifolds_have_no_structure_here():
    for name in ("m006", "m007", "m011"):
        assert find_veering(tri(name)) is None


def test_angles_reject_non_taut():
    t = decode_isosig("cPcbbbiht")
    nf = len(t.face_classes)
    with pytest.raises(NotTaut):
        angles_from_coorientation(t, Coorientation((0,) * nf))
    with pytest.raises(NotTaut):
        angles_from_coorientation(t, Coorientation((0,)))


def test_verify_reports_each_condition():
    t = decode_isosig("cPcbbbiht")
    vs = find_veering(t)
    assert verify_veering(t, vs)
    short = VeeringStructure(Coorientation(vs.coorientation.bits[:-1]), vs.coloring, vs.chirality)
    assert verify_veering(t, short).condition == "shape"
    flipped = VeeringStructure(vs.coorientation, vs.coloring.swapped(), vs.chirality)
    assert verify_veering(t, flipped).condition == "colour"
    mirrored = VeeringStructure(vs.coorientation, vs.coloring, "R" if vs.chirality == "L" else "L")
    assert not verify_veering(t, mirrored)
    for k in range(len(vs.coorientation.bits)):
        bits = list(vs.coorientation.bits)
        bits[k] ^= 1
        report = verify_veering(t, VeeringStructure(Coorientation(tuple(bits)), vs.coloring, vs.chirality))
        assert not report and report.condition in ("tetrahedron", "edge", "colour")


def test_structure_text_round_trip():
    vs = find_veering(decode_isosig("cPcbbbiht"))
    assert VeeringStructure.parse(str(vs)) == vs
    with pytest.raises(ValueError):
        VeeringStructure.parse("0101 rb X")
    with pytest.raises(ValueError):
        Coorientation.parse("01a")


@given(st.sampled_from([e.isosig for e in census()[:30]]), st.data())
def test_structure_counts_are_relabelling_invariant(sig, data):
    t = decode_isosig(sig)
    tet_map = data.draw(st.permutations(range(t.tet_count)))
    perms = [data.draw(st.sampled_from(ALL_PERMS)) for _ in range(t.tet_count)]
    r = t.relabel(tet_map, perms)
    assert len(search_transverse_taut(r)) == len(search_transverse_taut(t))
    a, b = all_veering(t), all_veering(r)
    assert len(a) == len(b)
    assert sorted(vs.chirality for vs in a) == sorted(vs.chirality for vs in b)
    assert {is_edge_orientable(t, vs) for vs in a} == {is_edge_orientable(r, vs) for vs in b}


@pytest.mark.parametrize("sig", ["cPcbbbiht", "cPcbbbdxm", "dLQacccjsnk"])
def test_structures_lift_to_double_covers(sig):
    t = decode_isosig(sig)
    for vs in all_veering(t):
        eo = is_edge_orientable(t, vs)
        for dc in enumerate_double_covers(t, dedup=False):
            up = lift_veering(t, vs, dc.cover, dc.projection)
            assert verify_veering(dc.cover, up), (sig, str(vs), str(dc.cocycle))
            if eo:
                assert is_edge_orientable(dc.cover, up)
