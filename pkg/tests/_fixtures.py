"""Small triangulations and helpers shared by the test modules."""
from functools import lru_cache

from veerobs.catalog import load_default, load_veering_census
from veerobs.isosig import decode_isosig
from veerobs.triangulation import parse_triangulation

# One tetrahedron, faces 0<->1 and 2<->3 glued; the edges {0,1} and {2,3}
# each have degree one, so no taut structure can exist.
DEGREE_ONE_TRI = """\
% TRI v1
tets 1
0: 0:1023 0:1023 0:0132 0:0132
"""

# Two tetrahedra with a single edge class.  With the coorientation 0011 the
# equator of tet 0 runs through that one edge four times, so the two
# colours required on adjacent equatorial slots clash.
SINGLE_EDGE_TRI = """\
% TRI v1
tets 2
0: 1:1302 1:0213 1:1230 1:2310
1: 0:3201 0:2031 0:0213 0:3012
"""

# The 20 first-100 census manifolds that occur in the veering census.
VEERING_NAMES = ("m003 m004 m009 m010 m016 m022 m023 m036 m038 m039 "
                 "m040 m052 m083 m115 m119 m120 m125 m135 m136 m140").split()

# The 19 first-100 census manifolds with no veering triangulation.
NO_VEERING_NAMES = ("m006 m007 m011 m029 m030 m037 m047 m049 m060 m064 "
                    "m081 m082 m095 m116 m117 m129 m130 m142 m143").split()


@lru_cache(maxsize=None)
def facts():
    return load_default()


@lru_cache(maxsize=None)
def census():
    return tuple(load_veering_census())


def tri(name):
    return facts().triangulation(name)


@lru_cache(maxsize=None)
def small_fixtures():
    """``(label, triangulation)`` for every valid fixture with at most three tetrahedra."""
    out = []
    for name in sorted(facts().tri_paths):
        t = tri(name)
        if t.tet_count <= 3:
            out.append((name, t))
    for e in census():
        t = decode_isosig(e.isosig)
        if t.tet_count <= 3:
            out.append(("isosig:" + e.isosig, t))
    return tuple(out)


def degree_one():
    return parse_triangulation(DEGREE_ONE_TRI, name="degree-one")


def single_edge():
    return parse_triangulation(SINGLE_EDGE_TRI, name="single-edge")
