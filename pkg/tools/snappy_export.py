"""Convert SnapPy manifolds to TRI-v1 triangulations (development-time helper)."""
import numpy as np

from veerobs.triangulation import Perm4, Triangulation


def from_snappy(M, name=None):
    lines = [l for l in M._to_string().splitlines()]
    # header (5 lines), then "<torus cusps> <klein cusps>", one line per cusp, tet count
    i = 0
    while len(lines[i].split()) != 2 or not all(x.isdigit() for x in lines[i].split()):
        i += 1
    cusps = sum(int(x) for x in lines[i].split())
    i += 1 + cusps
    while not lines[i].strip():
        i += 1
    n = int(lines[i])
    assert n == M.num_tetrahedra()
    i += 1
    gl = []
    vertex_cusp = {}
    for t in range(n):
        while not lines[i].strip():
            i += 1
        nb = [int(x) for x in lines[i].split()]
        ps = lines[i + 1].split()
        for v, c in enumerate(lines[i + 2].split()):
            vertex_cusp[t, v] = int(c)
        row = []
        for f in range(4):
            p = Perm4.from_string(ps[f])
            row.append((nb[f], p[f], p))
        gl.append(tuple(row))
        i += 8
    eqs = [list(map(int, r)) for r in M.gluing_equations()]
    cusp = eqs[n:]
    pairs = [(cusp[2 * c], cusp[2 * c + 1]) for c in range(M.num_cusps())]
    rows = [pairs[r] for r in _row_order(M, pairs)]
    tri = Triangulation(tuple(gl), rows, name or M.name())
    mine = sorted(map(list, _edge_rows(tri)))
    theirs = sorted(eqs[:n])
    assert mine == theirs, "edge equations disagree with SnapPy"
    return _match_cusp_order(tri, vertex_cusp)


def _row_order(M, pairs):
    """
    Which gluing-equation row pair belongs to each cusp index.

    SnapPy lists cusp rows in its internal cusp order, which need not be the
    index order used by dehn_fill; detect the pairing by filling each cusp
    in turn and seeing which filling row the shapes satisfy.
    """
    k = len(pairs)
    if k == 1:
        return [0]
    order = []
    for c in range(k):
        for p, q in [(7, 1), (5, 2), (9, 4), (11, 3)]:
            N = M.copy()
            N.dehn_fill((p, q), c)
            z = np.array([complex(x) for x in N.tetrahedra_shapes("rect")])
            L = np.empty(3 * len(z), dtype=complex)
            L[0::3], L[1::3], L[2::3] = np.log(z), np.log(1 / (1 - z)), np.log(1 - 1 / z)
            hits = [r for r, (m, l) in enumerate(pairs)
                    if abs(np.exp((p * np.array(m) + q * np.array(l)) @ L) - 1) < 1e-8
                    and abs(np.exp(np.array(m) @ L) - 1) > 1e-6]
            if len(hits) == 1:
                order.append(hits[0])
                break
        else:
            raise RuntimeError("could not match cusp rows for cusp {}".format(c))
    assert sorted(order) == list(range(k))
    return order


def _match_cusp_order(tri, vertex_cusp):
    """Reorder cusp rows so row ``k`` belongs to our vertex class ``k``."""
    snappy_of = {}
    for corner, k in tri.vertex_classes.items():
        c = vertex_cusp[corner]
        if snappy_of.setdefault(k, c) != c:
            raise CuspOrderMismatch("vertex class {} meets SnapPy cusps {} and {}".format(k, snappy_of[k], c))
    return tri.with_cusp_rows([tri.cusp_rows[snappy_of[k]] for k in range(tri.cusp_count)])


class CuspOrderMismatch(RuntimeError):
    pass


def _edge_rows(tri):
    for ec in tri.edge_classes:
        r = [0] * (3 * tri.tet_count)
        for e in ec.embeddings:
            r[3 * e.tet + e.pair_class] += 1
        yield r
