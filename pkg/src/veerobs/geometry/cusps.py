"""
Cusp shapes by developing cusp cross sections, and canonical cusp moduli.

A horospherical cross section of cusp ``c`` is triangulated by the corners
``(tet, v)`` of tetrahedra at vertices in the class ``c``.  Each corner is a
Euclidean triangle whose vertex at the end of edge ``{v, w}`` has angle
given by the shape parameter on that edge.  Developing the triangles along a
spanning tree and comparing placements across the remaining link edges
gives the translation lattice of the cusp; its ratio, reduced under
``PSL(2, Z)``, is the cusp modulus.  No peripheral curves are needed.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from ..triangulation import EDGE_PAIR_CLASS, Perm4, Triangulation
from .gluing import IncompleteSolution, shape_triples


def _corner_order(v):
    """Other three vertices ``(w1, w2, w3)`` with ``(v, w1, w2, w3)`` an even permutation."""
    rest = [w for w in range(4) if w != v]
    order = (v, rest[0], rest[1], rest[2])
    if Perm4(order).sign == -1:
        rest[1], rest[2] = rest[2], rest[1]
    return tuple(rest)


def _edge_shape(params, t, a, b):
    return params[EDGE_PAIR_CLASS[a, b]][t]


def _place(params, t, v, known):
    """Positions of the three corner vertices of ``(t, v)`` given two of them."""
    w1, w2, w3 = _corner_order(v)
    cyc = (w1, w2, w3)
    # the corner triangle w1 -> w2 -> w3 is counterclockwise and
    # (p[w3] - p[w1]) / (p[w2] - p[w1]) is the shape at edge {v, w1}
    for i in range(3):
        a, b, c = cyc[i], cyc[(i + 1) % 3], cyc[(i + 2) % 3]
        if a in known and b in known:
            pa, pb = known[a], known[b]
            pos = {a: pa, b: pb, c: pa + _edge_shape(params, t, v, a) * (pb - pa)}
            return pos
    raise ValueError("need two known vertices")


def cusp_translations(tri: Triangulation, z, cusp: int, tol=1e-8):
    """
    Holonomies of the cusp cross section as complex numbers (up to a common scale).

    Raises IncompleteSolution if some holonomy is not a pure translation.
    """
    params = shape_triples(z)
    corners = sorted(k for k, c in tri.vertex_classes.items() if c == cusp)
    start = corners[0]
    t0, v0 = start
    w1, w2, _ = _corner_order(v0)
    placed = {start: _place(params, t0, v0, {w1: 0j, w2: 1 + 0j})}
    queue = deque([start])
    gens = []
    visited_links = set()
    while queue:
        t, v = queue.popleft()
        pos = placed[t, v]
        for f in range(4):
            if f == v:
                continue
            t2, f2, g = tri.gluings[t][f]
            nbr = (t2, g[v])
            link = frozenset([(t, v, f), (t2, g[v], f2)])
            if link in visited_links:
                continue
            visited_links.add(link)
            shared = [w for w in range(4) if w not in (v, f)]
            known = {g[w]: pos[w] for w in shared}
            dev = _place(params, t2, g[v], known)
            if nbr not in placed:
                placed[nbr] = dev
                queue.append(nbr)
                continue
            # compare the existing placement of nbr with the developed one
            old = placed[nbr]
            a, b = (g[w] for w in shared)
            scale = (dev[b] - dev[a]) / (old[b] - old[a])
            if abs(scale - 1) > tol * max(1.0, abs(scale)):
                raise IncompleteSolution("cusp {} holonomy is not a translation".format(cusp))
            gens.append(dev[a] - old[a])
    return gens


def _reduce_pair(a, b):
    # Lagrange-Gauss reduction of a 2D lattice basis
    if abs(a) > abs(b):
        a, b = b, a
    while True:
        mu = round((b * a.conjugate()).real / abs(a) ** 2)
        b = b - mu * a
        if abs(b) >= abs(a) * (1 - 1e-12):
            return a, b
        a, b = b, a


def _egcd(x, y):
    if y == 0:
        return (abs(x), 1 if x >= 0 else -1, 0)
    g, s, t = _egcd(y, x % y)
    return g, t, s - (x // y) * t


def _integer_basis(vectors):
    """Basis ``((x1, y1), (0, y2))`` of the sublattice of Z^2 spanned by ``vectors``."""
    v1 = (0, 0)
    ys = []
    for x, y in vectors:
        if x == 0:
            ys.append(y)
            continue
        if v1[0] == 0:
            v1 = (x, y)
            continue
        g, s, t = _egcd(v1[0], x)
        new = (s * v1[0] + t * x, s * v1[1] + t * y)
        left = (x // g) * v1[1] - (v1[0] // g) * y
        v1 = new
        ys.append(left)
    gy = 0
    for y in ys:
        gy = _egcd(gy, y)[0]
    return v1, (0, gy)


def lattice_basis(gens, tol=1e-6, max_denominator=10000):
    """Reduced basis of the rank-2 lattice generated by ``gens``."""
    gens = [complex(g) for g in gens]
    scale = max(abs(g) for g in gens) if gens else 0.0
    vecs = [g for g in gens if abs(g) > 1e-9 * scale]
    if not vecs:
        raise IncompleteSolution("no translations found")
    a = min(vecs, key=abs)
    cands = [g for g in vecs if abs((g / a).imag) > tol]
    if not cands:
        raise IncompleteSolution("translations are collinear")
    b = min(cands, key=abs)
    M = np.array([[a.real, b.real], [a.imag, b.imag]])
    coords = [np.linalg.solve(M, [g.real, g.imag]) for g in vecs]
    for D in range(1, max_denominator + 1):
        if all(np.all(np.abs(D * m - np.round(D * m)) < tol * D) for m in coords):
            break
    else:
        raise IncompleteSolution("translations do not form a lattice")
    (x1, y1), (_, y2) = _integer_basis([tuple(int(v) for v in np.round(D * m)) for m in coords])
    u = (x1 * a + y1 * b) / D
    w = (y2 * b) / D
    return _reduce_pair(u, w)


def canonical_modulus(tau: complex) -> complex:
    """
    Representative of ``tau`` in the modular fundamental domain, folded so
    ``Re >= 0``; this is invariant under change of peripheral basis and
    under orientation reversal.
    """
    tau = complex(tau)
    if tau.imag < 0:
        tau = -tau
    if abs(tau.imag) < 1e-14:
        raise ValueError("degenerate cusp modulus {}".format(tau))
    for _ in range(1000):
        tau = tau - round(tau.real)
        if abs(tau) < 1 - 1e-13:
            tau = -1 / tau
        else:
            break
    return complex(abs(tau.real), tau.imag)


def cusp_modulus_developed(tri: Triangulation, z, cusp: int) -> complex:
    a, b = lattice_basis(cusp_translations(tri, z, cusp))
    return canonical_modulus(b / a)
