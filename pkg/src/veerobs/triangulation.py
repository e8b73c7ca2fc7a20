"""
Ideal triangulations of cusped 3-manifolds.

A triangulation is a finite set of tetrahedra with every face glued to
exactly one other face.  Face ``f`` of a tetrahedron is the face opposite
vertex ``f``; a gluing ``(t, f) -> (t', f', p)`` sends vertex ``i`` of ``t``
to vertex ``p(i)`` of ``t'`` and satisfies ``p(f) == f'``.

Edge traversal convention
-------------------------
An edge embedding is a pair ``(tet, sigma)`` where ``sigma`` is a vertex
permutation with ``sigma(0), sigma(1)`` the endpoints of the edge.  From
``(t, sigma)`` we cross the face opposite ``sigma(3)`` and arrive at
``(t', g * sigma * (2 3))`` where ``g`` is the gluing permutation.  Each edge
class is started at its lexicographically least ``(tet, u, v)`` slot with
``u < v`` and ``sigma = (u, v, a, b)``, ``a < b``.  ``sigma(0)`` therefore
tracks one fixed end of the edge all the way around.
"""
from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence


class TriangulationError(ValueError):
    pass


class TriSyntaxError(TriangulationError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = "line {}: {}".format(lineno, message)
        super().__init__(message)


class InvolutionError(TriangulationError):
    pass


class SelfGluingError(TriangulationError):
    pass


class InvalidInput(TriangulationError):
    """Raised by operations that refuse flagged (non-orientable, non-torus) inputs."""


class DisconnectedInput(TriangulationError):
    pass


class Perm4(tuple):
    """
    A permutation of {0, 1, 2, 3} stored as its tuple of images.

    ``p * q`` is the composition ``p o q`` (apply ``q`` first).
    """

    __slots__ = ()

    def __new__(cls, images: Iterable[int]):
        images = tuple(int(i) for i in images)
        if sorted(images) != [0, 1, 2, 3]:
            raise ValueError("not a permutation of 0..3: {!r}".format(images))
        return super().__new__(cls, images)

    @classmethod
    def from_string(cls, s: str) -> "Perm4":
        if len(s) != 4 or not s.isdigit():
            raise ValueError("bad permutation string {!r}".format(s))
        return cls(int(c) for c in s)

    def __call__(self, i: int) -> int:
        return tuple.__getitem__(self, i)

    def __mul__(self, other: "Perm4") -> "Perm4":
        return Perm4(self[other[i]] for i in range(4))

    def inverse(self) -> "Perm4":
        inv = [0] * 4
        for i, j in enumerate(self):
            inv[j] = i
        return Perm4(inv)

    @property
    def sign(self) -> int:
        s = 1
        for i in range(4):
            for j in range(i + 1, 4):
                if self[i] > self[j]:
                    s = -s
        return s

    def is_identity(self) -> bool:
        return tuple(self) == (0, 1, 2, 3)

    def __str__(self):
        return "".join(str(i) for i in self)

    def __repr__(self):
        return "Perm4({})".format(str(self))


IDENTITY = Perm4((0, 1, 2, 3))
ALL_PERMS = tuple(Perm4(p) for p in itertools.permutations(range(4)))
EVEN_PERMS = tuple(p for p in ALL_PERMS if p.sign == 1)
SWAP23 = Perm4((0, 1, 3, 2))

# Opposite-edge pairs {01,23}, {02,13}, {03,12}; index k carries the shape
# parameter z, z', z'' respectively.
EDGE_PAIR_CLASS = {}
for _k, (_a, _b) in enumerate([(0, 1), (0, 2), (0, 3)]):
    _c, _d = sorted(set(range(4)) - {_a, _b})
    for _e in [(_a, _b), (_b, _a), (_c, _d), (_d, _c)]:
        EDGE_PAIR_CLASS[_e] = _k
OPPOSITE_PAIRS = ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2))


def opposite_edge(u, v):
    a, b = sorted(set(range(4)) - {u, v})
    return a, b


@dataclass(frozen=True)
class EdgeEmbedding:
    tet: int
    perm: Perm4

    @property
    def vertices(self):
        return self.perm[0], self.perm[1]

    @property
    def pair_class(self) -> int:
        return EDGE_PAIR_CLASS[self.perm[0], self.perm[1]]


@dataclass(frozen=True)
class EdgeClass:
    index: int
    embeddings: tuple

    @property
    def degree(self) -> int:
        return len(self.embeddings)

    @property
    def slots(self):
        """Cyclically ordered ``(tet, (u, v), sign)`` with ``u`` the tracked end."""
        return [(e.tet, (e.perm[0], e.perm[1]), e.perm.sign) for e in self.embeddings]


@dataclass(frozen=True)
class CuspLink:
    index: int
    euler_characteristic: int
    orientable: bool
    corners: tuple = ()

    @property
    def is_torus(self) -> bool:
        return self.euler_characteristic == 0 and self.orientable


@dataclass(frozen=True)
class Triangulation:
    gluings: tuple
    cusp_rows: Optional[tuple] = None
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        gl = tuple(
            tuple((int(t), int(f), p if isinstance(p, Perm4) else Perm4(p)) for (t, f, p) in row)
            for row in self.gluings
        )
        object.__setattr__(self, "gluings", gl)
        n = len(gl)
        if n == 0:
            raise TriangulationError("a triangulation needs at least one tetrahedron")
        for t, row in enumerate(gl):
            if len(row) != 4:
                raise TriangulationError("tetrahedron {} has {} faces".format(t, len(row)))
            for f, (t2, f2, p) in enumerate(row):
                if not 0 <= t2 < n or not 0 <= f2 < 4:
                    raise TriangulationError("tetrahedron {} face {} glued out of range".format(t, f))
                if p[f] != f2:
                    raise InvolutionError(
                        "tet {} face {}: permutation {} sends {} to {} not {}".format(t, f, p, f, p[f], f2))
                back = gl[t2][f2]
                if back[0] != t or back[1] != f or back[2] != p.inverse():
                    raise InvolutionError(
                        "gluing of tet {} face {} is not matched by tet {} face {}".format(t, f, t2, f2))
                if t2 == t and f2 == f:
                    raise SelfGluingError("tet {} face {} glued to itself".format(t, f))
        if self.cusp_rows is not None:
            rows = tuple((tuple(int(x) for x in m), tuple(int(x) for x in l)) for m, l in self.cusp_rows)
            for m, l in rows:
                if len(m) != 3 * n or len(l) != 3 * n:
                    raise TriangulationError("cusp rows must have length 3*tet_count = {}".format(3 * n))
            object.__setattr__(self, "cusp_rows", rows)

    @property
    def tet_count(self) -> int:
        return len(self.gluings)

    def glued(self, tet: int, face: int):
        return self.gluings[tet][face]

    def with_cusp_rows(self, rows) -> "Triangulation":
        return Triangulation(self.gluings, rows, self.name)

    def with_name(self, name) -> "Triangulation":
        return Triangulation(self.gluings, self.cusp_rows, name)

    # -- combinatorics ------------------------------------------------------

    @cached_property
    def face_classes(self):
        """Canonical (tet, face) < partner representatives, in index order."""
        reps = []
        for t in range(self.tet_count):
            for f in range(4):
                t2, f2, _ = self.gluings[t][f]
                if (t, f) <= (t2, f2):
                    reps.append((t, f))
        return tuple(reps)

    @cached_property
    def face_index(self):
        """Map every (tet, face) to ``(face class index, side)``; side 0 is the canonical rep."""
        idx = {}
        for k, (t, f) in enumerate(self.face_classes):
            t2, f2, _ = self.gluings[t][f]
            idx[t, f] = (k, 0)
            idx[t2, f2] = (k, 1)
        return idx

    @cached_property
    def edge_classes(self):
        return tuple(edge_classes(self))

    @cached_property
    def edge_of_slot(self):
        """Map ``(tet, frozenset{u, v})`` to the edge class index."""
        out = {}
        for ec in self.edge_classes:
            for e in ec.embeddings:
                out[e.tet, frozenset(e.vertices)] = ec.index
        return out

    @cached_property
    def vertex_classes(self):
        parent = {(t, v): (t, v) for t in range(self.tet_count) for v in range(4)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for t in range(self.tet_count):
            for f in range(4):
                t2, _, p = self.gluings[t][f]
                for v in range(4):
                    if v != f:
                        a, b = find((t, v)), find((t2, p[v]))
                        if a != b:
                            if b < a:
                                a, b = b, a
                            parent[b] = a
        classes = {}
        for key in sorted(parent):
            classes.setdefault(find(key), []).append(key)
        ordered = sorted(classes.values(), key=lambda c: c[0])
        out = {}
        for k, corners in enumerate(ordered):
            for c in corners:
                out[c] = k
        return out

    @property
    def cusp_count(self) -> int:
        return len(set(self.vertex_classes.values()))

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def components(self):
        seen = [-1] * self.tet_count
        comps = []
        for s in range(self.tet_count):
            if seen[s] >= 0:
                continue
            comp = []
            seen[s] = len(comps)
            queue = deque([s])
            while queue:
                t = queue.popleft()
                comp.append(t)
                for t2, _, _ in self.gluings[t]:
                    if seen[t2] < 0:
                        seen[t2] = len(comps)
                        queue.append(t2)
            comps.append(sorted(comp))
        return comps

    def orientation(self):
        """Per-tet sign making every gluing orientation reversing, or None."""
        signs = [0] * self.tet_count
        for s in range(self.tet_count):
            if signs[s]:
                continue
            signs[s] = 1
            queue = deque([s])
            while queue:
                t = queue.popleft()
                for t2, _, p in self.gluings[t]:
                    want = -p.sign * signs[t]
                    if signs[t2] == 0:
                        signs[t2] = want
                        queue.append(t2)
                    elif signs[t2] != want:
                        return None
        return signs

    def is_orientable(self) -> bool:
        return self.orientation() is not None

    def is_oriented(self) -> bool:
        """Every gluing permutation is odd, so all tets share the labelling orientation."""
        return all(p.sign == -1 for row in self.gluings for (_, _, p) in row)

    def problems(self):
        """Reasons a downstream operation should refuse this triangulation."""
        out = []
        if not self.is_orientable():
            out.append("non-orientable")
        for link in cusp_links(self):
            if not link.is_torus:
                out.append("cusp {} link has chi={} orientable={}".format(
                    link.index, link.euler_characteristic, link.orientable))
        if len(self.edge_classes) != self.tet_count:
            out.append("{} edge classes for {} tetrahedra".format(len(self.edge_classes), self.tet_count))
        return out

    def require_valid(self):
        probs = self.problems()
        if probs:
            raise InvalidInput("{}: {}".format(self.name or "triangulation", "; ".join(probs)))

    def relabel(self, tet_map: Sequence[int], perms: Sequence[Perm4]) -> "Triangulation":
        """
        Relabel tet ``t`` as ``tet_map[t]`` with vertex ``i`` becoming ``perms[t](i)``.

        Cusp rows travel with their cusps (whose indices may change) when
        every vertex permutation is even; otherwise they are dropped, since an
        odd relabelling reverses the shape-parameter convention.
        """
        n = self.tet_count
        perms = [p if isinstance(p, Perm4) else Perm4(p) for p in perms]
        new = [[None] * 4 for _ in range(n)]
        for t in range(n):
            for f in range(4):
                t2, f2, g = self.gluings[t][f]
                nt, nt2 = tet_map[t], tet_map[t2]
                h = perms[t2] * g * perms[t].inverse()
                new[nt][perms[t][f]] = (nt2, perms[t2][f2], h)
        out = Triangulation(tuple(tuple(r) for r in new), None, self.name)
        if self.cusp_rows is None or any(p.sign != 1 for p in perms):
            return out
        # cusp indices follow first-corner order, which relabelling can change
        moved = {}
        for (t, v), c in self.vertex_classes.items():
            moved[c] = out.vertex_classes[tet_map[t], perms[t][v]]
        rows = [None] * len(self.cusp_rows)
        for c, (m, l) in enumerate(self.cusp_rows):
            rows[moved[c]] = (_relabel_row(m, tet_map, perms), _relabel_row(l, tet_map, perms))
        return out.with_cusp_rows(rows)

    def disjoint_union(self, other: "Triangulation") -> "Triangulation":
        n = self.tet_count
        rows = list(self.gluings) + [
            tuple((t + n, f, p) for (t, f, p) in row) for row in other.gluings]
        return Triangulation(tuple(rows))

    def __str__(self):
        return serialize(self)


def _relabel_row(row, tet_map, perms):
    out = [0] * len(row)
    for t, p in enumerate(perms):
        for k, (a, b, _, _) in enumerate(OPPOSITE_PAIRS):
            nk = EDGE_PAIR_CLASS[p[a], p[b]]
            out[3 * tet_map[t] + nk] = row[3 * t + k]
    return tuple(out)


# -- edges and cusps ---------------------------------------------------------

def edge_classes(tri: Triangulation):
    """Edge classes with cyclically ordered embeddings (see module docstring)."""
    seen = {}
    classes = []
    for t in range(tri.tet_count):
        for u, v in itertools.combinations(range(4), 2):
            if (t, frozenset((u, v))) in seen:
                continue
            a, b = opposite_edge(u, v)
            start = Perm4((u, v, a, b))
            embs = []
            cur_t, cur = t, start
            while True:
                key = (cur_t, frozenset((cur[0], cur[1])))
                if key in seen:
                    if cur_t == t and cur == start:
                        break
                    raise InvalidInput("edge through tet {} vertices {}{} is identified with itself "
                                       "in reverse".format(cur_t, cur[0], cur[1]))
                seen[key] = len(classes)
                embs.append(EdgeEmbedding(cur_t, cur))
                t2, _, g = tri.gluings[cur_t][cur[3]]
                cur_t, cur = t2, g * cur * SWAP23
            classes.append(EdgeClass(len(classes), tuple(embs)))
    return classes


def cusp_links(tri: Triangulation):
    """One CuspLink per vertex class, from the induced triangulation of the link."""
    vc = tri.vertex_classes
    k = tri.cusp_count
    faces = [0] * k
    verts = [0] * k
    for (t, v), c in vc.items():
        faces[c] += 1
    for ec in tri.edge_classes:
        e = ec.embeddings[0]
        verts[vc[e.tet, e.perm[0]]] += 1
        verts[vc[e.tet, e.perm[1]]] += 1
    links = []
    for c in range(k):
        corners = sorted(key for key, cc in vc.items() if cc == c)
        # V - E + F with E = 3F/2 (F is even for a closed link)
        chi = verts[c] - faces[c] // 2
        links.append(CuspLink(c, chi, _link_orientable(tri, corners), tuple(corners)))
    return links


def _link_orientable(tri, corners):
    cornerset = set(corners)
    sign = {}
    for start in corners:
        if start in sign:
            continue
        sign[start] = 1
        queue = deque([start])
        while queue:
            t, v = queue.popleft()
            for f in range(4):
                if f == v:
                    continue
                t2, _, g = tri.gluings[t][f]
                nxt = (t2, g[v])
                assert nxt in cornerset
                want = -g.sign * sign[t, v]
                if nxt not in sign:
                    sign[nxt] = want
                    queue.append(nxt)
                elif sign[nxt] != want:
                    return False
    return True


# -- isomorphisms ------------------------------------------------------------

@dataclass(frozen=True)
class Isomorphism:
    tet_map: tuple
    perms: tuple

    def is_isomorphism(self, a: Triangulation, b: Triangulation) -> bool:
        if a.tet_count != b.tet_count or sorted(self.tet_map) != list(range(b.tet_count)):
            return False
        for t in range(a.tet_count):
            for f in range(4):
                t2, f2, g = a.gluings[t][f]
                bt, bf, bg = b.gluings[self.tet_map[t]][self.perms[t][f]]
                if bt != self.tet_map[t2] or bf != self.perms[t2][f2]:
                    return False
                if bg != self.perms[t2] * g * self.perms[t].inverse():
                    return False
        return True


def find_isomorphism(a: Triangulation, b: Triangulation) -> Optional[Isomorphism]:
    """
    Exhaustive search for a combinatorial isomorphism ``a -> b``.

    Tries every image tetrahedron and each of the 24 vertex maps for tet 0 of
    ``a`` and propagates across faces.  ``a`` must be connected.
    """
    n = a.tet_count
    if n != b.tet_count:
        return None
    if not a.is_connected():
        raise DisconnectedInput("find_isomorphism needs a connected source")
    for tb in range(n):
        for p in ALL_PERMS:
            iso = _extend(a, b, tb, p)
            if iso is not None:
                return iso
    return None


def _extend(a, b, tb, p):
    n = a.tet_count
    tmap = [-1] * n
    pmap = [None] * n
    used = [False] * n
    tmap[0], pmap[0], used[tb] = tb, p, True
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for f in range(4):
            t2, f2, g = a.gluings[t][f]
            bt, bf, bg = b.gluings[tmap[t]][pmap[t][f]]
            q = bg * pmap[t] * g.inverse()
            if tmap[t2] < 0:
                if used[bt]:
                    return None
                tmap[t2], pmap[t2], used[bt] = bt, q, True
                queue.append(t2)
            elif tmap[t2] != bt or pmap[t2] != q:
                return None
    return Isomorphism(tuple(tmap), tuple(pmap))


# -- TRI-v1 text format ------------------------------------------------------

_TET_LINE = re.compile(r"^(\d+)\s*:\s*(.*)$")
_GLUE = re.compile(r"^(\d+):([0-3]{4})$")
_ROW = re.compile(r"^(meridian|longitude)\s+(\d+)\s*:\s*(.*)$")


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_triangulation(text: str, name: Optional[str] = None) -> Triangulation:
    lines = list(_lines(text))
    if not lines or lines[0][1] != "% TRI v1":
        raise TriSyntaxError("expected header '% TRI v1'", lines[0][0] if lines else 1)
    pos = 1

    def need(what):
        if pos >= len(lines):
            raise TriSyntaxError("unexpected end of file, expected {}".format(what), lines[-1][0])
        return lines[pos]

    lineno, line = need("'tets <T>'")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "tets" or not parts[1].isdigit() or int(parts[1]) < 1:
        raise TriSyntaxError("expected 'tets <T>'", lineno)
    n = int(parts[1])
    pos += 1
    gluings = []
    for i in range(n):
        lineno, line = need("tetrahedron {}".format(i))
        m = _TET_LINE.match(line)
        if not m or int(m.group(1)) != i:
            raise TriSyntaxError("expected gluing line for tetrahedron {}".format(i), lineno)
        entries = m.group(2).split()
        if len(entries) != 4:
            raise TriSyntaxError("expected 4 face gluings", lineno)
        row = []
        for e in entries:
            g = _GLUE.match(e)
            if not g:
                raise TriSyntaxError("bad gluing entry {!r}".format(e), lineno)
            try:
                perm = Perm4.from_string(g.group(2))
            except ValueError as exc:
                raise TriSyntaxError(str(exc), lineno) from None
            t2 = int(g.group(1))
            if t2 >= n:
                raise TriSyntaxError("tetrahedron index {} out of range".format(t2), lineno)
            row.append((t2, perm[len(row)], perm))
        gluings.append(tuple(row))
        pos += 1
    rows = None
    if pos < len(lines):
        lineno, line = lines[pos]
        parts = line.split()
        if len(parts) != 2 or parts[0] != "cusps" or not parts[1].isdigit():
            raise TriSyntaxError("expected 'cusps <k>'", lineno)
        k = int(parts[1])
        pos += 1
        rows = []
        for c in range(k):
            pair = []
            for kind in ("meridian", "longitude"):
                lineno, line = need("{} {}".format(kind, c))
                m = _ROW.match(line)
                if not m or m.group(1) != kind or int(m.group(2)) != c:
                    raise TriSyntaxError("expected '{} {}: ...'".format(kind, c), lineno)
                try:
                    vals = [int(x) for x in m.group(3).split()]
                except ValueError:
                    raise TriSyntaxError("non-integer cusp row entry", lineno) from None
                if len(vals) != 3 * n:
                    raise TriSyntaxError("cusp row needs {} integers, got {}".format(3 * n, len(vals)), lineno)
                pair.append(tuple(vals))
                pos += 1
            rows.append(tuple(pair))
        if pos < len(lines):
            raise TriSyntaxError("trailing content", lines[pos][0])
    tri = Triangulation(tuple(gluings), rows, name)
    return tri


def serialize(tri: Triangulation) -> str:
    out = ["% TRI v1"]
    if tri.name:
        out.append("# {}".format(tri.name))
    out.append("tets {}".format(tri.tet_count))
    for t, row in enumerate(tri.gluings):
        out.append("{}: {}".format(t, " ".join("{}:{}".format(t2, p) for (t2, _, p) in row)))
    if tri.cusp_rows is not None:
        out.append("cusps {}".format(len(tri.cusp_rows)))
        for c, (m, l) in enumerate(tri.cusp_rows):
            out.append("meridian {}: {}".format(c, " ".join(str(x) for x in m)))
            out.append("longitude {}: {}".format(c, " ".join(str(x) for x in l)))
    return "\n".join(out) + "\n"
