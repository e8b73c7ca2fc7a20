"""
Transverse taut structures, veering colourings and edge-orientability.

Conventions
-----------
A coorientation is one bit per face class (in ``Triangulation.face_classes``
order).  Bit 0 ("up") means the face is cooriented from its canonical side
(side 0 in ``face_index``) into side 1; bit 1 means the opposite.  A face of
a tetrahedron is *outward* when its coorientation points out of that
tetrahedron.

In a taut tetrahedron the two outward faces, opposite vertices ``a`` and
``b``, meet along the top diagonal ``{c, d}``; the two inward faces meet
along the bottom diagonal ``{a, b}``.  The four remaining equatorial edges
form the cycle ``a - c - b - d - a``.

Chirality ``L`` colours the equatorial edges ``{c, b}`` and ``{d, a}`` red
when the labelling ``(a, b, c, d)`` is positively oriented (taking the tet's
sign in the triangulation's orientation into account) and ``{d, b}``,
``{c, a}`` red otherwise; chirality ``R`` is the mirror rule.  Chirality
``L`` reproduces the red/blue labels of the public veering census.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .triangulation import EDGE_PAIR_CLASS, InvalidInput, Perm4, Triangulation

RED, BLUE = "r", "b"
CHIRALITIES = ("L", "R")
STANDARD_CHIRALITY = "L"


class NotTaut(ValueError):
    pass


@dataclass(frozen=True)
class Coorientation:
    bits: Tuple[int, ...]

    def __str__(self):
        return "".join(str(b) for b in self.bits)

    @classmethod
    def parse(cls, text: str) -> "Coorientation":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError("coorientation must be a bit string, got {!r}".format(text))
        return cls(tuple(int(c) for c in text))

    def flipped(self) -> "Coorientation":
        return Coorientation(tuple(1 - b for b in self.bits))


@dataclass(frozen=True)
class TautAngles:
    """Per tetrahedron the index (into ``OPPOSITE_PAIRS``) of the pair carrying angle pi."""
    pi_pairs: Tuple[int, ...]


@dataclass(frozen=True)
class EdgeColoring:
    colors: Tuple[str, ...]

    def __str__(self):
        return "".join(self.colors)

    @classmethod
    def parse(cls, text: str) -> "EdgeColoring":
        text = text.strip()
        if set(text) - {RED, BLUE}:
            raise ValueError("colouring must be an r/b string, got {!r}".format(text))
        return cls(tuple(text))

    def swapped(self) -> "EdgeColoring":
        return EdgeColoring(tuple(RED if c == BLUE else BLUE for c in self.colors))


@dataclass(frozen=True)
class VeeringStructure:
    coorientation: Coorientation
    coloring: EdgeColoring
    chirality: str

    def __str__(self):
        return "{} {} {}".format(self.coorientation, self.coloring, self.chirality)

    @classmethod
    def parse(cls, text: str) -> "VeeringStructure":
        parts = text.split()
        if len(parts) != 3 or parts[2] not in CHIRALITIES:
            raise ValueError("expected '<bits> <colours> <L|R>', got {!r}".format(text))
        return cls(Coorientation.parse(parts[0]), EdgeColoring.parse(parts[1]), parts[2])


@dataclass(frozen=True)
class VeeringReport:
    ok: bool
    condition: str = ""
    location: str = ""
    detail: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "pass"
        return "fail: {} condition at {}: {}".format(self.condition, self.location, self.detail)


# -- local structure ---------------------------------------------------------

def _outward(tri: Triangulation, bits: Sequence[int], t: int, f: int) -> bool:
    k, side = tri.face_index[t, f]
    return (bits[k] == 0) == (side == 0)


def _tet_signs(tri: Triangulation):
    signs = tri.orientation()
    if signs is None:
        raise InvalidInput("non-orientable triangulation")
    return signs


def _edge_slots(tri: Triangulation):
    """Per edge class the list of ``(tet, a, b)``: the two faces of ``tet`` meeting along the slot."""
    out = []
    for ec in tri.edge_classes:
        out.append([(e.tet, e.perm[2], e.perm[3]) for e in ec.embeddings])
    return out


def _is_pi(tri, bits, t, a, b):
    return _outward(tri, bits, t, a) == _outward(tri, bits, t, b)


def equator(tri: Triangulation, bits: Sequence[int], t: int):
    """``(a, b, c, d)``: outward faces opposite ``a < b``, top diagonal ``{c, d}`` with ``c < d``."""
    out = [f for f in range(4) if _outward(tri, bits, t, f)]
    if len(out) != 2:
        raise NotTaut("tetrahedron {} has {} outward faces".format(t, len(out)))
    a, b = out
    c, d = sorted(set(range(4)) - {a, b})
    return a, b, c, d


# -- transverse taut search -------------------------------------------------

def search_transverse_taut(tri: Triangulation) -> List[Coorientation]:
    """
    Every transverse taut coorientation of ``tri``, in lexicographic bit order.

    Backtracking over face classes in index order (bit 0 before bit 1) with
    propagation: a tetrahedron may not get a third outward or inward face,
    and an edge class may not exceed two pi slots nor be left unable to
    reach two.
    """
    nf = len(tri.face_classes)
    tet_faces = [[tri.face_index[t, f] for f in range(4)] for t in range(tri.tet_count)]
    slots = _edge_slots(tri)
    # which tets and edge slots each face class touches
    touch_tets: Dict[int, set] = {k: set() for k in range(nf)}
    for t in range(tri.tet_count):
        for k, _ in tet_faces[t]:
            touch_tets[k].add(t)
    touch_edges: Dict[int, set] = {k: set() for k in range(nf)}
    for e, sl in enumerate(slots):
        for t, a, b in sl:
            touch_edges[tri.face_index[t, a][0]].add(e)
            touch_edges[tri.face_index[t, b][0]].add(e)

    bits: List[Optional[int]] = [None] * nf
    found: List[Coorientation] = []

    def out_state(t, f):
        k, side = tet_faces[t][f]
        if bits[k] is None:
            return None
        return (bits[k] == 0) == (side == 0)

    def tet_ok(t):
        states = [out_state(t, f) for f in range(4)]
        return states.count(True) <= 2 and states.count(False) <= 2

    def edge_ok(e):
        pis = open_ = 0
        for t, a, b in slots[e]:
            sa, sb = out_state(t, a), out_state(t, b)
            if sa is None or sb is None:
                open_ += 1
            elif sa == sb:
                pis += 1
        return pis <= 2 and pis + open_ >= 2

    def extend(k):
        if k == nf:
            found.append(Coorientation(tuple(bits)))
            return
        for value in (0, 1):
            bits[k] = value
            if all(tet_ok(t) for t in touch_tets[k]) and all(edge_ok(e) for e in touch_edges[k]):
                extend(k + 1)
        bits[k] = None

    extend(0)
    return found


def angles_from_coorientation(tri: Triangulation, co: Coorientation) -> TautAngles:
    bits = co.bits
    if len(bits) != len(tri.face_classes):
        raise NotTaut("coorientation has {} bits for {} faces".format(len(bits), len(tri.face_classes)))
    pairs = []
    for t in range(tri.tet_count):
        a, b, c, d = equator(tri, bits, t)
        pairs.append(EDGE_PAIR_CLASS[c, d])
    for e, sl in enumerate(_edge_slots(tri)):
        pis = sum(1 for t, a, b in sl if _is_pi(tri, bits, t, a, b))
        if pis != 2:
            raise NotTaut("edge class {} has {} pi angles".format(e, pis))
    return TautAngles(tuple(pairs))


# -- colouring --------------------------------------------------------------

class _ParityUnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.parity = [0] * n

    def find(self, x):
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        # compress, accumulating parity from the root down
        acc = 0
        for y in reversed(path):
            acc ^= self.parity[y]
            self.parity[y] = acc
            self.parent[y] = x
        return x

    def relation(self, x):
        root = self.find(x)
        return root, (self.parity[x] if x != root else 0)

    def union(self, x, y, diff) -> bool:
        """Impose ``value(x) xor value(y) == diff``; False on contradiction."""
        rx, px = self.relation(x)
        ry, py = self.relation(y)
        if rx == ry:
            return (px ^ py) == diff
        self.parent[ry] = rx
        self.parity[ry] = px ^ py ^ diff
        return True


def _red_equatorial(sign: int, chirality: str, a, b, c, d):
    """The two equatorial edges that must be red, and the two that must be blue."""
    first = ((c, b), (d, a))
    second = ((d, b), (c, a))
    red, blue = (first, second) if sign == 1 else (second, first)
    if chirality == "R":
        red, blue = blue, red
    return red, blue


def solve_coloring(tri: Triangulation, co: Coorientation, chirality: str) -> Optional[EdgeColoring]:
    """Colouring forced by ``co`` under ``chirality``, or None when the constraints clash."""
    if chirality not in CHIRALITIES:
        raise ValueError("chirality must be L or R")
    signs = _tet_signs(tri)
    ne = len(tri.edge_classes)
    anchor = ne  # node standing for the colour red
    uf = _ParityUnionFind(ne + 1)
    for t in range(tri.tet_count):
        a, b, c, d = equator(tri, co.bits, t)
        sign = Perm4((a, b, c, d)).sign * signs[t]
        red, blue = _red_equatorial(sign, chirality, a, b, c, d)
        for u, v in red:
            if not uf.union(tri.edge_of_slot[t, frozenset((u, v))], anchor, 0):
                return None
        for u, v in blue:
            if not uf.union(tri.edge_of_slot[t, frozenset((u, v))], anchor, 1):
                return None
    colors = []
    ra, _ = uf.relation(anchor)
    for e in range(ne):
        r, p = uf.relation(e)
        if r != ra:
            colors.append(BLUE)
        else:
            colors.append(RED if p == uf.relation(anchor)[1] else BLUE)
    return EdgeColoring(tuple(colors))


# -- verification -----------------------------------------------------------

def verify_veering(tri: Triangulation, vs: VeeringStructure) -> VeeringReport:
    """
    Re-check every local condition from scratch.

    The edge condition is checked by walking around each edge and counting
    the places where consecutive faces are cooriented in opposite
    rotational directions; it is not derived from the pi-angle bookkeeping
    used by the search.
    """
    bits = vs.coorientation.bits
    if len(bits) != len(tri.face_classes):
        return VeeringReport(False, "shape", "coorientation",
                             "{} bits for {} faces".format(len(bits), len(tri.face_classes)))
    if len(vs.coloring.colors) != len(tri.edge_classes):
        return VeeringReport(False, "shape", "coloring",
                             "{} colours for {} edges".format(len(vs.coloring.colors), len(tri.edge_classes)))
    if vs.chirality not in CHIRALITIES:
        return VeeringReport(False, "shape", "chirality", repr(vs.chirality))
    signs = tri.orientation()
    if signs is None:
        return VeeringReport(False, "orientability", "triangulation", "non-orientable")

    # tetrahedron condition: two faces in, two out
    for t in range(tri.tet_count):
        n_out = sum(1 for f in range(4) if _outward(tri, bits, t, f))
        if n_out != 2:
            return VeeringReport(False, "tetrahedron", "tet {}".format(t),
                                 "{} outward faces".format(n_out))

    # edge condition: around each edge, exactly two switches of rotational direction
    for ec in tri.edge_classes:
        directions = []
        for e in ec.embeddings:
            # the walk leaves tet e.tet through the face opposite perm[3]
            directions.append(_outward(tri, bits, e.tet, e.perm[3]))
        switches = sum(1 for i in range(len(directions)) if directions[i] != directions[i - 1])
        if switches != 2:
            return VeeringReport(False, "edge", "edge {}".format(ec.index),
                                 "{} incompatible consecutive face pairs".format(switches))

    # colour condition: equatorial edges alternate with the chirality's phase
    colors = vs.coloring.colors
    for t in range(tri.tet_count):
        out = [f for f in range(4) if _outward(tri, bits, t, f)]
        a, b = out
        c, d = sorted(set(range(4)) - set(out))
        cycle = [(a, c), (c, b), (b, d), (d, a)]
        col = [colors[tri.edge_of_slot[t, frozenset(e)]] for e in cycle]
        if col[0] != col[2] or col[1] != col[3] or col[0] == col[1]:
            return VeeringReport(False, "colour", "tet {}".format(t),
                                 "equatorial colours {} do not alternate".format("".join(col)))
        sign = Perm4((a, b, c, d)).sign * signs[t]
        # (c, b) is red exactly for (sign +1, L) and (sign -1, R)
        want_cb = RED if (sign == 1) == (vs.chirality == "L") else BLUE
        if col[1] != want_cb:
            return VeeringReport(False, "colour", "tet {}".format(t),
                                 "equatorial colours {} have the wrong chirality".format("".join(col)))
    return VeeringReport(True)


def find_veering(tri: Triangulation, chiralities: Sequence[str] = CHIRALITIES) -> Optional[VeeringStructure]:
    """First veering structure on ``tri`` (taut structures in order, then chirality), or None."""
    tri.require_valid()
    for co in search_transverse_taut(tri):
        for chir in chiralities:
            col = solve_coloring(tri, co, chir)
            if col is None:
                continue
            vs = VeeringStructure(co, col, chir)
            if verify_veering(tri, vs):
                return vs
    return None


def all_veering(tri: Triangulation) -> List[VeeringStructure]:
    out = []
    for co in search_transverse_taut(tri):
        for chir in CHIRALITIES:
            col = solve_coloring(tri, co, chir)
            if col is not None:
                vs = VeeringStructure(co, col, chir)
                if verify_veering(tri, vs):
                    out.append(vs)
    return out


# -- edge orientability -----------------------------------------------------

def _local_order(tri, bits, colors, t):
    """Vertices ``(v0, v1, v2, v3)`` of the admissible local edge orientation of tet ``t``."""
    a, b, c, d = equator(tri, bits, t)
    top = colors[tri.edge_of_slot[t, frozenset((c, d))]]
    # v1 -> v2 is the top diagonal; v3 is the bottom vertex joined to v1 by an
    # equatorial edge of the top diagonal's colour
    v1, v2 = c, d
    v3 = a if colors[tri.edge_of_slot[t, frozenset((c, a))]] == top else b
    v0 = b if v3 == a else a
    return v0, v1, v2, v3


def is_edge_orientable(tri: Triangulation, vs: VeeringStructure) -> bool:
    """
    Whether the edges can be oriented so every tetrahedron shows the admissible pattern.

    Each tetrahedron allows the orientation induced by the vertex order
    ``v0 < v1 < v2 < v3`` of :func:`_local_order` or its reverse; a parity
    union-find over tetrahedra and edge classes decides consistency.
    """
    bits, colors = vs.coorientation.bits, vs.coloring.colors
    n = tri.tet_count
    uf = _ParityUnionFind(n + len(tri.edge_classes))
    for t in range(n):
        order = _local_order(tri, bits, colors, t)
        rank = {v: i for i, v in enumerate(order)}
        for ec in tri.edge_classes:
            for e in ec.embeddings:
                if e.tet != t:
                    continue
                u, v = e.perm[0], e.perm[1]
                # edge variable 0 means oriented away from the tracked end
                flip = 0 if rank[u] < rank[v] else 1
                if not uf.union(t, n + ec.index, flip):
                    return False
    return True


# -- lifting ----------------------------------------------------------------

def lift_veering(base: Triangulation, vs: VeeringStructure, cover: Triangulation,
                 projection: Sequence[Tuple[int, int]]) -> VeeringStructure:
    """
    Pull a veering structure back along a covering map.

    ``projection[T] = (t, sheet)`` sends cover tet ``T`` to base tet ``t``
    with vertex labels preserved.
    """
    bits = []
    for (T, f) in cover.face_classes:
        t = projection[T][0]
        bits.append(0 if _outward(base, vs.coorientation.bits, t, f) else 1)
    colors = []
    for ec in cover.edge_classes:
        e = ec.embeddings[0]
        t = projection[e.tet][0]
        colors.append(vs.coloring.colors[base.edge_of_slot[t, frozenset(e.vertices)]])
    chir = vs.chirality
    base_signs, cover_signs = base.orientation(), cover.orientation()
    if cover_signs[0] != base_signs[projection[0][0]]:
        chir = "R" if chir == "L" else "L"
    return VeeringStructure(Coorientation(tuple(bits)), EdgeColoring(tuple(colors)), chir)
