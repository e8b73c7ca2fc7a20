"""
Connected double covers from Z/2 cohomology of the dual spine.

A class in H^1(M; Z/2) is represented by one bit per face class with the
bits on the breadth-first dual spanning tree (see
:func:`veerobs.geometry.homology.dual_spanning_tree`) set to zero.  Around
each edge the bits of the faces crossed must sum to zero mod 2.  The cover
has tetrahedra ``t + s * T`` for sheets ``s in {0, 1}``; crossing a face
with bit 1 changes sheet.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import Fingerprint, GeometryError, assemble_system, solve_shapes
from .geometry.fingerprint import fingerprint_from_shapes
from .geometry.gluing import TWO_PI_I, _log_shapes
from .geometry.homology import dual_spanning_tree, edge_relations, h1_invariants
from .slopes import complete
from .triangulation import DisconnectedInput, Triangulation, find_isomorphism, serialize


class InvalidCocycle(ValueError):
    pass


@dataclass(frozen=True)
class CocycleZ2:
    bits: Tuple[int, ...]

    def __str__(self):
        return "".join(str(b) for b in self.bits)

    def is_zero(self) -> bool:
        return not any(self.bits)


@dataclass(frozen=True)
class DoubleCover:
    base: Triangulation = field(repr=False)
    cocycle: CocycleZ2
    cover: Triangulation = field(repr=False)
    projection: Tuple[Tuple[int, int], ...] = field(repr=False)
    fingerprint: Optional[Fingerprint] = None
    multiplicity: int = 1

    def sidecar(self) -> str:
        """Projection table, one ``<cover_tet> -> <base_tet>,<sheet>`` line per cover tet."""
        return "".join("{} -> {},{}\n".format(T, t, s) for T, (t, s) in enumerate(self.projection))

    def to_tri(self) -> str:
        return serialize(self.cover)


def _gf2_nullspace(rows: Sequence[Sequence[int]], n: int) -> List[Tuple[int, ...]]:
    """Basis of ``{x in GF(2)^n : row . x = 0 for every row}`` in reduced form."""
    pivots = {}  # pivot column -> row bitmask
    for r in rows:
        v = sum(1 << j for j in range(n) if r[j] % 2)
        for col in sorted(pivots):
            if v >> col & 1:
                v ^= pivots[col]
        if v:
            col = (v & -v).bit_length() - 1
            for c in list(pivots):
                if pivots[c] >> col & 1:
                    pivots[c] ^= v
            pivots[col] = v
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [0] * n
        x[f] = 1
        for col, v in pivots.items():
            if v >> f & 1:
                x[col] = 1
        basis.append(tuple(x))
    return basis


def _require_connected(tri: Triangulation):
    if not tri.is_connected():
        raise DisconnectedInput("triangulation has {} components".format(len(tri.components())))


def z2_cohomology_basis(tri: Triangulation) -> List[CocycleZ2]:
    """Basis of H^1(tri; Z/2) as tree-gauged face cocycles."""
    _require_connected(tri)
    tree = dual_spanning_tree(tri)
    gens = [k for k in range(len(tri.face_classes)) if k not in tree]
    rels = edge_relations(tri)
    restricted = [[r[k] for k in gens] for r in rels]
    out = []
    for x in _gf2_nullspace(restricted, len(gens)):
        bits = [0] * len(tri.face_classes)
        for j, k in enumerate(gens):
            bits[k] = x[j]
        out.append(CocycleZ2(tuple(bits)))
    return out


def is_cocycle(tri: Triangulation, c: CocycleZ2) -> bool:
    if len(c.bits) != len(tri.face_classes) or any(b not in (0, 1) for b in c.bits):
        return False
    return all(sum(r[k] * c.bits[k] for k in range(len(r))) % 2 == 0 for r in edge_relations(tri))


def nonzero_classes(tri: Triangulation) -> List[CocycleZ2]:
    """All ``2^d - 1`` nonzero cohomology classes, ordered by their face bits."""
    basis = z2_cohomology_basis(tri)
    out = []
    for mask in range(1, 2 ** len(basis)):
        bits = [0] * len(tri.face_classes)
        for i, b in enumerate(basis):
            if mask >> i & 1:
                bits = [x ^ y for x, y in zip(bits, b.bits)]
        out.append(CocycleZ2(tuple(bits)))
    return sorted(out, key=lambda c: c.bits)


def build_double_cover(tri: Triangulation, c: CocycleZ2) -> DoubleCover:
    if not is_cocycle(tri, c):
        raise InvalidCocycle("bits {} are not a Z/2 cocycle".format(c))
    n = tri.tet_count
    fi = tri.face_index
    gl = []
    for s in (0, 1):
        for t in range(n):
            row = []
            for f in range(4):
                t2, f2, p = tri.gluings[t][f]
                s2 = s ^ c.bits[fi[t, f][0]]
                row.append((t2 + s2 * n, f2, p))
            gl.append(tuple(row))
    name = "{}~{}".format(tri.name, c) if tri.name else None
    cover = Triangulation(tuple(gl), None, name)
    projection = tuple((T % n, T // n) for T in range(2 * n))
    return DoubleCover(tri, c, cover, projection)


def verify_covering(dc: DoubleCover) -> bool:
    """Independent slot-by-slot check of the covering map, including the deck involution."""
    base, cover, proj, c = dc.base, dc.cover, dc.projection, dc.cocycle
    n = base.tet_count
    if cover.tet_count != 2 * n or len(proj) != 2 * n:
        return False
    if sorted(proj) != [(t, s) for t in range(n) for s in (0, 1)]:
        return False
    if len(c.bits) != len(base.face_classes):
        return False
    upstairs = {p: T for T, p in enumerate(proj)}
    fi = base.face_index
    for T in range(2 * n):
        t, s = proj[T]
        for f in range(4):
            T2, f2, p = cover.gluings[T][f]
            t2, s2 = proj[T2]
            bt2, bf2, bp = base.gluings[t][f]
            if (t2, f2, p) != (bt2, bf2, bp):
                return False
            if (s2 != s) != bool(c.bits[fi[t, f][0]]):
                return False
            # deck involution: the partner tet is glued to the partner of T2 the same way
            D, D2 = upstairs[t, 1 - s], upstairs[t2, 1 - s2]
            if cover.gluings[D][f] != (D2, f2, p):
                return False
    return True


def lifted_shapes(dc: DoubleCover, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.array([z[t] for t, _ in dc.projection])


def cover_edge_residual(dc: DoubleCover, zc) -> float:
    """Max residual of the cover's own edge equations at the shapes ``zc``."""
    system = assemble_system(dc.cover)
    return float(np.max(np.abs(system.edge_rows @ _log_shapes(np.asarray(zc)) - TWO_PI_I)))


def cover_fingerprint(dc: DoubleCover, base_shapes=None) -> Fingerprint:
    """
    Fingerprint of the cover's complete structure.

    The complete structure of the base lifts to the cover, so the cover's
    shapes are the base shapes repeated on both sheets.  They are checked
    against the cover's own edge equations, and the cusp moduli are read
    off by developing the cover's cusp cross sections, which also confirms
    each cusp is complete.
    """
    if base_shapes is None:
        try:
            base_shapes = solve_shapes(assemble_system(dc.base), complete(dc.base.cusp_count))
        except GeometryError as exc:
            return Fingerprint(dc.cover.cusp_count, None, (), None, geometric=False, note=str(exc))
    zc = lifted_shapes(dc, base_shapes)
    res = cover_edge_residual(dc, zc)
    if res > 1e-9:
        raise GeometryError("lifted shapes fail the cover's edge equations (residual {:.2e})".format(res))
    try:
        return fingerprint_from_shapes(dc.cover, zc, complete(dc.cover.cusp_count))
    except GeometryError as exc:
        return Fingerprint(dc.cover.cusp_count, None, (), None, geometric=False, note=str(exc))


def double_cover_homology(tri: Triangulation) -> Tuple[Tuple[int, ...], ...]:
    """Sorted H1 invariants of the ``2^d - 1`` connected double covers of ``tri``."""
    return tuple(sorted(h1_invariants(build_double_cover(tri, c).cover) for c in nonzero_classes(tri)))


def with_cover_homology(fp: Fingerprint, tri: Triangulation) -> Fingerprint:
    return replace(fp, cover_h1=double_cover_homology(tri))


def enumerate_double_covers(tri: Triangulation, dedup: bool = True) -> List[DoubleCover]:
    """
    Connected double covers of ``tri``.

    With ``dedup`` the covers are grouped by fingerprint (or by
    combinatorial isomorphism when the cover is not geometric); each
    returned cover carries the number of classes giving it.
    """
    classes = nonzero_classes(tri)
    try:
        base_shapes = solve_shapes(assemble_system(tri), complete(tri.cusp_count))
    except GeometryError:
        base_shapes = None
    covers = []
    for c in classes:
        dc = build_double_cover(tri, c)
        fp = cover_fingerprint(dc, base_shapes) if base_shapes is not None else Fingerprint(
            dc.cover.cusp_count, None, (), None, geometric=False, note="base is not geometric")
        covers.append(replace(dc, fingerprint=with_cover_homology(fp, dc.cover)))
    if not dedup:
        return covers
    groups: List[DoubleCover] = []
    for dc in covers:
        for i, g in enumerate(groups):
            if _same_cover(g, dc):
                groups[i] = replace(g, multiplicity=g.multiplicity + 1)
                break
        else:
            groups.append(dc)
    return groups


def _same_cover(a: DoubleCover, b: DoubleCover) -> bool:
    fa, fb = a.fingerprint, b.fingerprint
    if fa is not None and fb is not None and fa.geometric and fb.geometric:
        return fa.matches(fb)
    return find_isomorphism(a.cover, b.cover) is not None
