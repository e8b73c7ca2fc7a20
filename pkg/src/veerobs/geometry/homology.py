"""
First homology of an ideal triangulation from the dual spine.

The dual 2-complex has one vertex per tetrahedron, one edge per face and
one 2-cell per edge of the triangulation.  Collapsing a breadth-first
spanning tree of the dual graph (rooted at tet 0) leaves one generator per
non-tree face; each edge of the triangulation gives the relation read off
by walking around it.
"""
from __future__ import annotations

from collections import deque

from ..triangulation import Triangulation


def dual_spanning_tree(tri: Triangulation):
    """Face-class indices on a BFS spanning tree of the dual graph from tet 0."""
    fi = tri.face_index
    seen = {0}
    tree = set()
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for f in range(4):
            t2, _, _ = tri.gluings[t][f]
            if t2 not in seen:
                seen.add(t2)
                tree.add(fi[t, f][0])
                queue.append(t2)
    return tree


def edge_relations(tri: Triangulation):
    """Integer relation row per edge class over all face classes (signed crossings)."""
    fi = tri.face_index
    nf = len(tri.face_classes)
    rels = []
    for ec in tri.edge_classes:
        row = [0] * nf
        for emb in ec.embeddings:
            k, side = fi[emb.tet, emb.perm[3]]
            row[k] += 1 if side == 0 else -1
        rels.append(row)
    return rels


def presentation_matrix(tri: Triangulation):
    """Relations restricted to the non-tree generators, and those generator indices."""
    tree = dual_spanning_tree(tri)
    gens = [k for k in range(len(tri.face_classes)) if k not in tree]
    rels = edge_relations(tri)
    return [[r[k] for k in gens] for r in rels], gens


def smith_normal_form_diagonal(matrix):
    """Nonzero diagonal entries of the Smith normal form of an integer matrix."""
    A = [list(map(int, r)) for r in matrix]
    if not A or not A[0]:
        return []
    m, n = len(A), len(A[0])
    diag = []
    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute entry in the remaining block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        A[t], A[i] = A[i], A[t]
        for r in A:
            r[t], r[j] = r[j], r[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    for r in A:
                        r[j] -= q * r[t]
                if A[t][j]:
                    done = False
            if done:
                # divisibility condition against the rest of the block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
                if bad is None:
                    break
                A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
                continue
            # move the smallest nonzero entry of row/column t to the pivot
            best = (abs(p), t, t)
            for i in range(t + 1, m):
                if A[i][t] and abs(A[i][t]) < best[0]:
                    best = (abs(A[i][t]), i, t)
            for j in range(t + 1, n):
                if A[t][j] and abs(A[t][j]) < best[0]:
                    best = (abs(A[t][j]), t, j)
            _, i, j = best
            if i != t:
                A[t], A[i] = A[i], A[t]
            if j != t:
                for r in A:
                    r[t], r[j] = r[j], r[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def h1_invariants(tri: Triangulation):
    """
    Invariant factors of H_1, torsion first then 0 for each free summand.

    For example ``(5, 0)`` is ``Z/5 + Z``.
    """
    M, gens = presentation_matrix(tri)
    diag = smith_normal_form_diagonal(M) if M and gens else []
    torsion = sorted(d for d in diag if d > 1)
    free = len(gens) - len(diag)
    return tuple(torsion) + (0,) * free


def format_h1(factors) -> str:
    parts = ["Z/{}".format(d) if d else "Z" for d in factors]
    return "+".join(parts) if parts else "0"


def parse_h1(text: str):
    text = text.strip()
    if text in ("", "0"):
        return ()
    out = []
    for part in text.split("+"):
        part = part.strip()
        if part == "Z":
            out.append(0)
        elif part.startswith("Z/"):
            out.append(int(part[2:]))
        else:
            raise ValueError("bad homology term {!r}".format(part))
    torsion = sorted(d for d in out if d > 1)
    return tuple(torsion) + (0,) * out.count(0)
