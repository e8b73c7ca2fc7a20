"""
Isomorphism signatures for 3-manifold triangulations.

This is the packed base-64 encoding used by Regina and by the veering
census: a tetrahedron count, a sequence of 2-bit facet actions (0 boundary,
1 glued to a new tetrahedron, 2 glued to an earlier one), destinations for
the type-2 actions, and the gluing permutations for those actions as
indices into the lexicographically ordered list of S4.  The canonical
signature is the smallest string over all choices of starting tetrahedron
and starting vertex labelling.
"""
from __future__ import annotations

from .triangulation import ALL_PERMS, IDENTITY, Perm4, Triangulation, TriangulationError

ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-"
_VALUE = {c: i for i, c in enumerate(ALPHABET)}
_PERM_INDEX = {p: i for i, p in enumerate(ALL_PERMS)}


class IsoSigError(TriangulationError):
    pass


class BadCharacter(IsoSigError):
    pass


class TruncatedSignature(IsoSigError):
    pass


class NonManifoldGluing(IsoSigError):
    pass


class _Reader:
    def __init__(self, sig):
        for i, c in enumerate(sig):
            if c not in _VALUE:
                raise BadCharacter("character {!r} at position {} is not in the signature alphabet".format(c, i))
        self.sig = sig
        self.pos = 0

    def value(self, nchars=1):
        if self.pos + nchars > len(self.sig):
            raise TruncatedSignature("signature ends at position {}".format(len(self.sig)))
        v = 0
        for k in range(nchars):
            v |= _VALUE[self.sig[self.pos + k]] << (6 * k)
        self.pos += nchars
        return v

    def done(self):
        return self.pos >= len(self.sig)


def _chars_needed(n):
    k = 1
    while n >= (1 << (6 * k)):
        k += 1
    return k


def _encode_int(v, nchars):
    return "".join(ALPHABET[(v >> (6 * k)) & 63] for k in range(nchars))


def decode_isosig(sig: str, name=None) -> Triangulation:
    """Decode a single-component signature into a closed (ideal) triangulation."""
    r = _Reader(sig.strip())
    n = r.value()
    if n == 63:
        nchars = r.value()
        n = r.value(nchars)
    else:
        nchars = 1
    if n == 0:
        raise IsoSigError("empty triangulation")

    # Each glued action consumes two facets, a boundary action one.
    actions = []
    used = 0
    while used < 4 * n:
        v = r.value()
        for a in (v & 3, (v >> 2) & 3, (v >> 4) & 3):
            if used >= 4 * n:
                if a != 0:
                    raise NonManifoldGluing("nonzero padding in facet actions")
                continue
            if a == 0:
                raise NonManifoldGluing("boundary facet; ideal triangulations are closed")
            if a == 3:
                raise NonManifoldGluing("invalid facet action 3")
            actions.append(a)
            used += 2
    if used != 4 * n:
        raise NonManifoldGluing("facet actions do not cover all facets")
    n_joins = actions.count(2)
    dests = [r.value(nchars) for _ in range(n_joins)]
    perms = []
    for _ in range(n_joins):
        idx = r.value()
        if idx >= 24:
            raise NonManifoldGluing("permutation index {} out of range".format(idx))
        perms.append(ALL_PERMS[idx])
    if not r.done():
        raise NonManifoldGluing("trailing characters after position {}".format(r.pos))

    gl = [[None] * 4 for _ in range(n)]

    def join(t, f, t2, p):
        f2 = p[f]
        if gl[t2][f2] is not None or (t == t2 and f == f2):
            raise NonManifoldGluing("facet glued twice (tet {} facet {})".format(t2, f2))
        gl[t][f] = (t2, f2, p)
        gl[t2][f2] = (t, f, p.inverse())

    it = iter(actions)
    di = 0
    new_tet = 1
    for t in range(n):
        if t >= new_tet:
            raise NonManifoldGluing("signature describes a disconnected triangulation")
        for f in range(4):
            if gl[t][f] is not None:
                continue
            a = next(it)
            if a == 1:
                if new_tet >= n:
                    raise NonManifoldGluing("more tetrahedra referenced than declared")
                join(t, f, new_tet, IDENTITY)
                new_tet += 1
            else:
                dest, p = dests[di], perms[di]
                di += 1
                if dest >= n:
                    raise NonManifoldGluing("destination {} out of range".format(dest))
                join(t, f, dest, p)
    if any(g is None for row in gl for g in row):
        raise NonManifoldGluing("some facets left unglued")
    return Triangulation(tuple(tuple(row) for row in gl), None, name)


def _signature_from(tri: Triangulation, start: int, perm: Perm4) -> str:
    n = tri.tet_count
    label = [-1] * n
    vmap = [None] * n     # new vertex -> old vertex
    order = [start]
    label[start], vmap[start] = 0, perm
    actions, dests, perms = [], [], []
    k = 0
    while k < len(order):
        old = order[k]
        for f in range(4):
            of = vmap[old][f]
            t2, f2, g = tri.gluings[old][of]
            if label[t2] >= 0:
                nf2 = vmap[t2].inverse()[f2]
                if (label[t2], nf2) < (k, f):
                    continue
                actions.append(2)
                dests.append(label[t2])
                perms.append(vmap[t2].inverse() * g * vmap[old])
            else:
                label[t2] = len(order)
                vmap[t2] = g * vmap[old]
                order.append(t2)
                actions.append(1)
        k += 1
    if len(order) != n:
        raise NonManifoldGluing("triangulation is disconnected")
    nchars = 1 if n < 63 else _chars_needed(n)
    if n < 63:
        out = [ALPHABET[n]]
    else:
        out = [ALPHABET[63] + ALPHABET[nchars] + _encode_int(n, nchars)]
    while len(actions) % 3:
        actions.append(0)
    for i in range(0, len(actions), 3):
        out.append(ALPHABET[actions[i] | (actions[i + 1] << 2) | (actions[i + 2] << 4)])
    out.extend(_encode_int(d, nchars) for d in dests)
    out.extend(ALPHABET[_PERM_INDEX[p]] for p in perms)
    return "".join(out)


def encode_isosig(tri: Triangulation) -> str:
    """Canonical signature: the least string over all starting labellings."""
    best = None
    for start in range(tri.tet_count):
        for p in ALL_PERMS:
            s = _signature_from(tri, start, p)
            if best is None or s < best:
                best = s
    return best


def canonical_relabel(tri: Triangulation) -> Triangulation:
    """The triangulation exactly as ``decode_isosig(encode_isosig(tri))`` would label it."""
    return decode_isosig(encode_isosig(tri), tri.name)
