"""Fingerprints: cusp count, volume, canonical cusp moduli and homology."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from ..slopes import Slope, complete
from ..triangulation import Triangulation
from .cusps import canonical_modulus, cusp_modulus_developed
from .gluing import (GeometryError, assemble_system, cusp_shape_from_rows,
                     solve_shapes)
from .homology import format_h1, h1_invariants, parse_h1
from .volume import volume

MATCH_TOL = 1e-6


@dataclass(frozen=True)
class Fingerprint:
    cusp_count: int
    volume: Optional[float]
    cusp_shapes: Tuple[complex, ...] = ()
    h1: Optional[Tuple[int, ...]] = None
    geometric: bool = True
    note: str = field(default="", compare=False)
    # H1 of every connected double cover, sorted; separates some chiral
    # pairs whose other fields agree
    cover_h1: Optional[Tuple[Tuple[int, ...], ...]] = None

    def matches(self, other: "Fingerprint", tol: float = MATCH_TOL) -> bool:
        """Equality within ``tol`` on every field both fingerprints carry."""
        if self.cusp_count != other.cusp_count:
            return False
        if not (self.geometric and other.geometric):
            return False
        if abs(self.volume - other.volume) > tol:
            return False
        if self.cusp_shapes and other.cusp_shapes:
            if len(self.cusp_shapes) != len(other.cusp_shapes):
                return False
            if any(abs(a - b) > tol for a, b in zip(self.cusp_shapes, other.cusp_shapes)):
                return False
        if self.h1 is not None and other.h1 is not None and self.h1 != other.h1:
            return False
        if self.cover_h1 is not None and other.cover_h1 is not None and self.cover_h1 != other.cover_h1:
            return False
        return True

    def to_row(self, name: str) -> str:
        vol = "" if self.volume is None else "{:.12g}".format(self.volume)
        shapes = ";".join(format_complex(s) for s in self.cusp_shapes)
        h1 = "" if self.h1 is None else format_h1(self.h1)
        row = "{},{},{},{},{}".format(name, self.cusp_count, vol, shapes, h1)
        if self.cover_h1 is not None:
            row += "," + format_cover_h1(self.cover_h1)
        return row


def format_complex(z: complex) -> str:
    return "{:.12f}{:+.12f}i".format(z.real, z.imag)


def parse_complex(text: str) -> complex:
    return complex(text.strip().replace("i", "j"))


def sort_shapes(shapes):
    return tuple(sorted((complex(s) for s in shapes), key=lambda s: (round(s.imag, 6), round(s.real, 6))))


def fingerprint_from_shapes(tri: Triangulation, z, filling=None, with_h1=True) -> Fingerprint:
    """Fingerprint from a known solution; cusp moduli come from developing cross sections."""
    k = tri.cusp_count
    filling = tuple(filling) if filling is not None else complete(k)
    open_cusps = [c for c in range(k) if filling[c] is None]
    shapes = sort_shapes(cusp_modulus_developed(tri, z, c) for c in open_cusps)
    unfilled = all(s is None for s in filling)
    h1 = h1_invariants(tri) if (with_h1 and unfilled) else None
    return Fingerprint(len(open_cusps), volume(z), shapes, h1)


def fingerprint(tri: Triangulation, filling: Optional[Sequence[Optional[Slope]]] = None,
                shapes=None) -> Fingerprint:
    """
    Fingerprint of ``tri`` with the given (partial) filling.

    When the gluing equations have no geometric solution a partial
    fingerprint is returned with ``geometric=False`` and only the
    combinatorial fields filled in.
    """
    k = tri.cusp_count
    filling = tuple(filling) if filling is not None else complete(k)
    unfilled = all(s is None for s in filling)
    open_count = sum(1 for s in filling if s is None)
    if shapes is None:
        system = assemble_system(tri)
        try:
            shapes = solve_shapes(system, filling)
        except GeometryError as exc:
            return Fingerprint(open_count, None, (), h1_invariants(tri) if unfilled else None,
                               geometric=False, note=str(exc))
    return fingerprint_from_shapes(tri, shapes, filling)


def cusp_shape(tri: Triangulation, z, cusp: int, filling=None) -> complex:
    """Canonical cusp modulus from the cusp equations (needs cusp rows)."""
    system = assemble_system(tri)
    return canonical_modulus(cusp_shape_from_rows(system, z, cusp, filling))


def format_cover_h1(groups) -> str:
    return ";".join(format_h1(g) for g in groups)


def parse_cover_h1(text: str):
    return tuple(sorted(parse_h1(g) for g in text.split(";") if g.strip()))


def parse_fingerprint_fields(cusps: str, vol: str, shapes: str, h1: str, cover_h1: str = "") -> Fingerprint:
    cusps = int(cusps)
    vol = vol.strip()
    geometric = vol not in ("", "nan", "none")
    shape_list = sort_shapes(parse_complex(s) for s in shapes.split(";") if s.strip())
    return Fingerprint(cusps, float(vol) if geometric else None, shape_list,
                       parse_h1(h1) if h1.strip() else None, geometric,
                       cover_h1=parse_cover_h1(cover_h1) if cover_h1.strip() else None)
