"""Gluing equations, shapes, volumes, cusp moduli and homology."""
from .cusps import canonical_modulus, cusp_modulus_developed, cusp_translations, lattice_basis
from .fingerprint import (MATCH_TOL, Fingerprint, cusp_shape, fingerprint, fingerprint_from_shapes,
                          format_complex, parse_complex)
from .gluing import (GeometryError, GluingSystem, IncompleteSolution, MissingCuspRows, NonGeometric,
                     SingularJacobian, assemble_system, residual, solve_shapes)
from .homology import format_h1, h1_invariants, parse_h1, smith_normal_form_diagonal
from .volume import bloch_wigner, volume

__all__ = [
    "Fingerprint", "GeometryError", "GluingSystem", "IncompleteSolution", "MATCH_TOL", "MissingCuspRows",
    "NonGeometric", "SingularJacobian", "assemble_system", "bloch_wigner", "canonical_modulus",
    "cusp_modulus_developed", "cusp_shape", "cusp_translations", "fingerprint", "fingerprint_from_shapes",
    "format_complex", "format_h1", "h1_invariants", "lattice_basis", "parse_complex", "parse_h1",
    "residual", "smith_normal_form_diagonal", "solve_shapes", "volume",
]
