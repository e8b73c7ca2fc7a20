import cmath
import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from veerobs.geometry import (MissingCuspRows, NonGeometric, assemble_system, bloch_wigner, canonical_modulus,
                              fingerprint, h1_invariants, residual, smith_normal_form_diagonal, solve_shapes,
                              volume)
from veerobs.geometry.fingerprint import parse_fingerprint_fields
from veerobs.geometry.gluing import SOLVER_TOL, set_solver_tolerance
from veerobs.isosig import decode_isosig
from veerobs.slopes import complete, parse_filling
from veerobs.triangulation import EVEN_PERMS

from _fixtures import facts, tri

# Frozen values, each recomputed below from an independent closed form.
VOL_M004 = 2.029883212819307     # 3 * Cl2(2 pi / 3)
VOL_L5A1 = 3.663862376708876     # 4 * Catalan


def bloch_wigner_oracle(z):
    z = mpmath.mpc(z)
    return float(mpmath.im(mpmath.polylog(2, z)) + mpmath.arg(1 - z) * mpmath.log(abs(z)))


def test_frozen_volumes_match_closed_forms():
    mpmath.mp.dps = 30
    assert abs(VOL_M004 - float(3 * mpmath.clsin(2, 2 * mpmath.pi / 3))) < 1e-15
    assert abs(VOL_L5A1 - float(4 * mpmath.catalan)) < 1e-15


@given(st.floats(-3, 3), st.floats(0.01, 3))
def test_bloch_wigner_against_polylog(x, y):
    z = complex(x, y)
    assume(abs(1 - z) > 1e-3)
    assert abs(bloch_wigner(z) - bloch_wigner_oracle(z)) < 1e-12


@given(st.floats(-3, 3), st.floats(0.01, 3))
def test_bloch_wigner_symmetries(x, y):
    z = complex(x, y)
    assume(abs(1 - z) > 1e-3)
    d = bloch_wigner(z)
    assert abs(bloch_wigner(1 / (1 - z)) - d) < 1e-12
    assert abs(bloch_wigner(1 - 1 / z) - d) < 1e-12
    assert abs(bloch_wigner(z.conjugate()) + d) < 1e-12


def test_m004_complete_structure():
    m004 = tri("m004")
    z = solve_shapes(assemble_system(m004), complete(1))
    assert np.max(np.abs(z - cmath.exp(1j * math.pi / 3))) < 1e-10
    assert abs(volume(z) - VOL_M004) < 1e-9
    assert residual(assemble_system(m004), complete(1), z) < SOLVER_TOL


def test_l5a1_volume():
    L = tri("L5a1")
    z = solve_shapes(assemble_system(L), complete(2))
    assert abs(volume(z) - VOL_L5A1) < 1e-9


def test_census_fingerprints_match_reference_records():
    fb = facts()
    for name in sorted(fb.tri_paths):
        fp = fingerprint(fb.triangulation(name))
        assert fp.geometric, name
        assert fp.matches(fb.records[name].fingerprint), name


def test_filled_volumes_are_stable_under_relabelling():
    t = tri("t12048")
    fill = parse_filling("(2;*)")
    want = fingerprint(t, fill).volume
    rng = np.random.default_rng(5)
    for _ in range(3):
        tet_map = list(rng.permutation(t.tet_count))
        perms = [EVEN_PERMS[i] for i in rng.integers(0, 12, t.tet_count)]
        r = t.relabel(tet_map, perms)
        c = r.vertex_classes[tet_map[0], perms[0][0]]
        fill_r = tuple(fill[0] if k == c else None for k in range(2))
        assert abs(fingerprint(r, fill_r).volume - want) < 1e-9


def test_exceptional_filling_is_not_geometric():
    # the meridional filling of the figure eight knot complement is the 3-sphere
    m004 = tri("m004")
    inf = parse_filling("(inf)")
    with pytest.raises(NonGeometric):
        solve_shapes(assemble_system(m004), inf)
    fp = fingerprint(m004, inf)
    assert not fp.geometric and fp.note


def test_fillings_need_cusp_rows():
    bare = decode_isosig("cPcbbbiht")
    with pytest.raises(MissingCuspRows):
        solve_shapes(assemble_system(bare), parse_filling("(5)"))


def test_solver_tolerance_setting():
    old = set_solver_tolerance(1e-10)
    try:
        assert old == 1e-12
        with pytest.raises(ValueError):
            set_solver_tolerance(0)
    finally:
        set_solver_tolerance(old)


def test_known_homology():
    assert h1_invariants(tri("m004")) == (0,)
    assert h1_invariants(tri("m006")) == (5, 0)
    assert h1_invariants(tri("L5a1")) == (0, 0)


def _det(M):
    M = [[Fraction(x) for x in r] for r in M]
    n, det = len(M), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return int(det)


def determinantal_invariants(A):
    """Invariant factors from gcds of k x k minors (slow but independent)."""
    m, n = len(A), len(A[0])
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = math.gcd(g, _det([[A[i][j] for j in cols] for i in rows]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


@given(st.integers(1, 4).flatmap(lambda m: st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m))))
def test_smith_form_against_minors(A):
    assert smith_normal_form_diagonal(A) == determinantal_invariants(A)


@given(st.floats(-0.5, 0.5), st.floats(0.9, 3.0),
       st.lists(st.sampled_from(["T", "Ti", "S"]), max_size=12))
def test_canonical_modulus_is_modular_invariant(x, y, word):
    tau = complex(x, y)
    assume(abs(tau) > 1.0001)
    g = tau
    for step in word:
        g = g + 1 if step == "T" else g - 1 if step == "Ti" else -1 / g
    assume(g.imag > 1e-6)
    assert abs(canonical_modulus(g) - canonical_modulus(tau)) < 1e-8
    assert abs(canonical_modulus(-tau.conjugate()) - canonical_modulus(tau)) < 1e-8


def test_fingerprint_row_round_trip():
    rec = facts().records["s649"].fingerprint
    row = rec.to_row("s649").split(",")
    again = parse_fingerprint_fields(*row[1:])
    assert again.matches(rec, 1e-9) and again.cover_h1 == rec.cover_h1
