"""
Bloch-Wigner dilogarithm and hyperbolic volume of shape vectors.

``D(z) = Im Li2(z) + arg(1 - z) log|z|`` is evaluated by first moving ``z``
with the six-fold symmetry of ``D`` into ``|w| <= 1, Re w <= 1/2`` and then
summing the Bernoulli series ``Li2(w) = sum B_n u^(n+1) / (n+1)!`` with
``u = -log(1 - w)``.  In that region ``|u| < 1.3`` while the series has
radius ``2 pi``, so truncating after 40 terms leaves a tail below
``(1.3 / 2pi)^40 < 1e-27``; the result is accurate to rounding (~1e-15).
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

_TERMS = 40


@lru_cache(maxsize=None)
def _series_coefficients():
    # Bernoulli numbers B_0..B_N with B_1 = -1/2, via the standard recurrence.
    n = _TERMS
    B = [Fraction(0)] * (n + 1)
    B[0] = Fraction(1)
    for m in range(1, n + 1):
        B[m] = -sum(Fraction(math.comb(m + 1, k)) * B[k] for k in range(m)) / (m + 1)
    return tuple(float(B[k] / math.factorial(k + 1)) for k in range(n + 1))


def _li2_small(w: complex) -> complex:
    u = -cmath.log(1 - w)
    coeffs = _series_coefficients()
    total = 0j
    power = u
    for c in coeffs:
        if c:
            total += c * power
        power *= u
    return total


def bloch_wigner(z: complex) -> float:
    z = complex(z)
    if z == 0 or z == 1 or abs(z.imag) < 1e-300:
        return 0.0
    # images under the symmetry group, with the sign D picks up
    candidates = [
        (z, 1.0),
        (1 - 1 / z, 1.0),
        (1 / (1 - z), 1.0),
        (1 / z, -1.0),
        (1 - z, -1.0),
        (z / (z - 1), -1.0),
    ]
    w, sgn = min((c for c in candidates if abs(c[0]) <= 1 + 1e-12 and c[0].real <= 0.5 + 1e-12),
                 key=lambda c: abs(c[0]))
    li2 = _li2_small(w)
    return sgn * (li2.imag + cmath.phase(1 - w) * math.log(abs(w)))


def volume(shapes) -> float:
    """Sum of Bloch-Wigner values over the tetrahedra."""
    return float(sum(bloch_wigner(z) for z in np.asarray(shapes, dtype=complex)))
