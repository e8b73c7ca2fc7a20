"""
Thurston gluing equations and a Newton solver for shape parameters.

Rows act on ``(log z_i, log z'_i, log z''_i)`` with ``z' = 1/(1-z)`` and
``z'' = 1 - 1/z``.  Edge rows have target ``2 pi i``; an unfilled cusp
contributes its meridian and longitude rows with target 0; a cusp filled
along ``p/q`` contributes ``p * meridian + q * longitude`` with target
``2 pi i``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..slopes import Slope
from ..triangulation import Triangulation, TriangulationError

log = logging.getLogger(__name__)

TWO_PI_I = 2j * np.pi
INITIAL_SHAPE = 0.5 + 0.866j
SOLVER_TOL = 1e-12
IMAG_TOL = 1e-9
RETRIES = 20
RETRY_SEED = 20240521


class GeometryError(Exception):
    pass


class MissingCuspRows(GeometryError, TriangulationError):
    pass


class NonGeometric(GeometryError):
    pass


class SingularJacobian(GeometryError):
    pass


class IncompleteSolution(GeometryError):
    pass


@dataclass(frozen=True)
class GluingSystem:
    tet_count: int
    edge_rows: np.ndarray             # (E, 3T) integers
    cusp_rows: Optional[np.ndarray]   # (k, 2, 3T) integers, or None

    @property
    def cusp_count(self) -> int:
        return 0 if self.cusp_rows is None else self.cusp_rows.shape[0]

    def column_sums_ok(self) -> bool:
        return bool(np.all(self.edge_rows.sum(axis=0) == 2))

    def equations(self, filling: Sequence[Optional[Slope]]):
        """Integer rows and complex targets of the active equations."""
        if self.cusp_rows is None:
            raise MissingCuspRows("cusp equations requested but the triangulation carries no cusp rows")
        if len(filling) != self.cusp_count:
            raise ValueError("filling has {} entries for {} cusps".format(len(filling), self.cusp_count))
        rows = [r for r in self.edge_rows]
        targets = [TWO_PI_I] * len(rows)
        for c, slope in enumerate(filling):
            mer, lon = self.cusp_rows[c]
            if slope is None:
                rows += [mer, lon]
                targets += [0j, 0j]
            else:
                rows.append(slope.p * mer + slope.q * lon)
                targets.append(TWO_PI_I)
        return np.array(rows, dtype=float), np.array(targets)


def assemble_system(tri: Triangulation) -> GluingSystem:
    n = tri.tet_count
    edges = np.zeros((len(tri.edge_classes), 3 * n), dtype=np.int64)
    for ec in tri.edge_classes:
        for emb in ec.embeddings:
            edges[ec.index, 3 * emb.tet + emb.pair_class] += 1
    cusps = None
    if tri.cusp_rows is not None:
        cusps = np.array([[m, l] for m, l in tri.cusp_rows], dtype=np.int64).reshape(len(tri.cusp_rows), 2, 3 * n)
    return GluingSystem(n, edges, cusps)


def shape_triples(z):
    z = np.asarray(z, dtype=complex)
    return z, 1 / (1 - z), 1 - 1 / z


def _log_shapes(z, ref=None):
    """Logs of (z, z', z'') interleaved per tet, continued from ``ref`` branches."""
    a, b, c = shape_triples(z)
    logs = np.empty(3 * len(z), dtype=complex)
    logs[0::3], logs[1::3], logs[2::3] = np.log(a), np.log(b), np.log(c)
    if ref is not None:
        jump = np.round((ref.imag - logs.imag) / (2 * np.pi))
        logs = logs + 2j * np.pi * jump
    return logs


def _jacobian_columns(z):
    d = np.empty(3 * len(z), dtype=complex)
    d[0::3] = 1 / z
    d[1::3] = 1 / (1 - z)
    d[2::3] = 1 / (z * (z - 1))
    return d


def _residual(A, target, z, ref):
    logs = _log_shapes(z, ref)
    return A @ logs - target, logs


def _jacobian(A, z):
    n = len(z)
    d = _jacobian_columns(z)
    J = np.zeros((A.shape[0], n), dtype=complex)
    for k in range(3):
        J += A[:, k::3] * d[k::3]
    return J


def _newton(A, target, z0, max_iter=100):
    z = np.array(z0, dtype=complex)
    ref = _log_shapes(z)
    F, ref = _residual(A, target, z, ref)
    err = np.max(np.abs(F))
    for _ in range(max_iter):
        if err < SOLVER_TOL * 1e-2:
            break
        J = _jacobian(A, z)
        if not np.all(np.isfinite(J)):
            raise SingularJacobian("degenerate shape encountered")
        step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        t = 1.0
        while True:
            znew = z + t * step
            if np.all(np.abs(znew) > 1e-12) and np.all(np.abs(znew - 1) > 1e-12):
                Fn, logs_n = _residual(A, target, znew, ref)
                en = np.max(np.abs(Fn))
                if en < err or t < 1e-4:
                    break
            t /= 2
            if t < 1e-6:
                return z, err
        z, F, ref, prev = znew, Fn, logs_n, err
        err = en
        if abs(prev - err) < 1e-16 and err < SOLVER_TOL:
            break
    return z, err


def set_solver_tolerance(tol: float) -> float:
    """Change the default acceptance residual for :func:`solve_shapes`; returns the old value."""
    global SOLVER_TOL
    if not tol > 0:
        raise ValueError("solver tolerance must be positive")
    old, SOLVER_TOL = SOLVER_TOL, float(tol)
    return old


def solve_shapes(system: GluingSystem, filling: Sequence[Optional[Slope]], initial=None,
                 tol: Optional[float] = None) -> np.ndarray:
    """
    Solve the active gluing equations by Newton's method (least squares steps).

    Starts from ``z_i = 0.5 + 0.866i`` and, failing that, from
    ``RETRIES`` deterministic perturbations of it.  A solution is accepted
    when the log-form residual is below ``tol`` (default ``SOLVER_TOL``), the exponentiated
    residual agrees and every shape has positive imaginary part.
    """
    tol = SOLVER_TOL if tol is None else tol
    A, target = system.equations(filling)
    n = system.tet_count
    rng = np.random.default_rng(RETRY_SEED)
    starts = [np.full(n, INITIAL_SHAPE) if initial is None else np.asarray(initial, dtype=complex)]
    for _ in range(RETRIES):
        starts.append(INITIAL_SHAPE + rng.normal(scale=0.4, size=n) + 1j * rng.uniform(-0.5, 0.8, size=n))
    best = None
    for attempt, z0 in enumerate(starts):
        try:
            z, err = _newton(A, target, z0)
        except (SingularJacobian, FloatingPointError, np.linalg.LinAlgError):
            continue
        if not np.all(np.isfinite(z)) or err >= tol:
            continue
        if not _exp_residual_ok(A, target, z):
            continue
        if np.all(z.imag > IMAG_TOL):
            # with positive shapes the principal logs are the geometric ones; a
            # residual of 2 pi i there means Newton drifted onto a cone structure
            if np.max(np.abs(A @ _log_shapes(z) - target)) > 1e-9:
                best = z if best is None else best
                continue
            if attempt:
                log.debug("geometric solution found on retry %d", attempt)
            return z
        best = z if best is None else best
    if best is not None and np.all(best.imag > IMAG_TOL):
        raise NonGeometric("only solutions on the wrong logarithm branch were found")
    if best is not None:
        raise NonGeometric("solution found but some Im z <= {} (min {:.3g})".format(IMAG_TOL, best.imag.min()))
    raise NonGeometric("Newton iteration did not converge from {} starting points".format(len(starts)))


def _exp_residual_ok(A, target, z):
    logs = _log_shapes(z)
    F = A @ logs - target
    # integer multiples of 2 pi i are branch drift, anything else is an error
    return bool(np.all(np.abs(np.exp(F) - 1) < 1e-9))


def residual(system: GluingSystem, filling, z) -> float:
    """Max log-form residual with principal branches (the geometric branch when Im z > 0)."""
    A, target = system.equations(filling)
    return float(np.max(np.abs(A @ _log_shapes(np.asarray(z, dtype=complex)) - target)))


def cusp_shape_from_rows(system: GluingSystem, z, cusp: int, filling=None) -> complex:
    """
    Cusp modulus from the derivative of longitude against meridian holonomy.

    Near the complete structure the log holonomies satisfy
    ``log H(lon) ~ tau * log H(mer)``; ``tau`` is obtained by solving the
    linearised equations for a unit meridian perturbation of ``cusp`` with
    every other equation held fixed.
    """
    if system.cusp_rows is None:
        raise MissingCuspRows("no cusp rows")
    k = system.cusp_count
    filling = tuple(filling) if filling is not None else (None,) * k
    if filling[cusp] is not None:
        raise IncompleteSolution("cusp {} is filled".format(cusp))
    z = np.asarray(z, dtype=complex)
    mer, lon = system.cusp_rows[cusp]
    logs = _log_shapes(z)
    if abs(mer @ logs) > 1e-8 or abs(lon @ logs) > 1e-8:
        raise IncompleteSolution("cusp {} is not complete in this solution".format(cusp))
    A, _ = system.equations(filling)
    # rows of A: edges, then per cusp either (mer, lon) or the filling row
    keep = []
    row = len(system.edge_rows)
    rhs = []
    keep.extend(range(row))
    rhs.extend([0] * row)
    for c, slope in enumerate(filling):
        if slope is None:
            keep.append(row)
            rhs.append(1 if c == cusp else 0)
            if c != cusp:
                keep.append(row + 1)
                rhs.append(0)
            row += 2
        else:
            keep.append(row)
            rhs.append(0)
            row += 1
    J = _jacobian(A[keep], z)
    dz, *_ = np.linalg.lstsq(J, np.array(rhs, dtype=complex), rcond=None)
    dlon = _jacobian(np.array([lon], dtype=float), z) @ dz
    return complex(dlon[0])
