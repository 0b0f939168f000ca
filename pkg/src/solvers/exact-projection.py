"""
exact-projection.py - Certified Projection onto a Polyhedral Cone

Ground-truth projection P_K x for K = {z : <a_i, z> <= 0}, certified by the
KKT conditions:

    primal    <a_i, p> <= 0 for every i
    dual      x - p = sum_i lambda_i a_i with lambda_i >= 0
    slackness <x - p, p> = 0

The active set is identified with non-negative least squares on the polar cone
(Moreau: x - p is the projection of x onto cone{a_i}), first with NNLS, then
with bounded-variable least squares; a candidate is accepted only after the
KKT check. When the check fails, the face enumeration
takes over: every linearly independent subset S (by cardinality, then
lexicographic) yields the projection of x onto {z : <a_i, z> = 0, i in S};
the first certified one is returned and every other certified face must agree
with it. Face enumeration is exponential and capped at SolverConfig.nmax.
"""

import importlib
import itertools
import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.optimize import lsq_linear, nnls

from errors import DegenerateProjectionError, DimensionMismatchError, ExactGeometryCapError


cone_model = importlib.import_module("cone-model")
solver_config = importlib.import_module("solver-config")
results = importlib.import_module("solvers.results")
ProjectionResult = results.ProjectionResult

logger = logging.getLogger("isocone.solvers.exact")


def _kkt_check(units: np.ndarray, x: np.ndarray, point: np.ndarray, multipliers: np.ndarray, tol: float):
    """
    Verify the KKT conditions for a candidate built as point = x - units[S]^T multipliers.

    Returns:
        (certified, kkt_gap, residual)
    """
    values = units @ point
    residual = float(max(0.0, values.max())) if values.size else 0.0
    dual_violation = float(max(0.0, -multipliers.min())) if multipliers.size else 0.0
    slackness = abs(float((x - point) @ point))

    scale = 1.0 + float(x @ x)
    certified = (
        residual <= tol * np.sqrt(scale)
        and dual_violation <= tol * np.sqrt(scale)
        and slackness <= tol * scale
    )
    return certified, max(slackness, dual_violation), residual


def _nnls_multipliers(units: np.ndarray, x: np.ndarray) -> np.ndarray:
    return nnls(units.T, x)[0]


def _bvls_multipliers(units: np.ndarray, x: np.ndarray) -> np.ndarray:
    return lsq_linear(units.T, x, bounds=(0.0, np.inf), method="bvls", tol=1e-12).x


# Polar-cone solvers tried in order before face enumeration
POLAR_SOLVERS = (("NNLS", _nnls_multipliers), ("BVLS", _bvls_multipliers))


def _active_set_candidate(units: np.ndarray, x: np.ndarray, tol: float) -> Optional[ProjectionResult]:
    """
    Active set from the polar-cone least squares problem; None when nothing certifies.

    Each solver's multipliers are checked as returned, then re-solved exactly
    on their support (one face projection), so a support that is right but
    carries inaccurate values still certifies.
    """
    for name, solve in POLAR_SOLVERS:
        try:
            multipliers = np.maximum(solve(units, x), 0.0)
        except (RuntimeError, ValueError, np.linalg.LinAlgError) as e:
            logger.info(f"[Exact] {name} did not finish ({e})")
            continue

        support = tuple(int(i) for i in np.flatnonzero(multipliers > 0.0))
        point = x - units.T @ multipliers
        certified, gap, residual = _kkt_check(units, x, point, multipliers, tol)
        if not certified:
            point, face_multipliers = _face_projection(units, x, support)
            certified, gap, residual = _kkt_check(units, x, point, face_multipliers, tol)
        if certified:
            return ProjectionResult(point, "exact", 0, residual, gap, support)
        logger.info(f"[Exact] {name} candidate failed the KKT check (gap {gap:.3e}, residual {residual:.3e})")

    return None


def _face_projection(units: np.ndarray, x: np.ndarray, subset: Tuple[int, ...]):
    """Projection of x onto {z : <a_i, z> = 0, i in subset} and its multipliers."""
    if not subset:
        return x, np.zeros(0)
    rows = units[list(subset)]
    multipliers = linalg.lstsq(rows.T, x)[0]
    return x - rows.T @ multipliers, multipliers


def _enumerate_faces(K, x: np.ndarray, config) -> ProjectionResult:
    n = len(K)
    if n > config.nmax:
        raise ExactGeometryCapError(
            f"face enumeration is limited to {config.nmax} half-spaces (got {n}); "
            f"use the Dykstra solver",
            dim=n,
            cap=config.nmax,
        )

    units = K.unit_normals
    accepted = []
    best = None
    faces_examined = 0

    for size in range(0, min(n, K.dim) + 1):
        for subset in itertools.combinations(range(n), size):
            if size and np.linalg.matrix_rank(units[list(subset)]) < size:
                continue
            faces_examined += 1
            point, multipliers = _face_projection(units, x, subset)
            certified, gap, residual = _kkt_check(units, x, point, multipliers, config.tol)
            if best is None or gap + residual < best[2] + best[3]:
                best = (subset, point, gap, residual)
            if certified:
                accepted.append((subset, point, gap, residual))

    if not accepted:
        subset, point, gap, residual = best
        candidate = ProjectionResult(
            point, "exact", faces_examined, residual, gap, subset, diagnostic="no-certified-face"
        )
        raise DegenerateProjectionError(
            f"no face of {K} passed the KKT test within tol {config.tol}", candidate=candidate
        )

    subset, point, gap, residual = accepted[0]
    for other_subset, other_point, _, _ in accepted[1:]:
        disagreement = float(np.max(np.abs(other_point - point)))
        if disagreement > config.agreement_tol:
            candidate = ProjectionResult(
                point, "exact", faces_examined, residual, gap, subset, diagnostic="conflicting-faces"
            )
            raise DegenerateProjectionError(
                f"faces {subset} and {other_subset} certify points {disagreement:.3e} apart",
                candidate=candidate,
            )

    logger.debug(f"[Exact] {len(accepted)} of {faces_examined} faces certified; active set {subset}")
    return ProjectionResult(point, "exact", faces_examined, residual, gap, subset)


def project_exact(K, x, config=None, enumerate_faces: bool = False) -> ProjectionResult:
    """
    Certified metric projection of x onto K.

    Args:
        K: PolyhedralCone with dim <= config.dmax
        x: Point to project
        config: SolverConfig (default configuration when None)
        enumerate_faces: Skip the polar-cone active-set path and enumerate faces directly

    Returns:
        ProjectionResult with method "exact"

    Raises:
        ExactGeometryCapError: dim above dmax, or face enumeration needed above nmax
        DegenerateProjectionError: no certified face, or certified faces disagree
    """
    config = config or solver_config.default_config()
    cone_model.require_exact_geometry(K, config, "project_exact")
    x = cone_model.as_vector(x, "point")
    if x.shape[0] != K.dim:
        raise DimensionMismatchError(f"point has dimension {x.shape[0]}, cone {K.dim}")

    if not K.halfspaces:
        return ProjectionResult(x, "exact")

    if not enumerate_faces:
        candidate = _active_set_candidate(K.unit_normals, x, config.tol)
        if candidate is not None:
            return candidate

    return _enumerate_faces(K, x, config)
