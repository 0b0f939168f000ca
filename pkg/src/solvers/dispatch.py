"""
dispatch.py - Projection Dispatcher and Isotonic Regression

Routes a projection to the cheapest method that is exact for the cone:

    weighted monotone cone  -> PAVA through the sqrt-weight scaling
    within exact caps       -> certified exact projection
    otherwise               -> Dykstra

and solves weighted isotonic regression through the identity

    iso(y) = (1/sqrt(w)) P_{K^w_E}(sqrt(w) y)
"""

import importlib
import logging
from typing import List, Optional

import numpy as np

from errors import DimensionMismatchError, InvalidInputError


cone_model = importlib.import_module("cone-model")
solver_config = importlib.import_module("solver-config")
results = importlib.import_module("solvers.results")
exact_projection = importlib.import_module("solvers.exact-projection")
dykstra = importlib.import_module("solvers.dykstra")
pava = importlib.import_module("solvers.pava")

ProjectionResult = results.ProjectionResult

logger = logging.getLogger("isocone.solvers.dispatch")


# Solver registry for easy lookup (CLI help and dispatcher)
SOLVER_METHODS = {
    "exact": {
        "name": "Certified Exact Projection",
        "description": "NNLS active set checked against the KKT conditions, face enumeration fallback",
        "caps": ["dmax", "nmax"],
        "general": True,
    },
    "dykstra": {
        "name": "Dykstra Cyclic Projection",
        "description": "Cyclic half-space projections with one correction vector each",
        "caps": [],
        "general": True,
    },
    "pava": {
        "name": "Pool Adjacent Violators",
        "description": "Linear-time exact projection onto a weighted monotone cone",
        "caps": [],
        "general": False,
    },
}


def match_monotone_weights(K, config=None) -> Optional["cone_model.WeightVector"]:
    """
    Recognise K as a weighted monotone cone and recover its weights.

    Each normal must be a positive multiple of (+1/sqrt(w^i) at i, -1/sqrt(w^{i+1})
    at i+1, zero elsewhere) with every consecutive pair covered exactly once.
    Zero entries are judged relative to the normal's norm (monotone_pattern_rtol).
    Weights are recovered up to a positive factor, which leaves the cone unchanged.

    Returns:
        WeightVector (w^1 = 1) or None when K is not a weighted monotone cone
    """
    config = config or solver_config.default_config()
    m = K.dim
    if m < 2 or len(K) != m - 1:
        return None

    ratios = {}
    rtol = config.monotone_pattern_rtol
    for normal, norm in zip(K.normal_matrix, K.normal_norms):
        support = np.flatnonzero(np.abs(normal) > rtol * norm)
        if len(support) != 2 or support[1] != support[0] + 1:
            return None
        i = int(support[0])
        if normal[i] <= 0 or normal[i + 1] >= 0 or i in ratios:
            return None
        ratios[i] = normal[i] / -normal[i + 1]

    roots = np.ones(m)
    for i in range(m - 1):
        roots[i + 1] = roots[i] * ratios[i]
    return cone_model.WeightVector(roots**2)


def _project_pava(K, x: np.ndarray, weights) -> ProjectionResult:
    scaled = cone_model.scale_by_weights(x, weights, "inverse")
    fit, merges = pava.pool_adjacent_violators(scaled, weights.weights)
    point = cone_model.scale_by_weights(fit, weights, "forward")
    return ProjectionResult(point, "pava", merges, cone_model.max_violation(K, point))


def project(K, x, config=None, method: str = "auto") -> ProjectionResult:
    """
    Metric projection of x onto K with the method chosen for the cone.

    Args:
        K: PolyhedralCone
        x: Point to project
        config: SolverConfig (Dykstra uses dykstra_tol / dykstra_max_iter)
        method: "auto", "exact", "dykstra" or "pava"

    Returns:
        ProjectionResult tagged with the method used
    """
    config = config or solver_config.default_config()
    x = cone_model.as_vector(x, "point")
    if x.shape[0] != K.dim:
        raise DimensionMismatchError(f"point has dimension {x.shape[0]}, cone {K.dim}")
    if method != "auto" and method not in SOLVER_METHODS:
        raise InvalidInputError(f"Unknown projection method: {method}. Available: auto, {list(SOLVER_METHODS)}")

    if not K.halfspaces and method in ("auto", "exact"):
        return ProjectionResult(x, "exact")

    if method in ("auto", "pava"):
        weights = match_monotone_weights(K, config)
        if weights is not None:
            logger.debug(f"[Dispatch] {K} recognised as a weighted monotone cone")
            return _project_pava(K, x, weights)
        if method == "pava":
            raise InvalidInputError(f"{K} is not a weighted monotone cone; PAVA does not apply")

    if method == "auto":
        method = "exact" if K.dim <= config.dmax and len(K) <= config.nmax else "dykstra"
        logger.debug(f"[Dispatch] {K} routed to {method}")

    if method == "exact":
        return exact_projection.project_exact(K, x, config)
    return dykstra.project_dykstra(K, x, config=config)


def project_batch(K, points, config=None, method: str = "auto") -> List[ProjectionResult]:
    """Project every point of `points` onto K (independent projections)."""
    return [project(K, point, config, method) for point in points]


def fit_isotonic(problem, config=None, method: str = "auto"):
    """
    Weighted isotonic regression with the projection diagnostics.

    Returns:
        (iso, ProjectionResult of sqrt(w) y onto K^w_E)
    """
    cone = cone_model.build_isotonic_cone(problem.graph, problem.w)
    scaled = cone_model.scale_by_weights(problem.y, problem.w, "forward")
    result = project(cone, scaled, config, method)
    iso = cone_model.scale_by_weights(result.point, problem.w, "inverse")
    return iso, result


def isotonic_regression(problem, config=None) -> np.ndarray:
    """
    iso(y) = argmin sum_i w^i (x^i - y^i)^2 subject to x^i <= x^j for every edge (i, j).

    Computed as (1/sqrt(w)) P_{K^w_E}(sqrt(w) y).
    """
    iso, _ = fit_isotonic(problem, config)
    return iso
