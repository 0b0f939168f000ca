"""
dykstra.py - Dykstra's Cyclic Projection Scheme

Projection onto K = H_1 ∩ ... ∩ H_n when the exact oracle is out of reach.
Each half-space keeps its own correction vector; a cycle visits them in order:

    y   = z + q_i
    z   = P_{H_i}(y)
    q_i = y - z

The iterate converges to P_K x (not merely to some point of K). A run stops
when the max-norm change over a full cycle and the scaled primal residual are
both within tol.
"""

import importlib
import logging
from typing import Optional

import numpy as np

from errors import ConvergenceError, DimensionMismatchError, InvalidInputError


cone_model = importlib.import_module("cone-model")
solver_config = importlib.import_module("solver-config")
results = importlib.import_module("solvers.results")
ProjectionResult = results.ProjectionResult

logger = logging.getLogger("isocone.solvers.dykstra")


def project_dykstra(
    K, x, tol: Optional[float] = None, max_iter: Optional[int] = None, config=None
) -> ProjectionResult:
    """
    Dykstra projection of x onto K.

    Args:
        K: PolyhedralCone with at least one half-space
        x: Point to project
        tol: Stopping tolerance (default config.dykstra_tol)
        max_iter: Cycle budget (default config.dykstra_max_iter)
        config: SolverConfig supplying the defaults

    Returns:
        ProjectionResult with method "dykstra"

    Raises:
        ConvergenceError: budget exhausted; carries the last iterate and its residual
    """
    config = config or solver_config.default_config()
    tol = config.dykstra_tol if tol is None else tol
    max_iter = config.dykstra_max_iter if max_iter is None else max_iter
    if tol <= 0:
        raise InvalidInputError(f"Dykstra tolerance must be positive, got {tol}")
    if max_iter < 1:
        raise InvalidInputError(f"Dykstra needs a positive cycle budget, got {max_iter}")
    if not K.halfspaces:
        raise InvalidInputError("Dykstra needs at least one half-space")

    z = cone_model.as_vector(x, "point").copy()
    if z.shape[0] != K.dim:
        raise DimensionMismatchError(f"point has dimension {z.shape[0]}, cone {K.dim}")

    normals = K.normal_matrix
    offsets = np.array([h.offset for h in K.halfspaces])
    squared_norms = K.normal_norms**2
    corrections = np.zeros_like(normals)
    residual = np.inf

    for cycle in range(1, max_iter + 1):
        start = z.copy()
        for i in range(len(normals)):
            y = z + corrections[i]
            excess = normals[i] @ y - offsets[i]
            if excess > 0.0:
                z = y - (excess / squared_norms[i]) * normals[i]
            else:
                z = y
            corrections[i] = y - z

        change = float(np.max(np.abs(z - start)))
        residual = cone_model.max_violation(K, z)
        if change <= tol and residual <= tol:
            logger.debug(f"[Dykstra] converged after {cycle} cycles (residual {residual:.3e})")
            return ProjectionResult(z, "dykstra", cycle, residual)

    logger.warning(f"[Dykstra] no convergence in {max_iter} cycles (residual {residual:.3e})")
    raise ConvergenceError(
        f"Dykstra did not converge within {max_iter} cycles (residual {residual:.3e}, tol {tol})",
        best_point=cone_model.as_vector(z, "iterate"),
        residual=residual,
        iterations=max_iter,
    )
