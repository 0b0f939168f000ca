"""
solvers package - Metric Projections onto Polyhedral Cones

One module per method:
- closed-form: orthant and single half-space
- exact-projection: certified KKT projection (ground truth, capped)
- dykstra: cyclic projections for cones beyond the exact caps
- pava: pool adjacent violators for weighted monotone cones
- dispatch: method routing, batches and weighted isotonic regression
"""

import importlib


# Import modules with kebab-case names using importlib
results = importlib.import_module(".results", package="solvers")
closed_form = importlib.import_module(".closed-form", package="solvers")
exact_projection = importlib.import_module(".exact-projection", package="solvers")
dykstra = importlib.import_module(".dykstra", package="solvers")
pava = importlib.import_module(".pava", package="solvers")
dispatch = importlib.import_module(".dispatch", package="solvers")

# Re-export for convenience
PROJECTION_METHODS = results.PROJECTION_METHODS
SOLVER_METHODS = dispatch.SOLVER_METHODS
ProjectionResult = results.ProjectionResult
RegressionProblem = results.RegressionProblem
project_orthant = closed_form.project_orthant
project_halfspace = closed_form.project_halfspace
project_exact = exact_projection.project_exact
project_dykstra = dykstra.project_dykstra
pool_adjacent_violators = pava.pool_adjacent_violators
project_pava_chain = pava.project_pava_chain
match_monotone_weights = dispatch.match_monotone_weights
project = dispatch.project
project_batch = dispatch.project_batch
fit_isotonic = dispatch.fit_isotonic
isotonic_regression = dispatch.isotonic_regression

__all__ = [
    "PROJECTION_METHODS",
    "SOLVER_METHODS",
    "ProjectionResult",
    "RegressionProblem",
    "fit_isotonic",
    "isotonic_regression",
    "match_monotone_weights",
    "pool_adjacent_violators",
    "project",
    "project_batch",
    "project_dykstra",
    "project_exact",
    "project_halfspace",
    "project_orthant",
    "project_pava_chain",
]
