"""
results.py - Solver Result and Problem Types

ProjectionResult is what every projection method returns; RegressionProblem
bundles the data of a weighted isotonic regression.
"""

import importlib
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from errors import DimensionMismatchError, InvalidInputError


cone_model = importlib.import_module("cone-model")

PROJECTION_METHODS = ("exact", "dykstra", "pava")


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """
    Metric projection P_K x with solver diagnostics.

    Attributes:
        point: P_K x (read-only array)
        method: "exact", "dykstra" or "pava"
        iterations: Cycles (Dykstra), pool merges (PAVA) or 0 (exact)
        residual: Max scaled constraint violation of point
        kkt_gap: Worst verified KKT condition (exact method; 0.0 otherwise)
        active_set: Half-space indices with positive multipliers (exact method)
        diagnostic: Set when the exact method could only return a best candidate
    """

    point: np.ndarray
    method: str
    iterations: int = 0
    residual: float = 0.0
    kkt_gap: float = 0.0
    active_set: Tuple[int, ...] = ()
    diagnostic: Optional[str] = None

    def __post_init__(self):
        if self.method not in PROJECTION_METHODS:
            raise InvalidInputError(f"Unknown projection method: {self.method}")
        object.__setattr__(self, "point", cone_model.as_vector(self.point, "projection"))

    def to_dict(self) -> dict:
        """JSON-ready form used by the CLI."""
        report = {
            "point": self.point.tolist(),
            "method": self.method,
            "iterations": int(self.iterations),
            "residual": float(self.residual),
            "kkt_gap": float(self.kkt_gap),
        }
        if self.method == "exact":
            report["active_set"] = [int(i) + 1 for i in self.active_set]
        if self.diagnostic:
            report["diagnostic"] = self.diagnostic
        return report

    def __repr__(self):
        return (
            f"ProjectionResult(method={self.method}, iterations={self.iterations}, "
            f"residual={self.residual:.3e}, point={self.point.tolist()})"
        )


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    """
    Weighted isotonic regression data: fit y with weights w under the graph's order.

    Attributes:
        y: Observations
        w: WeightVector
        graph: ConstraintGraph; edge (i, j) requires x^i <= x^j
    """

    y: np.ndarray
    w: "cone_model.WeightVector"
    graph: "cone_model.ConstraintGraph"

    def __post_init__(self):
        y = cone_model.as_vector(self.y, "y")
        if y.shape[0] != len(self.w) or y.shape[0] != self.graph.num_vertices:
            raise DimensionMismatchError(
                f"regression problem sizes disagree: y has {y.shape[0]}, "
                f"weights {len(self.w)}, graph {self.graph.num_vertices} vertices"
            )
        object.__setattr__(self, "y", y)
