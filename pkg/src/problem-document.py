"""
problem-document.py - ProblemDocument File Format

JSON documents read and written by the CLI:

    {
      "dim": 3,
      "normals": [[-2, 1, 0], [1, -2, 0], [0, 0, -1]],
      "graph": {"vertices": 3, "edges": [[1, 2], [2, 3]]},
      "weights": [1, 1, 1],
      "points": [[-1, -1, 5]]
    }

A cone is given either by its normals or by a graph (plus optional weights,
unit by default); never both. Graph vertices are 1-based. See
docs/problem-document.md.
"""

import importlib
import json
import logging
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, model_validator

from errors import InvalidInputError


cone_model = importlib.import_module("cone-model")

logger = logging.getLogger("isocone.document")


class GraphSpec(BaseModel):
    """Constraint graph with 1-based vertex labels."""

    model_config = ConfigDict(extra="forbid")

    vertices: PositiveInt
    edges: List[List[int]] = Field(default_factory=list)

    def to_graph(self):
        return cone_model.ConstraintGraph.from_one_based(self.vertices, self.edges)


class ProblemDocument(BaseModel):
    """
    Parsed and validated ProblemDocument.

    Raises (at construction):
        pydantic.ValidationError: wrong types, non-finite numbers, or inconsistent fields
    """

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    dim: PositiveInt
    normals: Optional[List[List[float]]] = None
    graph: Optional[GraphSpec] = None
    weights: Optional[List[float]] = None
    points: List[List[float]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_consistency(self):
        if self.normals is not None and self.graph is not None:
            raise ValueError("a document gives either 'normals' or 'graph', not both")
        for index, normal in enumerate(self.normals or []):
            if len(normal) != self.dim:
                raise ValueError(f"normal {index + 1} has {len(normal)} entries, dim is {self.dim}")
        if self.graph is not None and self.graph.vertices != self.dim:
            raise ValueError(f"graph has {self.graph.vertices} vertices, dim is {self.dim}")
        if self.weights is not None:
            if len(self.weights) != self.dim:
                raise ValueError(f"weights have {len(self.weights)} entries, dim is {self.dim}")
            if any(w <= 0 for w in self.weights):
                raise ValueError("weights must be strictly positive")
        for index, point in enumerate(self.points):
            if len(point) != self.dim:
                raise ValueError(f"point {index + 1} has {len(point)} entries, dim is {self.dim}")
        return self

    @property
    def defines_cone(self) -> bool:
        return self.normals is not None or self.graph is not None

    def to_graph(self):
        """ConstraintGraph (0-based) or None."""
        return None if self.graph is None else self.graph.to_graph()

    def to_weights(self):
        if self.weights is None:
            return cone_model.WeightVector.unit(self.dim)
        return cone_model.WeightVector(self.weights)

    def to_cone(self):
        """
        PolyhedralCone described by the document.

        Raises:
            InvalidInputError: neither normals nor graph present
        """
        if self.normals is not None:
            return cone_model.PolyhedralCone.from_normals(self.normals, dim=self.dim)
        if self.graph is not None:
            return cone_model.build_isotonic_cone(self.to_graph(), self.to_weights())
        raise InvalidInputError("document defines no cone: give 'normals' or 'graph'")

    def dumps(self) -> str:
        """JSON text without the unset optional fields."""
        fields = self.model_dump(exclude_none=True)
        if not fields["points"]:
            del fields["points"]
        return json.dumps(fields, allow_nan=False)

    @classmethod
    def from_cone(cls, K, graph=None, weights=None) -> "ProblemDocument":
        fields = K.to_document()
        if graph is not None:
            fields = {"dim": K.dim, "graph": {"vertices": graph.num_vertices, "edges": graph.to_one_based()}}
            if weights is not None:
                fields["weights"] = weights.weights.tolist()
        return cls(**fields)


def load_document(path) -> ProblemDocument:
    """
    Read and validate a ProblemDocument.

    Raises:
        InvalidInputError: missing or unreadable file, or invalid JSON
        pydantic.ValidationError: document violates the format
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"Cannot read document {path}: {e}")
    try:
        document = ProblemDocument.model_validate_json(text)
    except ValidationError:
        logger.debug(f"[Document] {path} failed validation")
        raise
    logger.debug(f"[Document] Loaded {path} (dim {document.dim})")
    return document
