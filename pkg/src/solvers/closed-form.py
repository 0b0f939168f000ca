"""
closed-form.py - Closed-Form Projections

Projections with explicit formulas: the nonnegative orthant (x -> x+) and a
single half-space. The half-space step is the building block of Dykstra.
"""

import importlib

import numpy as np

from errors import DimensionMismatchError


cone_model = importlib.import_module("cone-model")


def project_orthant(x) -> np.ndarray:
    """x+ : negative coordinates replaced by 0."""
    x = cone_model.as_vector(x, "point")
    return cone_model.as_vector(np.where(x > 0.0, x, 0.0), "projection")


def project_halfspace(x, h) -> np.ndarray:
    """
    Projection onto {z : <a, z> <= c}.

    Returns x when feasible, else x - ((<a, x> - c) / ||a||^2) a.
    """
    x = cone_model.as_vector(x, "point")
    if x.shape[0] != h.dim:
        raise DimensionMismatchError(f"point has dimension {x.shape[0]}, half-space {h.dim}")

    excess = float(h.normal @ x) - h.offset
    if excess <= 0.0:
        return x
    return cone_model.as_vector(x - (excess / h.norm**2) * h.normal, "projection")
