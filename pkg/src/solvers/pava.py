"""
pava.py - Pool Adjacent Violators

Exact weighted least-squares fit under the chain order x^1 <= ... <= x^m:

    argmin sum_i w_i (x^i - y^i)^2

Observations are pushed onto a stack of pools; while the previous pool's mean
is not below the last one's, the two are merged (equal means are pooled too).
Weighted sums are carried as (high, low) pairs with an error-free two-sum, so
long merges do not accumulate rounding.
"""

import importlib
import logging
from typing import List, Tuple

import numpy as np

from errors import DimensionMismatchError


cone_model = importlib.import_module("cone-model")

logger = logging.getLogger("isocone.solvers.pava")


def _two_sum(a: float, b: float) -> Tuple[float, float]:
    """s, e with s = fl(a + b) and a + b = s + e exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _add_compensated(left: Tuple[float, float], right: Tuple[float, float]) -> Tuple[float, float]:
    high, error = _two_sum(left[0], right[0])
    return high, left[1] + right[1] + error


class _Pool:
    __slots__ = ("weighted_sum", "weight", "length")

    def __init__(self, value: float, weight: float):
        self.weighted_sum = (value * weight, 0.0)
        self.weight = (weight, 0.0)
        self.length = 1

    @property
    def mean(self) -> float:
        return (self.weighted_sum[0] + self.weighted_sum[1]) / (self.weight[0] + self.weight[1])

    def absorb(self, other: "_Pool"):
        self.weighted_sum = _add_compensated(self.weighted_sum, other.weighted_sum)
        self.weight = _add_compensated(self.weight, other.weight)
        self.length += other.length


def pool_adjacent_violators(y, weights) -> Tuple[np.ndarray, int]:
    """
    Weighted chain isotonic fit.

    Args:
        y: Observations (length m >= 1)
        weights: Positive weights, array-like of length m

    Returns:
        (fit, merges): fitted values and number of pool merges
    """
    y = cone_model.as_vector(y, "y")
    weights = cone_model.as_vector(weights, "weights")
    if y.shape[0] != weights.shape[0]:
        raise DimensionMismatchError(f"y has {y.shape[0]} entries, weights {weights.shape[0]}")

    pools: List[_Pool] = []
    merges = 0
    for value, weight in zip(y.tolist(), weights.tolist()):
        pools.append(_Pool(value, weight))
        while len(pools) > 1 and pools[-2].mean >= pools[-1].mean:
            last = pools.pop()
            pools[-1].absorb(last)
            merges += 1

    fit = np.concatenate([np.full(pool.length, pool.mean) for pool in pools])
    logger.debug(f"[PAVA] {len(y)} values pooled into {len(pools)} blocks ({merges} merges)")
    return cone_model.as_vector(fit, "isotonic fit"), merges


def project_pava_chain(y, w) -> np.ndarray:
    """
    argmin sum_i w_i (x^i - y^i)^2 subject to x^1 <= ... <= x^m.

    Args:
        y: Observations
        w: WeightVector of the same length

    Returns:
        Fitted vector
    """
    fit, _ = pool_adjacent_violators(y, w.weights)
    return fit
