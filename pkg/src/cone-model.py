"""
cone-model.py - Polyhedral Cone Geometry

Core geometric types and the cone families built from them.

A cone is stored as a finite list of origin half-spaces
K = {x : <a_i, x> <= 0 for every i}. Normals are kept exactly as given (never
normalised), so fixtures such as (-2, 1, 0) round-trip unchanged; every
tolerance test scales by the normal's Euclidean norm instead.

Families:
- orthant R^m_+ (normals -e_i)
- isotonic regression cone K^w_E of a constraint graph and weights
- weighted monotone cone (isotonic cone of the chain 1 -> 2 -> ... -> m)
- extremal pairwise cone with exactly m(m-1) facets
- random pairwise cones (one or two normals per coordinate pair)

Exact geometry (irredundancy, extreme rays, interior witnesses, orthant
containment) is enumerative or LP-based and capped at SolverConfig.dmax.
"""

import importlib
import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import linalg
from scipy.optimize import linprog

from errors import (
    DimensionMismatchError,
    ExactGeometryCapError,
    InvalidInputError,
    NumericalError,
)


solver_config = importlib.import_module("solver-config")

logger = logging.getLogger("isocone.cone_model")

# Vectors are validated, read-only float64 arrays
EuclideanVector = np.ndarray


def as_vector(coords, name: str = "vector") -> EuclideanVector:
    """
    Validate coordinates and return them as a read-only float array.

    Args:
        coords: Sequence of reals (list, tuple or array)
        name: Label used in error messages

    Returns:
        1-d float64 numpy array with the write flag cleared

    Raises:
        InvalidInputError: empty, not 1-d, non-numeric or non-finite input
    """
    try:
        vector = np.array(coords, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{name} must be a sequence of reals: {e}")

    if vector.ndim != 1 or vector.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-d sequence, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise InvalidInputError(f"{name} has non-finite coordinates: {vector.tolist()}")

    vector.setflags(write=False)
    return vector


def _require_same_dim(dim_a: int, dim_b: int, what: str):
    if dim_a != dim_b:
        raise DimensionMismatchError(f"{what}: dimensions {dim_a} and {dim_b} differ")


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """
    Closed half-space {x : <normal, x> <= offset}.

    Cones only use offset 0; nonzero offsets are accepted so the sign-pattern
    analysis can run on half-space lists describing general convex sets.
    """

    normal: EuclideanVector
    offset: float = 0.0

    def __post_init__(self):
        normal = as_vector(self.normal, "half-space normal")
        if not np.any(normal):
            raise InvalidInputError("half-space normal must be a nonzero vector")
        offset = float(self.offset)
        if not math.isfinite(offset):
            raise InvalidInputError(f"half-space offset must be finite, got {offset}")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    @cached_property
    def norm(self) -> float:
        return float(np.linalg.norm(self.normal))

    def __repr__(self):
        return f"HalfSpace(normal={self.normal.tolist()}, offset={self.offset})"


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """
    Finite intersection of origin half-spaces in R^dim.

    An empty half-space list is the whole space.

    Attributes:
        dim: Ambient dimension
        halfspaces: Tuple of HalfSpace, all with offset 0 and matching dimension
    """

    dim: int
    halfspaces: Tuple[HalfSpace, ...] = ()

    def __post_init__(self):
        if isinstance(self.dim, bool) or not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InvalidInputError(f"cone dimension must be a positive integer, got {self.dim!r}")

        halfspaces = tuple(h if isinstance(h, HalfSpace) else HalfSpace(h) for h in self.halfspaces)
        for index, halfspace in enumerate(halfspaces):
            _require_same_dim(halfspace.dim, self.dim, f"normal {index} of a {self.dim}-dim cone")
            if halfspace.offset != 0.0:
                raise InvalidInputError(
                    f"cone half-space {index} has offset {halfspace.offset}; cones need offset 0"
                )

        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "halfspaces", halfspaces)

    @classmethod
    def from_normals(cls, normals: Iterable[Sequence[float]], dim: Optional[int] = None):
        """Build a cone from raw normal vectors (dim inferred when omitted)."""
        halfspaces = tuple(HalfSpace(normal) for normal in normals)
        if dim is None:
            if not halfspaces:
                raise InvalidInputError("dim is required for a cone without normals")
            dim = halfspaces[0].dim
        return cls(dim, halfspaces)

    @cached_property
    def normal_matrix(self) -> np.ndarray:
        """Normals stacked as rows, shape (len(self), dim)."""
        if not self.halfspaces:
            matrix = np.zeros((0, self.dim))
        else:
            matrix = np.vstack([h.normal for h in self.halfspaces])
        matrix.setflags(write=False)
        return matrix

    @cached_property
    def normal_norms(self) -> np.ndarray:
        norms = np.array([h.norm for h in self.halfspaces], dtype=float)
        norms.setflags(write=False)
        return norms

    @cached_property
    def unit_normals(self) -> np.ndarray:
        """Normals rescaled to unit length (for scale-invariant LPs)."""
        if not self.halfspaces:
            return self.normal_matrix
        units = self.normal_matrix / self.normal_norms[:, None]
        units.setflags(write=False)
        return units

    def restricted(self, indices: Iterable[int]) -> "PolyhedralCone":
        """Cone defined by the listed half-spaces only (order preserved)."""
        return PolyhedralCone(self.dim, tuple(self.halfspaces[i] for i in indices))

    def to_document(self) -> dict:
        """ProblemDocument fields describing this cone."""
        return {"dim": self.dim, "normals": self.normal_matrix.tolist()}

    def __len__(self):
        return len(self.halfspaces)

    def __repr__(self):
        return f"PolyhedralCone(dim={self.dim}, halfspaces={len(self.halfspaces)})"


@dataclass(frozen=True, eq=False)
class ConstraintGraph:
    """
    Simple directed graph on vertices 0..num_vertices-1 (no loops).

    Edges are stored 0-based in insertion order with duplicates dropped; the
    file format is 1-based and converts through from_one_based/to_one_based.
    An edge (i, j) encodes the order constraint x^i <= x^j.
    """

    num_vertices: int
    edges: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        m = self.num_vertices
        if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
            raise InvalidInputError(f"graph needs a positive vertex count, got {m!r}")

        edges = []
        for edge in self.edges:
            if len(edge) != 2:
                raise InvalidInputError(f"edge {edge!r} must be a pair")
            i, j = int(edge[0]), int(edge[1])
            if not (0 <= i < m and 0 <= j < m):
                raise InvalidInputError(f"edge ({i}, {j}) references a vertex outside 0..{m - 1}")
            if i == j:
                raise InvalidInputError(f"loop at vertex {i}: constraint graphs must be simple")
            edges.append((i, j))

        object.__setattr__(self, "num_vertices", int(m))
        object.__setattr__(self, "edges", tuple(dict.fromkeys(edges)))

    @classmethod
    def from_one_based(cls, num_vertices: int, edges: Iterable[Sequence[int]]):
        """Build from the file format's 1-based vertex labels."""
        return cls(num_vertices, tuple((int(i) - 1, int(j) - 1) for i, j in edges))

    @classmethod
    def chain(cls, num_vertices: int):
        """The directed path 0 -> 1 -> ... -> num_vertices-1."""
        return cls(num_vertices, tuple((i, i + 1) for i in range(num_vertices - 1)))

    def to_one_based(self) -> List[List[int]]:
        return [[i + 1, j + 1] for i, j in self.edges]

    def to_networkx(self) -> nx.DiGraph:
        """networkx view including isolated vertices."""
        digraph = nx.DiGraph()
        digraph.add_nodes_from(range(self.num_vertices))
        digraph.add_edges_from(self.edges)
        return digraph

    def __repr__(self):
        return f"ConstraintGraph(vertices={self.num_vertices}, edges={len(self.edges)})"


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Strictly positive weights w^1..w^m."""

    weights: np.ndarray

    def __post_init__(self):
        weights = as_vector(self.weights, "weights")
        if np.any(weights <= 0):
            raise InvalidInputError(f"weights must be strictly positive, got {weights.tolist()}")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def unit(cls, length: int):
        return cls(np.ones(length))

    @cached_property
    def sqrt(self) -> np.ndarray:
        root = np.sqrt(self.weights)
        root.setflags(write=False)
        return root

    def __len__(self):
        return self.weights.shape[0]

    def __repr__(self):
        return f"WeightVector({self.weights.tolist()})"


# =============================================================================
# MEMBERSHIP AND ORDER
# =============================================================================


def _resolve_tol(tol: Optional[float]) -> float:
    if tol is None:
        return solver_config.default_config().tol
    if tol < 0:
        raise InvalidInputError(f"tolerance must be nonnegative, got {tol}")
    return float(tol)


def scaled_values(K: PolyhedralCone, x) -> np.ndarray:
    """<a_i, x> / ||a_i|| for every half-space (scale-invariant constraint values)."""
    x = as_vector(x, "point")
    _require_same_dim(x.shape[0], K.dim, "cone and point")
    if not K.halfspaces:
        return np.zeros(0)
    return K.unit_normals @ x


def max_violation(K: PolyhedralCone, x) -> float:
    """Largest scaled constraint violation of x (0.0 when x is in K)."""
    values = scaled_values(K, x)
    if values.size == 0:
        return 0.0
    return float(max(0.0, values.max()))


def cone_contains(K: PolyhedralCone, x, tol: Optional[float] = None) -> bool:
    """
    True iff <a_i, x> <= tol * ||a_i|| for every half-space of K.

    Raises:
        DimensionMismatchError: x does not live in K's space
    """
    tol = _resolve_tol(tol)
    x = as_vector(x, "point")
    _require_same_dim(x.shape[0], K.dim, "cone and point")
    if not K.halfspaces:
        return True
    return bool(np.all(K.normal_matrix @ x <= tol * K.normal_norms))


def leq_orthant(u, v) -> bool:
    """Coordinate-wise order: u <= v iff u^i <= v^i for every i."""
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    _require_same_dim(u.shape[0], v.shape[0], "coordinate-wise comparison")
    return bool(np.all(u <= v))


def leq_cone(K: PolyhedralCone, u, v, tol: Optional[float] = None) -> bool:
    """Cone order: u <=_K v iff v - u lies in K."""
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    _require_same_dim(u.shape[0], v.shape[0], "cone-order comparison")
    return cone_contains(K, v - u, tol)


# =============================================================================
# CONSTRUCTORS
# =============================================================================


def orthant_cone(m: int) -> PolyhedralCone:
    """Nonnegative orthant R^m_+ written with the normals -e_i."""
    if m < 1:
        raise InvalidInputError(f"orthant dimension must be positive, got {m}")
    return PolyhedralCone.from_normals(-np.eye(m), dim=m)


def build_isotonic_cone(g: ConstraintGraph, w: WeightVector) -> PolyhedralCone:
    """
    Isotonic regression cone K^w_E = {x : x^i/sqrt(w^i) <= x^j/sqrt(w^j), (i,j) in E}.

    One normal per edge (i, j): 1/sqrt(w^i) at i, -1/sqrt(w^j) at j, zero elsewhere.

    Raises:
        DimensionMismatchError: weight count differs from vertex count
    """
    m = g.num_vertices
    _require_same_dim(len(w), m, "weights and graph vertices")

    inverse_roots = 1.0 / w.sqrt
    normals = []
    for i, j in g.edges:
        normal = np.zeros(m)
        normal[i] = inverse_roots[i]
        normal[j] = -inverse_roots[j]
        normals.append(normal)
    return PolyhedralCone(m, tuple(HalfSpace(normal) for normal in normals))


def build_monotone_cone(w: WeightVector) -> PolyhedralCone:
    """Weighted monotone cone: the isotonic cone of the chain 1 -> 2 -> ... -> m."""
    m = len(w)
    if m < 2:
        raise InvalidInputError(f"monotone cone needs at least 2 weights, got {m}")
    return build_isotonic_cone(ConstraintGraph.chain(m), w)


def extremal_isotonic_cone(m: int) -> PolyhedralCone:
    """
    Orthant-isotonic cone with exactly m(m-1) facets.

    For every pair k < l (lexicographic) two normals supported on {k, l}:
    (-2 at k, 1 at l) and (1 at k, -2 at l). Every normal a has <a, 1> = -1,
    so (1, ..., 1) is interior, and the cone lies inside R^m_+.
    """
    if m < 2:
        raise InvalidInputError(f"extremal cone needs m >= 2, got {m}")

    normals = []
    for k, l in itertools.combinations(range(m), 2):
        first = np.zeros(m)
        first[k], first[l] = -2.0, 1.0
        second = np.zeros(m)
        second[k], second[l] = 1.0, -2.0
        normals.extend([first, second])
    return PolyhedralCone.from_normals(normals, dim=m)


def random_pairwise_cone(m: int, seed: int, pairs_per_block: int = 2) -> PolyhedralCone:
    """
    Random cone of the pairwise form: normals supported on coordinate pairs.

    For each k < l, `pairs_per_block` normals with one entry -s (s in [0.5, 2])
    and the other t in [0, s) at a random position of the pair, so every normal
    satisfies the sign condition and <a, 1> = t - s < 0 (the cone is generating).
    About one normal in five has t = 0 (a single nonzero entry).
    """
    if m < 2:
        raise InvalidInputError(f"pairwise cone needs m >= 2, got {m}")
    if pairs_per_block not in (1, 2):
        raise InvalidInputError(f"pairs_per_block must be 1 or 2, got {pairs_per_block}")

    rng = np.random.default_rng(seed)
    normals = []
    for k, l in itertools.combinations(range(m), 2):
        for _ in range(pairs_per_block):
            s = rng.uniform(0.5, 2.0)
            t = 0.0 if rng.random() < 0.2 else rng.uniform(0.0, s)
            negative, other = (k, l) if rng.random() < 0.5 else (l, k)
            normal = np.zeros(m)
            normal[negative] = -s
            normal[other] = t
            normals.append(normal)
    return PolyhedralCone.from_normals(normals, dim=m)


def scale_by_weights(z, w: WeightVector, direction: str = "forward") -> EuclideanVector:
    """
    Componentwise sqrt-weight scaling.

    Args:
        z: Vector to scale
        w: Weights
        direction: "forward" returns sqrt(w^i) z^i, "inverse" returns z^i / sqrt(w^i)
    """
    z = as_vector(z, "z")
    _require_same_dim(z.shape[0], len(w), "vector and weights")
    if direction == "forward":
        scaled = z * w.sqrt
    elif direction == "inverse":
        scaled = z / w.sqrt
    else:
        raise InvalidInputError(f"direction must be 'forward' or 'inverse', got '{direction}'")
    return as_vector(scaled, "scaled vector")


# Cone family registry for easy lookup (CLI `construct`)
CONE_FAMILIES = {
    "orthant": {
        "builder": lambda dim: orthant_cone(dim),
        "description": "Nonnegative orthant R^m_+ (normals -e_i)",
        "parameters": ["dim"],
    },
    "extremal": {
        "builder": lambda dim: extremal_isotonic_cone(dim),
        "description": "Orthant-isotonic cone with exactly m(m-1) facets",
        "parameters": ["dim"],
    },
    "monotone": {
        "builder": lambda weights: build_monotone_cone(weights),
        "description": "Weighted monotone cone x^1/sqrt(w^1) <= ... <= x^m/sqrt(w^m)",
        "parameters": ["weights"],
    },
    "isotonic": {
        "builder": lambda graph, weights=None: build_isotonic_cone(
            graph, weights if weights is not None else WeightVector.unit(graph.num_vertices)
        ),
        "description": "Isotonic regression cone K^w_E of a constraint graph",
        "parameters": ["graph", "weights"],
    },
}


def create_cone(kind: str, **params) -> PolyhedralCone:
    """
    Factory function to build a cone of a registered family.

    Args:
        kind: Key of CONE_FAMILIES
        **params: Family-specific parameters

    Returns:
        PolyhedralCone
    """
    if kind not in CONE_FAMILIES:
        raise InvalidInputError(f"Unknown cone family: {kind}. Available: {list(CONE_FAMILIES)}")
    try:
        return CONE_FAMILIES[kind]["builder"](**params)
    except TypeError as e:
        expected = CONE_FAMILIES[kind]["parameters"]
        raise InvalidInputError(f"cone family '{kind}' takes parameters {expected}: {e}")


# =============================================================================
# EXACT GEOMETRY (capped at SolverConfig.dmax)
# =============================================================================


def require_exact_geometry(K: PolyhedralCone, config, what: str):
    """Raise ExactGeometryCapError when K is above the exact-geometry cap."""
    if K.dim > config.dmax:
        raise ExactGeometryCapError(
            f"{what} is exact-geometry only and limited to dim <= {config.dmax} "
            f"(got {K.dim}); raise {solver_config.DMAX_ENV_VAR} or use the Dykstra solver",
            dim=K.dim,
            cap=config.dmax,
        )


def _solve_cube_lp(objective: np.ndarray, A_ub: Optional[np.ndarray], extra_free: int = 0):
    """
    Minimise objective @ z over z = (x, t) with A_ub @ z <= 0 and x in [-1, 1]^m.

    The trailing `extra_free` variables are unbounded.
    """
    n_vars = objective.shape[0]
    bounds = [(-1.0, 1.0)] * (n_vars - extra_free) + [(None, None)] * extra_free
    has_rows = A_ub is not None and A_ub.shape[0] > 0
    result = linprog(
        c=objective,
        A_ub=A_ub if has_rows else None,
        b_ub=np.zeros(A_ub.shape[0]) if has_rows else None,
        bounds=bounds,
        method="highs",
    )
    if result.status != 0:
        raise NumericalError(f"LP over the unit cube failed: {result.message}")
    return float(result.fun), np.asarray(result.x)


def irredundant_indices(K: PolyhedralCone, config=None) -> List[int]:
    """
    Indices of an irredundant sub-list of K's half-spaces (same point set).

    Half-space i is dropped when max <a_i, x>/||a_i|| over the cube intersected
    with the currently kept others is at most lp_tol; duplicates therefore keep
    their last copy.
    """
    config = config or solver_config.default_config()
    require_exact_geometry(K, config, "irredundant_representation")

    units = K.unit_normals
    kept = list(range(len(K)))
    for index in range(len(K)):
        others = [j for j in kept if j != index]
        best, _ = _solve_cube_lp(-units[index], units[others] if others else None)
        if -best <= config.lp_tol:
            kept.remove(index)
            logger.debug(f"[Geometry] half-space {index} is redundant (max {-best:.3e})")
    return kept


def irredundant_representation(K: PolyhedralCone, config=None) -> PolyhedralCone:
    """Sub-list of K's half-spaces defining the same set, none removable."""
    return K.restricted(irredundant_indices(K, config))


def extreme_rays(K: PolyhedralCone, config=None) -> List[EuclideanVector]:
    """
    Unit generators of K: its extreme rays, plus both signs of a lineality basis.

    For a pointed cone every subset of dim-1 normals whose equality system has
    a one-dimensional null space is tried, keeping each sign of the spanning
    direction that satisfies all inequalities. A cone with lineality space L
    splits as L + (K ∩ L^perp); the subsets then shrink by dim L and the basis
    of L joins every equality system, so the rays of the pointed part are
    found the same way and ±(basis of L) completes the generating set.

    Raises:
        InvalidInputError: K is the whole space (no half-spaces)
    """
    config = config or solver_config.default_config()
    require_exact_geometry(K, config, "extreme_rays")
    if not K.halfspaces:
        raise InvalidInputError("the whole space (no half-spaces) has no extreme rays")

    m = K.dim
    A = K.normal_matrix
    slack = config.tol * K.normal_norms
    lineality = linalg.null_space(A).T
    rays: List[np.ndarray] = []

    def keep(candidate):
        if not any(np.allclose(candidate, ray, atol=1e-9) for ray in rays):
            rays.append(as_vector(candidate, "ray"))

    for subset in itertools.combinations(range(len(K)), m - 1 - lineality.shape[0]):
        system = np.vstack([A[list(subset)], lineality])
        basis = linalg.null_space(system) if system.shape[0] else np.eye(m)
        if basis.shape[1] != 1:
            continue
        direction = basis[:, 0] / np.linalg.norm(basis[:, 0])
        for candidate in (direction, -direction):
            if np.all(A @ candidate <= slack):
                keep(candidate)

    for direction in lineality:
        keep(direction)
        keep(-direction)

    logger.debug(f"[Geometry] {K} has {len(rays)} generators ({lineality.shape[0]} lineality directions)")
    return rays


def is_generating(K: PolyhedralCone, config=None) -> Tuple[bool, Optional[EuclideanVector]]:
    """
    Decide whether K has nonempty interior, returning a strictly interior witness.

    Minimises f(x) = max_i <a_i, x>/||a_i|| over the unit cube (epigraph LP);
    K is generating when f(x*) < -strict_tol. Otherwise the sum of the extreme
    rays is tried as a last candidate. Witnesses are always re-checked.
    """
    config = config or solver_config.default_config()
    require_exact_geometry(K, config, "is_generating")

    m = K.dim
    if not K.halfspaces:
        return True, as_vector(np.ones(m), "witness")

    units = K.unit_normals
    epigraph = np.hstack([units, -np.ones((len(K), 1))])
    objective = np.zeros(m + 1)
    objective[-1] = 1.0
    _, solution = _solve_cube_lp(objective, epigraph, extra_free=1)
    witness = solution[:m]

    if np.all(units @ witness < -config.strict_tol):
        return True, as_vector(witness, "witness")

    try:
        rays = extreme_rays(K, config)
    except InvalidInputError:
        rays = []
    if rays:
        candidate = np.sum(rays, axis=0)
        norm = np.linalg.norm(candidate)
        if norm > 0:
            candidate = candidate / norm
            if np.all(units @ candidate < -config.strict_tol):
                return True, as_vector(candidate, "witness")

    return False, None


def is_orthant_subcone(K: PolyhedralCone, config=None) -> Tuple[bool, Optional[int]]:
    """
    Decide K ⊂ R^m_+; on failure return the first coordinate that can go negative.

    Minimises x^i over K intersected with the unit cube for every i.
    """
    config = config or solver_config.default_config()
    require_exact_geometry(K, config, "is_orthant_subcone")

    units = K.unit_normals if K.halfspaces else None
    for i in range(K.dim):
        objective = np.zeros(K.dim)
        objective[i] = 1.0
        lowest, _ = _solve_cube_lp(objective, units)
        if lowest < -config.lp_tol:
            return False, i
    return True, None


def pairwise_blocks(K: PolyhedralCone) -> Dict[Tuple[int, int], List[int]]:
    """
    Group normals by the coordinate pair they are supported on.

    A normal with two nonzero entries k < l goes to block (k, l). A normal with
    a single nonzero entry k goes to (k, m-1), or to (m-2, m-1) when k is the
    last coordinate.

    Raises:
        InvalidInputError: dim < 2 or a normal with three or more nonzero entries
    """
    m = K.dim
    if m < 2:
        raise InvalidInputError("pairwise blocks need dimension at least 2")

    blocks: Dict[Tuple[int, int], List[int]] = {}
    for index, normal in enumerate(K.normal_matrix):
        support = np.flatnonzero(normal)
        if len(support) > 2:
            raise InvalidInputError(
                f"normal {index} has {len(support)} nonzero entries; pairwise form allows at most 2"
            )
        if len(support) == 2:
            key = (int(support[0]), int(support[1]))
        elif support[0] < m - 1:
            key = (int(support[0]), m - 1)
        else:
            key = (m - 2, m - 1)
        blocks.setdefault(key, []).append(index)
    return blocks
