"""
analysis.py - Isotonic Projection Checks with Certificates

Decision procedures for the three characterisations of isotonic projection:

- check_orthant_isotonic_form: every normal has a^k a^l <= 0 for k != l, i.e.
  the set's projection preserves the coordinate-wise order
- check_isotonic_projection_cone: the irredundant normals are linearly
  independent and pairwise non-acute, i.e. the projection preserves <=_K
- check_graph_isotonic_projection: no two edges share a tail or a head, the
  graph form of the previous test for isotonic regression cones

plus the pairwise-form facet bound, graph decomposition, and a seeded search
for pairs u <= v whose projections are not ordered.

Every decision returns a Certificate. Failing certificates cite the data that
breaks the condition (0-based indices) and re-verify on demand.
"""

import importlib
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy import linalg

from errors import InvalidInputError


cone_model = importlib.import_module("cone-model")
solver_config = importlib.import_module("solver-config")
solvers = importlib.import_module("solvers")

logger = logging.getLogger("isocone.analysis")

ORDERS = ("orthant", "cone")

# Detail keys holding 0-based indices (shifted by to_dict(one_based=True))
_INDEX_DETAILS = ("normals", "irredundant", "pairs", "edges")


# =============================================================================
# CERTIFICATES
# =============================================================================


def _shift(value, offset: int):
    """Add offset to every int inside nested lists/tuples."""
    if isinstance(value, (list, tuple)):
        return [_shift(item, offset) for item in value]
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value) + offset
    return value


def _plain(value):
    """numpy scalars/arrays to JSON-ready Python values."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


@dataclass(frozen=True)
class PassEvidence:
    """What was verified for a passing check."""

    kind: str
    details: Dict = field(default_factory=dict)


@dataclass(frozen=True)
class FailEvidence:
    """
    The data that breaks a condition.

    Kinds and their indices:
        sign_pattern       (normal, k, l) with a^k a^l > 0
        acute_pair         (i, j) with <a_i, a_j> > 0
        linear_dependence  normals of a vanishing combination (details: coefficients)
        shared_tail        two edges (i, j), (i, k)
        shared_head        two edges (i, k), (j, k)
        block_overflow     pair (k, l) with more than two irredundant normals (details: normals)
        not_generating     ()
    """

    kind: str
    indices: Tuple = ()
    value: Optional[float] = None
    details: Dict = field(default_factory=dict)


@dataclass(frozen=True)
class Certificate:
    """
    Verdict of a check with machine-checkable evidence.

    Attributes:
        check: Name of the check that produced it (key of CHECKS)
        verdict: True when the condition holds
        witness: PassEvidence or FailEvidence
        warnings: Flags that qualify the verdict (e.g. "not_generating")
    """

    check: str
    verdict: bool
    witness: Union[PassEvidence, FailEvidence]
    warnings: Tuple[str, ...] = ()

    def to_dict(self, one_based: bool = True) -> dict:
        offset = 1 if one_based else 0
        details = {
            key: _shift(_plain(value), offset) if key in _INDEX_DETAILS else _plain(value)
            for key, value in self.witness.details.items()
        }
        witness = {"kind": self.witness.kind, "details": details}
        if isinstance(self.witness, FailEvidence):
            witness["indices"] = _shift(_plain(list(self.witness.indices)), offset)
            witness["value"] = None if self.witness.value is None else float(self.witness.value)
        return {
            "verdict": bool(self.verdict),
            "witness": witness,
            "warnings": list(self.warnings),
        }

    def reverify(self, subject, config=None) -> bool:
        """
        Recompute the certificate against `subject` (cone, half-space list or graph).

        Failing certificates recompute the cited quantity and return True when it
        still violates the condition; passing certificates re-run their check.
        """
        if isinstance(self.witness, PassEvidence):
            return CHECKS[self.check](subject, config).verdict
        return _reverify_failure(self.witness, subject, config)


def _reverify_failure(evidence: FailEvidence, subject, config) -> bool:
    kind = evidence.kind
    if kind in ("shared_tail", "shared_head"):
        first, second = (tuple(edge) for edge in evidence.indices)
        if first not in subject.edges or second not in subject.edges or first == second:
            return False
        position = 0 if kind == "shared_tail" else 1
        return first[position] == second[position]

    if kind == "not_generating":
        generating, _ = cone_model.is_generating(subject, config)
        return not generating

    normals = _normal_rows(subject)
    if kind == "sign_pattern":
        i, k, l = evidence.indices
        return bool(normals[i][k] * normals[i][l] > 0)
    if kind == "acute_pair":
        i, j = evidence.indices
        return bool(normals[i] @ normals[j] > 0)
    if kind == "linear_dependence":
        coefficients = np.asarray(evidence.details["coefficients"], dtype=float)
        rows = normals[list(evidence.indices)]
        combination = coefficients @ rows
        scale = float(np.abs(coefficients) @ np.linalg.norm(rows, axis=1))
        return bool(np.all(coefficients != 0) and np.linalg.norm(combination) <= 1e-8 * scale)
    if kind == "block_overflow":
        cited = evidence.details["normals"]
        blocks = cone_model.pairwise_blocks(subject)
        block = set(blocks.get(tuple(evidence.indices), []))
        return len(cited) > 2 and set(cited) <= block
    raise InvalidInputError(f"Unknown evidence kind: {kind}")


def _normal_rows(subject) -> np.ndarray:
    """Normals of a cone or of a sequence of half-spaces / raw normals."""
    if isinstance(subject, cone_model.PolyhedralCone):
        return subject.normal_matrix
    return np.vstack([h.normal if isinstance(h, cone_model.HalfSpace) else cone_model.as_vector(h) for h in subject])


# =============================================================================
# NORMAL-VECTOR CHECKS
# =============================================================================


def check_orthant_isotonic_form(halfspaces, config=None) -> Certificate:
    """
    Sign condition a^k a^l <= 0 (k != l) for every normal.

    Equivalently each normal has at most one positive and at most one negative
    entry. Offsets play no role, so half-spaces of general sets are accepted.

    Args:
        halfspaces: PolyhedralCone, or a non-empty sequence of HalfSpace / normals

    Raises:
        InvalidInputError: empty input
        DimensionMismatchError: normals of different dimension
    """
    if isinstance(halfspaces, cone_model.PolyhedralCone):
        halfspaces = halfspaces.halfspaces
    if len(halfspaces) == 0:
        raise InvalidInputError("check_orthant_isotonic_form needs at least one half-space")
    halfspaces = [h if isinstance(h, cone_model.HalfSpace) else cone_model.HalfSpace(h) for h in halfspaces]
    dim = halfspaces[0].dim
    for h in halfspaces:
        cone_model._require_same_dim(h.dim, dim, "half-spaces of one set")

    for index, h in enumerate(halfspaces):
        for k, l in itertools.combinations(np.flatnonzero(h.normal).tolist(), 2):
            product = float(h.normal[k] * h.normal[l])
            if product > 0:
                logger.debug(f"[Analysis] normal {index} breaks the sign condition at ({k}, {l})")
                return Certificate(
                    "orthant_isotonic_form", False, FailEvidence("sign_pattern", (index, k, l), product)
                )

    return Certificate("orthant_isotonic_form", True, PassEvidence("sign_pattern", {"checked": len(halfspaces)}))


def _numerical_rank(matrix: np.ndarray, rank_tol: float) -> int:
    """Rank from pivoted QR, pivots below rank_tol * |R_00| treated as zero."""
    _, R, _ = linalg.qr(matrix, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(R))
    if diagonal.size == 0 or diagonal[0] == 0:
        return 0
    return int(np.sum(diagonal > rank_tol * diagonal[0]))


def check_isotonic_projection_cone(K, config=None) -> Certificate:
    """
    Decide whether P_K is isotone for the cone's own order.

    On the irredundant normals: true iff they are linearly independent (the
    dual is simplicial in its span) and <a_i, a_j> <= 0 for all i != j.
    Evidence cites the original half-space indices. A "not_generating" warning
    is attached when K has empty interior; the verdict is then that of the
    criterion alone.
    """
    config = config or solver_config.default_config()
    cone_model.require_exact_geometry(K, config, "check_isotonic_projection_cone")
    check = "isotonic_projection_cone"

    if not K.halfspaces:
        return Certificate(check, True, PassEvidence("whole_space", {"irredundant": []}))

    warnings = ()
    generating, _ = cone_model.is_generating(K, config)
    if not generating:
        warnings = ("not_generating",)
        logger.info(f"[Analysis] {K} is not generating; reporting the criterion as is")

    kept = cone_model.irredundant_indices(K, config)
    A = K.normal_matrix[kept]

    rank = _numerical_rank(A.T, config.rank_tol)
    if rank < len(kept):
        coefficients = linalg.null_space(A.T)[:, 0]
        support = np.flatnonzero(np.abs(coefficients) > config.rank_tol * np.abs(coefficients).max())
        cited = tuple(kept[s] for s in support)
        residual = float(np.linalg.norm(coefficients[support] @ A[support]))
        evidence = FailEvidence(
            "linear_dependence", cited, residual, {"coefficients": coefficients[support].tolist(), "rank": rank}
        )
        return Certificate(check, False, evidence, warnings)

    pairs, products = [], []
    norms = K.normal_norms
    for i, j in itertools.combinations(kept, 2):
        product = float(K.normal_matrix[i] @ K.normal_matrix[j])
        if product > config.tol * norms[i] * norms[j]:
            logger.debug(f"[Analysis] normals {i} and {j} form an acute angle ({product:.3e})")
            return Certificate(check, False, FailEvidence("acute_pair", (i, j), product), warnings)
        pairs.append((i, j))
        products.append(product)

    details = {"irredundant": kept, "pairs": pairs, "inner_products": products}
    return Certificate(check, True, PassEvidence("non_acute_independent", details), warnings)


def check_pairwise_form(K, config=None) -> Certificate:
    """
    Pairwise form with the facet bound: K generating, every normal passes the
    sign condition, and each coordinate-pair block keeps at most two
    irredundant normals (so K has at most m(m-1) facets).

    Raises:
        InvalidInputError: dim < 2 or K without half-spaces
    """
    config = config or solver_config.default_config()
    cone_model.require_exact_geometry(K, config, "check_pairwise_form")
    check = "pairwise_form"
    if K.dim < 2:
        raise InvalidInputError("the pairwise form needs dimension at least 2")

    generating, _ = cone_model.is_generating(K, config)
    if not generating:
        return Certificate(check, False, FailEvidence("not_generating"))

    sign = check_orthant_isotonic_form(K)
    if not sign.verdict:
        return Certificate(check, False, sign.witness)

    kept = cone_model.irredundant_indices(K, config)
    blocks = cone_model.pairwise_blocks(K.restricted(kept))
    for pair, members in sorted(blocks.items()):
        if len(members) > 2:
            cited = [kept[s] for s in members]
            evidence = FailEvidence("block_overflow", pair, float(len(members)), {"normals": cited})
            return Certificate(check, False, evidence)

    details = {
        "pairs": [list(pair) for pair in sorted(blocks)],
        "block_sizes": [len(blocks[pair]) for pair in sorted(blocks)],
        "facets": len(kept),
        "facet_bound": K.dim * (K.dim - 1),
    }
    return Certificate(check, True, PassEvidence("facet_bound", details))


# =============================================================================
# GRAPH CHECKS
# =============================================================================


@dataclass(frozen=True)
class GraphComponent:
    """Weakly connected component with its label: chain, non-chain or isolated."""

    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    label: str

    def to_dict(self, one_based: bool = True) -> dict:
        offset = 1 if one_based else 0
        return {
            "vertices": _shift(list(self.vertices), offset),
            "edges": _shift([list(e) for e in self.edges], offset),
            "label": self.label,
        }


def is_transitively_reduced(g) -> bool:
    """True iff no edge (i, j) is implied by another directed path from i to j."""
    digraph = g.to_networkx()
    for i, j in g.edges:
        digraph.remove_edge(i, j)
        implied = nx.has_path(digraph, i, j)
        digraph.add_edge(i, j)
        if implied:
            return False
    return True


def transitive_reduction(g):
    """
    Minimal graph with the same reachability (acyclic graphs only).

    Surviving edges keep their original order.

    Raises:
        InvalidInputError: g has a directed cycle
    """
    digraph = g.to_networkx()
    if not nx.is_directed_acyclic_graph(digraph):
        raise InvalidInputError("transitive reduction is only defined here for acyclic graphs")
    reduced = nx.transitive_reduction(digraph)
    return cone_model.ConstraintGraph(g.num_vertices, tuple(e for e in g.edges if reduced.has_edge(*e)))


def check_graph_isotonic_projection(g, config=None) -> Certificate:
    """
    True iff no vertex is the tail of two edges and no vertex is the head of two edges.

    Edges are scanned in order; the first repeated tail or head is cited with
    the earlier edge sharing it. The criterion presumes a transitively reduced
    graph; otherwise a "not_transitively_reduced" warning is attached (the
    cone check on the irredundant normals then decides).
    """
    check = "graph_isotonic_projection"
    warnings = [] if is_transitively_reduced(g) else ["not_transitively_reduced"]
    if not nx.is_directed_acyclic_graph(g.to_networkx()):
        warnings.append("cyclic")

    tails: Dict[int, Tuple[int, int]] = {}
    heads: Dict[int, Tuple[int, int]] = {}
    for edge in g.edges:
        i, j = edge
        if i in tails:
            return Certificate(check, False, FailEvidence("shared_tail", (tails[i], edge)), tuple(warnings))
        if j in heads:
            return Certificate(check, False, FailEvidence("shared_head", (heads[j], edge)), tuple(warnings))
        tails[i] = edge
        heads[j] = edge

    return Certificate(check, True, PassEvidence("distinct_tails_heads", {"edges": list(g.edges)}), tuple(warnings))


def decompose_graph(g) -> List[GraphComponent]:
    """
    Weakly connected components ordered by smallest vertex.

    A component is a chain when its edges form one directed path (each vertex
    tail and head of at most one edge, acyclic); single vertices are isolated.
    """
    digraph = g.to_networkx()
    components = []
    for vertices in sorted(nx.weakly_connected_components(digraph), key=min):
        vertices = tuple(sorted(vertices))
        edges = tuple(e for e in g.edges if e[0] in vertices)
        if len(vertices) == 1:
            label = "isolated"
        else:
            sub = digraph.subgraph(vertices)
            is_path = (
                all(sub.out_degree(v) <= 1 and sub.in_degree(v) <= 1 for v in vertices)
                and nx.is_directed_acyclic_graph(sub)
            )
            label = "chain" if is_path else "non-chain"
        components.append(GraphComponent(vertices, edges, label))
    return components


# Check registry (Certificate.reverify and the CLI report)
CHECKS = {
    "orthant_isotonic_form": check_orthant_isotonic_form,
    "isotonic_projection_cone": check_isotonic_projection_cone,
    "pairwise_form": check_pairwise_form,
    "graph_isotonic_projection": check_graph_isotonic_projection,
}


# =============================================================================
# COUNTEREXAMPLE SEARCH
# =============================================================================


@dataclass(frozen=True, eq=False)
class IsotonicityWitness:
    """
    u <= v whose projections are not ordered.

    Attributes:
        violated: Coordinate (orthant order) or half-space index (cone order)
            where Pv - Pu leaves the ordering cone
        trial: 0-based trial that found the pair
    """

    u: np.ndarray
    v: np.ndarray
    pu: np.ndarray
    pv: np.ndarray
    order: str
    violated: int
    trial: int

    def to_dict(self, one_based: bool = True) -> dict:
        return {
            "u": self.u.tolist(),
            "v": self.v.tolist(),
            "Pu": self.pu.tolist(),
            "Pv": self.pv.tolist(),
            "order": self.order,
            "violated": self.violated + (1 if one_based else 0),
            "trial": self.trial,
        }


def _ordering_generators(K, order: str, config) -> np.ndarray:
    if order == "orthant":
        return np.eye(K.dim)
    if not K.halfspaces:
        return np.vstack([np.eye(K.dim), -np.eye(K.dim)])
    rays = cone_model.extreme_rays(K, config)
    return np.vstack(rays) if rays else np.zeros((0, K.dim))


def _order_violation(K, order: str, difference: np.ndarray) -> Tuple[float, int]:
    """Largest amount by which difference leaves the ordering cone, and where."""
    if order == "orthant":
        k = int(np.argmin(difference))
        return float(-difference[k]), k
    if not K.halfspaces:
        return 0.0, -1
    values = cone_model.scaled_values(K, difference)
    i = int(np.argmax(values))
    return float(values[i]), i


def find_isotonicity_counterexample(
    K, order: str = "cone", trials: int = 1000, seed: Optional[int] = None, config=None
) -> Optional[IsotonicityWitness]:
    """
    Seeded search for u <= v with P_K u not <= P_K v.

    u is uniform on [-1, 1]^m and v = u + sum_r c_r r with c_r uniform on
    [0, 1] over the generators r of the ordering cone (unit vectors for the
    orthant, extreme rays of K for the cone order). Both points are projected
    exactly; a violation must exceed isotonicity_tol.

    Args:
        K: PolyhedralCone with dim <= config.dmax
        order: "orthant" or "cone" (the order <=_K of K itself)
        trials: Number of sampled pairs
        seed: Generator seed (default config.seed)

    Returns:
        IsotonicityWitness, or None when no trial falsifies isotonicity
    """
    config = config or solver_config.default_config()
    if order not in ORDERS:
        raise InvalidInputError(f"order must be one of {ORDERS}, got '{order}'")
    if trials < 1:
        raise InvalidInputError(f"trials must be positive, got {trials}")
    cone_model.require_exact_geometry(K, config, "find_isotonicity_counterexample")
    seed = config.seed if seed is None else seed

    generators = _ordering_generators(K, order, config)
    rng = np.random.default_rng(seed)
    m = K.dim

    for trial in range(trials):
        u = rng.uniform(-1.0, 1.0, m)
        coefficients = rng.uniform(0.0, 1.0, generators.shape[0])
        v = u + coefficients @ generators
        pu = solvers.project_exact(K, u, config).point
        pv = solvers.project_exact(K, v, config).point
        amount, where = _order_violation(K, order, pv - pu)
        if amount > config.isotonicity_tol:
            logger.info(f"[Falsify] trial {trial}: projections out of order by {amount:.3e} at {where}")
            return IsotonicityWitness(
                cone_model.as_vector(u), cone_model.as_vector(v), pu, pv, order, where, trial
            )

    logger.info(f"[Falsify] no violation of the {order} order in {trials} trials (seed {seed})")
    return None


# =============================================================================
# REPORTS
# =============================================================================


def analyze_cone(K, graph=None, config=None) -> dict:
    """
    Full report for a cone (and the graph it came from, if any).

    Keys: dim, halfspaces, generating, witness, orthant_isotonic_form,
    isotonic_projection_cone, orthant_subcone, pairwise_form (None below
    dimension 2), and graph_check / components when a graph is given.
    Indices in the report are 1-based.
    """
    config = config or solver_config.default_config()
    cone_model.require_exact_geometry(K, config, "analyze")

    generating, witness = cone_model.is_generating(K, config)
    if K.halfspaces:
        sign_form = check_orthant_isotonic_form(K).to_dict()
    else:
        sign_form = Certificate("orthant_isotonic_form", True, PassEvidence("sign_pattern", {"checked": 0})).to_dict()
    inside, coordinate = cone_model.is_orthant_subcone(K, config)

    if K.dim >= 2 and K.halfspaces:
        pairwise = check_pairwise_form(K, config).to_dict()
    else:
        pairwise = None

    report = {
        "dim": K.dim,
        "halfspaces": len(K),
        "generating": generating,
        "witness": None if witness is None else witness.tolist(),
        "orthant_isotonic_form": sign_form,
        "isotonic_projection_cone": check_isotonic_projection_cone(K, config).to_dict(),
        "orthant_subcone": {"verdict": inside, "coordinate": None if coordinate is None else coordinate + 1},
        "pairwise_form": pairwise,
    }
    if graph is not None:
        report["graph_check"] = check_graph_isotonic_projection(graph).to_dict()
        report["components"] = [component.to_dict() for component in decompose_graph(graph)]
    return report


def analyze_document(document, config=None) -> dict:
    """Report for a ProblemDocument (cone from normals or from graph and weights)."""
    return analyze_cone(document.to_cone(), document.to_graph(), config)
