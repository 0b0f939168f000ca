"""
test-analysis.py - Isotonic projection checks and certificates

Verifies that:
1. The sign condition, the cone criterion and the graph criterion give the
   documented verdicts with evidence pointing at the right data
2. Every failing certificate re-verifies against its subject
3. The graph criterion and the cone criterion agree on transitively reduced graphs
4. The counterexample search finds violations only where they exist
"""

import itertools
import sys
from pathlib import Path


# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

import importlib

import numpy as np
import pytest

from errors import InvalidInputError


cone_model = importlib.import_module("cone-model")
analysis = importlib.import_module("analysis")
solvers = importlib.import_module("solvers")

PolyhedralCone = cone_model.PolyhedralCone
ConstraintGraph = cone_model.ConstraintGraph
WeightVector = cone_model.WeightVector

K1 = PolyhedralCone.from_normals([[-2, 1, 0], [1, -2, 0], [0, 0, -1]])
K2 = PolyhedralCone.from_normals([[-2, 1, 0], [1, -2, 0], [0, 1, -1]])


def graph(m, edges):
    return ConstraintGraph.from_one_based(m, edges)


# =============================================================================
# SIGN CONDITION
# =============================================================================


def test_sign_condition_examples():
    assert analysis.check_orthant_isotonic_form(K2).verdict
    assert analysis.check_orthant_isotonic_form(cone_model.extremal_isotonic_cone(3).halfspaces).verdict

    certificate = analysis.check_orthant_isotonic_form([[1, 1, -1]])
    assert not certificate.verdict
    assert certificate.witness.kind == "sign_pattern"
    assert certificate.witness.indices == (0, 0, 1)
    assert certificate.to_dict()["witness"]["indices"] == [1, 1, 2]
    assert certificate.reverify([[1, 1, -1]])


def test_sign_condition_accepts_offsets():
    halfspaces = [cone_model.HalfSpace([1, -1], 2.0), cone_model.HalfSpace([0, -1], -1.0)]
    assert analysis.check_orthant_isotonic_form(halfspaces).verdict


def test_sign_condition_needs_halfspaces():
    with pytest.raises(InvalidInputError):
        analysis.check_orthant_isotonic_form([])


# =============================================================================
# CONE CRITERION
# =============================================================================


def test_k1_is_an_isotonic_projection_cone():
    certificate = analysis.check_isotonic_projection_cone(K1)
    assert certificate.verdict
    assert certificate.warnings == ()
    assert certificate.reverify(K1)


def test_k2_fails_with_the_acute_pair():
    certificate = analysis.check_isotonic_projection_cone(K2)
    assert not certificate.verdict
    assert certificate.witness.kind == "acute_pair"
    assert certificate.witness.indices == (0, 2)
    assert certificate.witness.value == pytest.approx(1.0, abs=1e-12)
    assert certificate.to_dict()["witness"]["indices"] == [1, 3]
    assert certificate.reverify(K2)


def test_orthant_is_an_isotonic_projection_cone():
    certificate = analysis.check_isotonic_projection_cone(cone_model.orthant_cone(4))
    assert certificate.verdict
    assert all(product == 0.0 for product in certificate.witness.details["inner_products"])


def test_dependent_normals_fail_with_a_vanishing_combination():
    K = cone_model.extremal_isotonic_cone(3)
    certificate = analysis.check_isotonic_projection_cone(K)
    assert not certificate.verdict
    assert certificate.witness.kind == "linear_dependence"
    assert certificate.reverify(K)


def test_non_generating_cone_carries_a_warning():
    line = PolyhedralCone.from_normals([[1, 0], [-1, 0]])
    certificate = analysis.check_isotonic_projection_cone(line)
    assert "not_generating" in certificate.warnings


def test_whole_space_passes():
    assert analysis.check_isotonic_projection_cone(PolyhedralCone(3)).verdict


def test_redundant_normals_are_ignored():
    # (1, 0, -1) is implied by the two chain normals
    K = PolyhedralCone.from_normals([[1, -1, 0], [0, 1, -1], [1, 0, -1]])
    assert analysis.check_isotonic_projection_cone(K).verdict


# =============================================================================
# PAIRWISE FORM
# =============================================================================


def test_pairwise_form():
    certificate = analysis.check_pairwise_form(cone_model.extremal_isotonic_cone(3))
    assert certificate.verdict
    assert certificate.witness.details["facets"] == 6
    assert certificate.witness.details["facet_bound"] == 6

    assert analysis.check_pairwise_form(cone_model.orthant_cone(3)).verdict

    line = PolyhedralCone.from_normals([[1, 0], [-1, 0]])
    certificate = analysis.check_pairwise_form(line)
    assert certificate.witness.kind == "not_generating"
    assert certificate.reverify(line)

    bad_sign = PolyhedralCone.from_normals([[-1, -1, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]])
    assert analysis.check_pairwise_form(bad_sign).witness.kind == "sign_pattern"


# =============================================================================
# GRAPH CRITERION
# =============================================================================


def test_graph_criterion_examples():
    fork = analysis.check_graph_isotonic_projection(graph(3, [[1, 2], [1, 3]]))
    assert not fork.verdict
    assert fork.witness.kind == "shared_tail"
    assert fork.to_dict()["witness"]["indices"] == [[1, 2], [1, 3]]
    assert fork.reverify(graph(3, [[1, 2], [1, 3]]))

    assert analysis.check_graph_isotonic_projection(graph(3, [[1, 2], [2, 3]])).verdict
    assert analysis.check_graph_isotonic_projection(graph(3, [])).verdict

    join = analysis.check_graph_isotonic_projection(graph(3, [[1, 2], [3, 2]]))
    assert join.witness.kind == "shared_head"


def test_graph_criterion_flags_redundant_edges():
    g = graph(3, [[1, 2], [2, 3], [1, 3]])
    certificate = analysis.check_graph_isotonic_projection(g)
    assert not certificate.verdict
    assert "not_transitively_reduced" in certificate.warnings
    cone = cone_model.build_isotonic_cone(g, WeightVector.unit(3))
    assert analysis.check_isotonic_projection_cone(cone).verdict


def test_transitive_reduction():
    g = graph(3, [[1, 2], [2, 3], [1, 3]])
    assert not analysis.is_transitively_reduced(g)
    reduced = analysis.transitive_reduction(g)
    assert reduced.edges == ((0, 1), (1, 2))
    assert analysis.is_transitively_reduced(reduced)
    with pytest.raises(InvalidInputError):
        analysis.transitive_reduction(graph(2, [[1, 2], [2, 1]]))


def test_decompose_graph():
    components = analysis.decompose_graph(graph(5, [[1, 2], [2, 3], [4, 5]]))
    assert [(c.vertices, c.label) for c in components] == [((0, 1, 2), "chain"), ((3, 4), "chain")]

    (component,) = analysis.decompose_graph(graph(3, [[1, 2], [3, 2]]))
    assert component.label == "non-chain"

    assert [c.label for c in analysis.decompose_graph(graph(3, []))] == ["isolated"] * 3

    (cycle,) = analysis.decompose_graph(graph(2, [[1, 2], [2, 1]]))
    assert cycle.label == "non-chain"
    assert "cyclic" in analysis.check_graph_isotonic_projection(graph(2, [[1, 2], [2, 1]])).warnings


def test_decomposition_matches_graph_verdict_on_acyclic_graphs():
    pairs = list(itertools.permutations(range(4), 2))
    rng = np.random.default_rng(2)
    for _ in range(60):
        edges = tuple(pair for pair in pairs if rng.random() < 0.25)
        g = ConstraintGraph(4, edges)
        if not analysis.is_transitively_reduced(g):
            continue
        try:
            analysis.transitive_reduction(g)
        except InvalidInputError:
            continue
        verdict = analysis.check_graph_isotonic_projection(g).verdict
        labels = {c.label for c in analysis.decompose_graph(g)}
        assert verdict == (labels <= {"chain", "isolated"})


@pytest.mark.parametrize("m", [5, 6])
def test_graph_and_cone_criteria_agree(m):
    rng = np.random.default_rng(m)
    checked = 0
    while checked < 25:
        order = rng.permutation(m)
        edges = tuple(
            (int(order[a]), int(order[b]))
            for a in range(m) for b in range(a + 1, m) if rng.random() < 0.3
        )
        g = analysis.transitive_reduction(ConstraintGraph(m, edges))
        weights = WeightVector(rng.uniform(0.1, 10.0, m))
        cone = cone_model.build_isotonic_cone(g, weights)
        assert (
            analysis.check_graph_isotonic_projection(g).verdict
            == analysis.check_isotonic_projection_cone(cone).verdict
        )
        checked += 1


# =============================================================================
# COUNTEREXAMPLE SEARCH
# =============================================================================


def test_counterexample_for_k2_is_sound():
    witness = analysis.find_isotonicity_counterexample(K2, "cone", trials=10_000, seed=42)
    assert witness is not None
    assert cone_model.leq_cone(K2, witness.u, witness.v, 1e-9)
    pu = solvers.project_exact(K2, witness.u).point
    pv = solvers.project_exact(K2, witness.v).point
    assert not cone_model.leq_cone(K2, pu, pv, 1e-9)
    assert witness.to_dict()["violated"] == witness.violated + 1


def test_no_counterexample_for_k1():
    assert analysis.find_isotonicity_counterexample(K1, "cone", trials=500, seed=1) is None


def test_no_orthant_counterexample_for_extremal_cone():
    K = cone_model.extremal_isotonic_cone(3)
    assert analysis.find_isotonicity_counterexample(K, "orthant", trials=500, seed=1) is None


def test_counterexample_search_is_deterministic():
    first = analysis.find_isotonicity_counterexample(K2, "cone", trials=10_000, seed=7)
    second = analysis.find_isotonicity_counterexample(K2, "cone", trials=10_000, seed=7)
    assert first.to_dict() == second.to_dict()


def test_counterexample_search_rejects_unknown_order():
    with pytest.raises(InvalidInputError):
        analysis.find_isotonicity_counterexample(K1, "lexicographic")


# =============================================================================
# REPORT
# =============================================================================


def test_analyze_cone_report():
    report = analysis.analyze_cone(K2)
    assert report["generating"]
    assert report["orthant_isotonic_form"]["verdict"]
    assert not report["isotonic_projection_cone"]["verdict"]
    assert report["orthant_subcone"] == {"verdict": True, "coordinate": None}
    assert "graph_check" not in report


def test_analyze_cone_with_graph():
    g = graph(3, [[1, 2], [1, 3]])
    report = analysis.analyze_cone(cone_model.build_isotonic_cone(g, WeightVector.unit(3)), g)
    assert not report["graph_check"]["verdict"]
    assert not report["isotonic_projection_cone"]["verdict"]
    assert [c["label"] for c in report["components"]] == ["non-chain"]
    assert report["orthant_subcone"]["verdict"] is False


def test_analyze_whole_space():
    report = analysis.analyze_cone(PolyhedralCone(2))
    assert report["orthant_isotonic_form"]["verdict"]
    assert report["isotonic_projection_cone"]["verdict"]
    assert report["pairwise_form"] is None
