"""Ensemble generation, Pearson correlation, and the metric report."""

import math

import pytest

from netcomplexity.graph import SamplingPolicy, average_degree, average_path_length, \
    clustering_coefficient, is_connected
from netcomplexity.complexity import functional_complexity
from netcomplexity.harness import (
    EnsembleSpec,
    correlation_report,
    default_ensemble,
    generate_ensemble,
    pearson,
)


def er_spec(**overrides):
    base = dict(
        kind="erdos-renyi",
        node_count=10,
        graph_count=5,
        seed=3,
        edge_probability=0.4,
    )
    base.update(overrides)
    return EnsembleSpec(**base)


# ---------------------------------------------------------------------------
# ensemble specs


def test_spec_validation():
    with pytest.raises(ValueError):
        er_spec(kind="configuration-model")
    with pytest.raises(ValueError):
        er_spec(node_count=1)
    with pytest.raises(ValueError):
        er_spec(graph_count=-1)
    with pytest.raises(ValueError):
        er_spec(edge_probability=None)
    with pytest.raises(ValueError):
        er_spec(edge_probability=1.2)
    with pytest.raises(ValueError):
        EnsembleSpec(kind="watts-strogatz", node_count=8, graph_count=1,
                     rewiring_probability=0.1)  # ring_degree missing
    with pytest.raises(ValueError):
        EnsembleSpec(kind="watts-strogatz", node_count=8, graph_count=1,
                     ring_degree=8, rewiring_probability=0.1)
    with pytest.raises(ValueError):
        EnsembleSpec(kind="barabasi-albert", node_count=8, graph_count=1,
                     attachment_count=0)


def test_complete_graphs_from_full_probability():
    graphs = generate_ensemble(er_spec(edge_probability=1.0, graph_count=3))
    for g in graphs:
        assert g.node_count == 10
        assert len(g.edges) == math.comb(10, 2)


def test_ensemble_is_reproducible():
    a = generate_ensemble(er_spec())
    b = generate_ensemble(er_spec())
    assert [g.edges for g in a] == [g.edges for g in b]
    c = generate_ensemble(er_spec(seed=4))
    assert [g.edges for g in a] != [g.edges for g in c]


def test_graphs_within_ensemble_differ():
    graphs = generate_ensemble(er_spec(graph_count=6))
    assert len({g.edges for g in graphs}) > 1


def test_connectivity_filter_unsatisfiable():
    with pytest.raises(ValueError, match="connectivity filter"):
        generate_ensemble(er_spec(edge_probability=0.0, graph_count=1))
    # without the filter, empty graphs are legitimate output
    graphs = generate_ensemble(
        er_spec(edge_probability=0.0, graph_count=2, connected_only=False)
    )
    assert all(g.edges == () for g in graphs)


def test_connectivity_filter_holds():
    graphs = generate_ensemble(er_spec(edge_probability=0.25, graph_count=12))
    assert all(is_connected(g) for g in graphs)


def test_other_ensemble_kinds():
    ws = generate_ensemble(EnsembleSpec(
        kind="watts-strogatz", node_count=12, graph_count=3, seed=1,
        ring_degree=4, rewiring_probability=0.2,
    ))
    ba = generate_ensemble(EnsembleSpec(
        kind="barabasi-albert", node_count=12, graph_count=3, seed=1,
        attachment_count=2,
    ))
    for g in ws + ba:
        assert g.node_count == 12
        assert is_connected(g)
    assert ws[0].edges != ba[0].edges


# ---------------------------------------------------------------------------
# pearson


def test_pearson_anchors():
    assert pearson([1, 2, 3], [2, 4, 6]) == 1.0
    assert pearson([1, 2, 3], [3, 2, 1]) == -1.0
    assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)


def test_pearson_rejections():
    with pytest.raises(ValueError, match="zero variance"):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError, match="zero variance"):
        pearson([1, 2, 3], [5, 5, 5])
    with pytest.raises(ValueError, match="length"):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(ValueError, match="2 points"):
        pearson([1], [2])


def test_pearson_symmetry_and_affine_invariance():
    xs = [1.0, 2.0, 4.0, 8.0, 3.0]
    ys = [2.0, 1.0, 5.0, 4.0, 9.0]
    base = pearson(xs, ys)
    assert pearson(ys, xs) == base
    # power-of-two scalings commute with rounding, so equality is exact
    assert pearson([4.0 * x for x in xs], ys) == base
    assert pearson([-0.5 * x for x in xs], ys) == -base
    for a, b in ((3.0, 1.0), (-2.5, 4.0), (0.1, -7.0)):
        got = pearson([a * x + b for x in xs], ys)
        want = math.copysign(base, a) if a < 0 else base
        assert got == pytest.approx(want, abs=1e-12)


def test_pearson_stays_in_range():
    xs = list(range(50))
    ys = [x * 1e-8 + 1e8 for x in xs]  # catastrophic-cancellation bait
    assert -1.0 <= pearson(xs, ys) <= 1.0


# ---------------------------------------------------------------------------
# correlation report


def test_report_rows_match_direct_recomputation():
    spec = er_spec(graph_count=4)
    report = correlation_report(spec)
    graphs = generate_ensemble(spec)
    assert len(report.rows) == 4
    for row, g in zip(report.rows, graphs):
        assert row.complexity == functional_complexity(g).complexity
        assert row.average_path_length == average_path_length(g)
        assert row.average_degree == average_degree(g)
        assert row.clustering_coefficient == clustering_coefficient(g)
        assert row.complexity >= 0.0


def test_report_emits_three_correlations():
    report = correlation_report(default_ensemble(graph_count=12))
    metrics = [c.metric for c in report.correlations]
    assert metrics == [
        "average_path_length", "average_degree", "clustering_coefficient",
    ]
    for c in report.correlations:
        assert c.rho is not None and -1.0 <= c.rho <= 1.0 and c.note == ""


def test_complete_graph_ensemble_reports_degenerate():
    spec = er_spec(node_count=6, edge_probability=1.0, graph_count=4)
    report = correlation_report(spec)
    for c in report.correlations:
        assert c.rho is None
        assert "zero variance" in c.note
    assert report.flags == ()


def test_single_graph_report_rejected():
    with pytest.raises(ValueError, match=">= 2 graphs"):
        correlation_report(er_spec(graph_count=1))
    with pytest.raises(ValueError, match=">= 2 graphs"):
        correlation_report(er_spec(graph_count=0))


def test_report_is_deterministic():
    a = correlation_report(default_ensemble(graph_count=8))
    b = correlation_report(default_ensemble(graph_count=8))
    assert a.rows == b.rows
    assert a.correlations == b.correlations
    assert a.flags == b.flags


def test_report_independent_of_mapper():
    def eager_map(fn, items):
        return [fn(item) for item in list(items)]

    spec = er_spec(graph_count=5)
    assert correlation_report(spec) == correlation_report(spec, mapper=eager_map)


def test_report_respects_policy():
    spec = er_spec(graph_count=3)
    sampled = correlation_report(
        spec, policy=SamplingPolicy(mode="uniform-sample", sample_count=200)
    )
    exact = correlation_report(spec)
    assert sampled.policy.mode == "uniform-sample"
    assert [r.graph_id for r in sampled.rows] == [r.graph_id for r in exact.rows]
    # classical metrics are policy-independent
    for a, b in zip(sampled.rows, exact.rows):
        assert a.average_degree == b.average_degree
