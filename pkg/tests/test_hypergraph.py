import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypergrowth.errors import InvalidArgument
from hypergrowth.hypergraph import Hypergraph, canonical_key, read_edges


def graph_with(n, t=0.0):
    g = Hypergraph()
    for i in range(n):
        g.add_node(t, 0.0, 0)
    return g


def test_add_node_dense_ids():
    g = Hypergraph()
    assert g.add_node(0.5, 0.3, 1) == 0
    assert g.node(0).hyperdegree == 0
    assert g.add_node(0.5, 0.3, 1) == 1
    assert g.node(1).attractiveness == 0.3


def test_add_node_rejects_negative_attractiveness():
    with pytest.raises(InvalidArgument):
        Hypergraph().add_node(0.5, -0.1, 1)


def test_add_node_rejects_time_going_backwards_across_batches():
    g = Hypergraph()
    g.add_node(1.0, 0.0, 1)
    with pytest.raises(InvalidArgument):
        g.add_node(0.5, 0.0, 2)
    with pytest.raises(InvalidArgument):
        g.add_node(1.0, 0.0, 2)  # later batch must be strictly later
    g.add_node(1.5, 0.0, 2)


def test_add_hyperedge_counts_and_duplicates():
    g = graph_with(4)
    assert g.add_hyperedge({0, 1, 2}, 0.0) == 0
    assert list(g.hyperdegrees[:3]) == [1, 1, 1]
    assert g.add_hyperedge([2, 1, 0], 0.0) is None
    assert list(g.hyperdegrees) == [1, 1, 1, 0]
    assert g.n_edges == 1
    assert g.add_hyperedge({0, 1, 3}, 0.0) == 1
    assert g.node(0).hyperdegree == 2
    assert g.node(3).hyperdegree == 1


def test_add_hyperedge_unknown_node():
    g = graph_with(2)
    with pytest.raises(InvalidArgument):
        g.add_hyperedge({0, 5}, 0.0)
    with pytest.raises(InvalidArgument):
        g.add_hyperedge(set(), 0.0)
    assert g.n_edges == 0


def test_hyperdegree_sequence():
    g = graph_with(3)
    g.add_hyperedge({0, 1}, 0.0)
    g.add_hyperedge({0, 2}, 0.0)
    assert g.hyperdegree_sequence() == [(0, 2), (1, 1), (2, 1)]
    assert Hypergraph().hyperdegree_sequence() == []


def test_capacity_growth_keeps_data():
    g = Hypergraph(capacity=16)
    for i in range(100):
        g.add_node(float(i), i / 100, i)
    assert g.n_nodes == 100
    assert g.node(99).arrival_time == 99.0
    assert g.node(57).attractiveness == pytest.approx(0.57)


def test_exports_roundtrip():
    g = graph_with(4)
    g.add_hyperedge({3, 1}, 0.0)
    g.add_hyperedge({0, 1, 2}, 0.0)
    buf = io.StringIO()
    g.write_edges(buf)
    assert buf.getvalue() == "0\t1,3\n1\t0,1,2\n"
    assert read_edges(io.StringIO(buf.getvalue())) == [(0, (1, 3)), (1, (0, 1, 2))]
    bip = io.StringIO()
    g.write_bipartite(bip)
    assert bip.getvalue().splitlines() == ["E0\tv1", "E0\tv3", "E1\tv0", "E1\tv1", "E1\tv2"]


edge_lists = st.lists(st.sets(st.integers(0, 29), min_size=1, max_size=6), max_size=80)


@settings(max_examples=200, deadline=None)
@given(edge_lists)
def test_incremental_hyperdegrees_match_recount(edges):
    g = graph_with(30)
    before = g.hyperdegrees.copy()
    for e in edges:
        g.add_hyperedge(e, 0.0)
        assert (g.hyperdegrees >= before).all()
        before = g.hyperdegrees.copy()
    assert (g.recount_hyperdegrees() == g.hyperdegrees).all()
    assert int(g.hyperdegrees.sum()) == sum(len(e.members) for e in g.edges)
    keys = [e.members for e in g.edges]
    assert len(keys) == len(set(keys)) == len({canonical_key(e) for e in edges})
    assert all(list(k) == sorted(k) for k in keys)
