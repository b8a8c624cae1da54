import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from hypergrowth.attachment import (
    AgeBucketed,
    ExactScan,
    Fenwick,
    _exact_draw,
    exact_weights,
    form_batch_edges,
    make_sampler,
    select_targets,
    weight,
)
from hypergrowth.engine import ModelParams, Simulation, TargetNodeCount
from hypergrowth.errors import EdgeCollisionExhausted, InfeasibleSelection, InvalidArgument
from hypergrowth.hypergraph import Hypergraph, NodeRecord

SAMPLERS = [ExactScan, AgeBucketed]


def rec(k, y, t):
    return NodeRecord(0, t, y, k, 1)


def test_weight_examples():
    assert weight(rec(2, 0.5, 0.0), 4.0, 0.5) == pytest.approx(1.25)
    assert weight(rec(2, 0.5, 0.0), 4.0, 0.0) == 2.5
    assert weight(rec(2, 0.5, 0.0), 1000.0, 0.0) == 2.5
    for alpha in (0.0, 0.3, 1.0, 2.5):
        assert weight(rec(3, 0.0, 2.0), 3.0, alpha) == 3.0


def test_weight_requires_positive_age():
    with pytest.raises(InvalidArgument):
        weight(rec(1, 0.0, 2.0), 2.0, 0.5)
    with pytest.raises(InvalidArgument):
        weight(rec(1, 0.0, 2.0), 1.0, 0.5)


def two_node_graph():
    """Node 0: k=2, y=0.5, age 4; node 1: k=3, y=0, age 1 at now=4 (weights 1.25 and 3)."""
    g = Hypergraph()
    g.add_node(0.0, 0.5, 1)
    g.add_node(3.0, 0.0, 2)
    g.add_node(5.0, 0.0, 3)  # not yet born at now=4
    for e in ({0}, {0, 1}, {1}, {1, 2}):
        g.add_hyperedge(e, 0.0)
    return g


@pytest.mark.parametrize("sampler", SAMPLERS)
def test_two_node_selection_frequency(sampler):
    g = two_node_graph()
    draws = sampler().draw_single(g, 4.0, 0.5, np.random.default_rng(1), 1_000_000)
    assert set(np.unique(draws)) == {0, 1}
    assert (draws == 1).mean() == pytest.approx(3 / 4.25, abs=0.002)


@pytest.mark.parametrize("sampler", SAMPLERS)
def test_two_node_select_targets(sampler):
    g = two_node_graph()
    s = sampler()
    rng = np.random.default_rng(2)
    n = 20_000
    hits = sum(select_targets(g, 4.0, 1, 0.5, rng, strategy=s)[0] == 1 for _ in range(n))
    p = 3 / 4.25
    assert abs(hits / n - p) < 4 * np.sqrt(p * (1 - p) / n)


@pytest.mark.parametrize("sampler", SAMPLERS)
def test_exhaustion_picks_everyone(sampler):
    g = two_node_graph()
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert sorted(select_targets(g, 4.0, 2, 0.5, rng, strategy=sampler())) == [0, 1]
    with pytest.raises(InfeasibleSelection):
        select_targets(g, 4.0, 3, 0.5, rng, strategy=sampler())


def equal_weight_graph(n=4):
    g = Hypergraph()
    for i in range(n):
        g.add_node(0.0, 1.0, 0)
    return g


@pytest.mark.parametrize("sampler", SAMPLERS)
def test_equal_weights_pair_frequencies(sampler):
    g = equal_weight_graph()
    s = sampler()
    rng = np.random.default_rng(3)
    n = 120_000
    counts = Counter(tuple(sorted(select_targets(g, 1.0, 2, 0.5, rng, strategy=s))) for _ in range(n))
    assert len(counts) == 6
    for c in counts.values():
        assert c / n == pytest.approx(1 / 6, abs=0.005)


def sequential_pair_law(w):
    """Enumeration oracle: unordered-pair law of two draws without replacement."""
    w = np.asarray(w, float)
    W = w.sum()
    law = Counter()
    for i, j in itertools.permutations(range(len(w)), 2):
        law[tuple(sorted((i, j)))] += w[i] / W * w[j] / (W - w[i])
    return law


@pytest.mark.parametrize("sampler", SAMPLERS)
def test_without_replacement_matches_enumeration(sampler):
    g = Hypergraph()
    ys = [0.1, 0.4, 2.0, 5.0]
    for i, y in enumerate(ys):
        g.add_node(float(i), y, i)
    now = 10.0
    w = exact_weights(g, now, 0.7)
    law = sequential_pair_law(w)
    rng = np.random.default_rng(4)
    n = 60_000
    s = sampler()
    counts = Counter(tuple(sorted(select_targets(g, now, 2, 0.7, rng, strategy=s))) for _ in range(n))
    keys = sorted(law)
    obs = [counts[k] for k in keys]
    exp = [law[k] * n for k in keys]
    assert chisquare(obs, exp).pvalue > 1e-4


@pytest.mark.parametrize("sampler", SAMPLERS)
def test_excluded_nodes_never_chosen(sampler):
    g = equal_weight_graph(6)
    rng = np.random.default_rng(5)
    s = sampler()
    for _ in range(500):
        chosen = select_targets(g, 1.0, 3, 0.5, rng, excluded={0, 2}, strategy=s)
        assert not {0, 2} & set(chosen)
        assert len(set(chosen)) == 3
    with pytest.raises(InfeasibleSelection):
        select_targets(g, 1.0, 5, 0.5, rng, excluded={0, 2}, strategy=s)


@pytest.fixture(scope="module")
def grown():
    sim = Simulation(ModelParams(stop=TargetNodeCount(1000))).run()
    return sim.graph, sim.clock.current_time + 1.0


@pytest.mark.parametrize("alpha", [0.0, 0.5, 0.9])
def test_bucketed_matches_exact_probabilities(grown, alpha):
    g, now = grown
    p = exact_weights(g, now, alpha)
    p /= p.sum()
    n = 200_000
    draws = AgeBucketed().draw_single(g, now, alpha, np.random.default_rng(6), n)
    obs = np.bincount(draws, minlength=len(p))
    # pool the rarest cells so every expected count is >= 5
    order = np.argsort(p)
    exp = p[order] * n
    obs = obs[order]
    cut = np.searchsorted(np.cumsum(exp), 5.0) + 1
    obs = np.concatenate([[obs[:cut].sum()], obs[cut:]])
    exp = np.concatenate([[exp[:cut].sum()], exp[cut:]])
    assert chisquare(obs, exp).pvalue > 1e-4


def test_alpha_zero_is_attractiveness_preferential(grown):
    g, now = grown
    w = exact_weights(g, now, 0.0)
    assert np.allclose(w, g.hyperdegrees + g.attractiveness)


def test_scale_invariance_of_draw():
    rng_w = np.random.default_rng(0)
    w = rng_w.random(50) + 0.01
    for c in (0.25, 8.0, 1024.0):
        a = [_exact_draw(w, np.random.default_rng(s)) for s in range(200)]
        b = [_exact_draw(c * w, np.random.default_rng(s)) for s in range(200)]
        assert a == b


def test_form_batch_edges_single_edge():
    sim = Simulation(ModelParams(stop=TargetNodeCount(20), m=1, m2=6, m0=20))
    g = sim.graph
    new = tuple(g.add_node(0.5, 0.2, 1) for _ in range(3))
    edges = form_batch_edges(g, 0.5, new, 1, 6, 0.5, np.random.default_rng(0))
    assert len(edges) == 1
    assert set(new) <= set(edges[0]) and len(edges[0]) == 9
    g.add_hyperedge(edges[0], 0.5)
    assert all(g.node(v).hyperdegree == 1 for v in new)


def test_form_batch_edges_pigeonhole_collision():
    g = Hypergraph()
    for i in range(3):
        g.add_node(-1.0 - i * 0.0, 0.5, 0)
    new = (g.add_node(1.0, 0.5, 1),)
    with pytest.raises(EdgeCollisionExhausted):
        form_batch_edges(g, 1.0, new, 2, 3, 0.5, np.random.default_rng(0), retry_cap=50)


@pytest.mark.parametrize("sampler", SAMPLERS)
def test_form_batch_edges_two_distinct_edges(grown, sampler):
    g0, now = grown
    g = Hypergraph()
    for node in g0.nodes:
        g.add_node(node.arrival_time, node.attractiveness, node.batch_index)
    for e in g0.edges:
        g.add_hyperedge(e.members, e.created_at)
    b = int(g.batch_indices[-1]) + 1
    new = tuple(g.add_node(now, 0.3, b) for _ in range(2))
    edges = form_batch_edges(g, now, new, 2, 6, 0.5, np.random.default_rng(1), sampler())
    assert len(edges) == 2 and edges[0] != edges[1]
    for e in edges:
        assert set(new) <= set(e) and len(e) == 8
        assert not g.has_edge(e)


def test_make_sampler():
    assert isinstance(make_sampler("exact"), ExactScan)
    assert make_sampler("bucketed", 3.0).ratio == 3.0
    with pytest.raises(InvalidArgument):
        make_sampler("alias")
    with pytest.raises(InvalidArgument):
        AgeBucketed(ratio=1.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 100.0), min_size=1, max_size=60), st.data())
def test_fenwick_against_naive(values, data):
    t = Fenwick()
    vals = []
    for v in values:
        t.append(v)
        vals.append(v)
    for _ in range(10):
        i = data.draw(st.integers(0, len(vals) - 1))
        d = data.draw(st.floats(0.0, 10.0))
        t.add(i, d)
        vals[i] += d
    pref = np.concatenate([[0.0], np.cumsum(vals)])
    for i in range(len(vals) + 1):
        assert t.prefix(i) == pytest.approx(pref[i], rel=1e-9, abs=1e-9)
    total = pref[-1]
    if total > 0:
        u = data.draw(st.floats(0.0, 1.0, exclude_max=True)) * total
        j = t.search(u)
        # j is the first index whose inclusive prefix exceeds u (up to round-off)
        assert pref[j] <= u + 1e-9 * max(1.0, total)
        if j < len(vals):
            assert pref[j + 1] >= u - 1e-9 * max(1.0, total)


def test_bucketed_index_tracks_growth():
    sim = Simulation(ModelParams(stop=TargetNodeCount(3000), sampler="bucketed")).run()
    s = sim.sampler
    s._sync(sim.graph)
    g = sim.graph
    base = g.hyperdegrees + g.attractiveness
    vals = np.array([s._tree.prefix(i + 1) - s._tree.prefix(i) for i in range(g.n_nodes)])
    assert np.allclose(vals, base, atol=1e-8)
