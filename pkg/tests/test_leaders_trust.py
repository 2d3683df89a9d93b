"""Tests for trust-channel computation, centralities, and hop-decay weights."""

import itertools
import math

import numpy as np
import numpy.testing as npt
import pytest

from wavecast.leaders import (
    EmptyGraph,
    NodeAttributes,
    SocialGraph,
    TrustModel,
    assign_weights,
    betweenness_centrality,
    build_trust_graph,
    closeness_centrality,
    clustering_coefficients,
    compute_centralities,
    connected_components,
    degree_centrality,
    direct_trust,
    eigenvector_centrality,
    indirect_trust,
    recommended_trust,
)


def plain_nodes(ids, valence=1.0):
    return {i: NodeAttributes(0.6, 0.6, 0.6, valence) for i in ids}


def adjacency_from_edges(n, edges):
    a = np.zeros((n, n))
    for i, j in edges:
        a[i, j] = a[j, i] = 1.0
    return a


def brute_force_betweenness(adjacency):
    """Betweenness by explicit enumeration of all shortest paths."""
    n = adjacency.shape[0]
    paths = {}  # (s, t) -> list of shortest paths as node tuples
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            best = None
            found = []
            frontier = [(s,)]
            while frontier and best is None or frontier and len(frontier[0]) <= best:
                path = frontier.pop(0)
                if path[-1] == t:
                    if best is None:
                        best = len(path)
                    if len(path) == best:
                        found.append(path)
                    continue
                if best is not None and len(path) >= best:
                    continue
                for w in np.flatnonzero(adjacency[path[-1]]):
                    if w not in path:
                        frontier.append(path + (int(w),))
            paths[(s, t)] = found
    bc = np.zeros(n)
    for v in range(n):
        for s, t in itertools.combinations(range(n), 2):
            if v in (s, t):
                continue
            all_paths = paths[(s, t)]
            if not all_paths:
                continue
            through = sum(1 for p in all_paths if v in p[1:-1])
            bc[v] += through / len(all_paths)
    if n > 2:
        bc /= (n - 1) * (n - 2) / 2.0
    return bc


# --------------------------------------------------------------------- graph

class TestSocialGraph:
    def test_from_edges_sorts_ids_and_places_counts(self):
        g = SocialGraph.from_edges(plain_nodes(["b", "a"]), [("b", "a", 3)])
        assert g.node_ids == ("a", "b")
        assert g.counts[g.index_of("b"), g.index_of("a")] == 3.0
        assert g.counts[g.index_of("a"), g.index_of("b")] == 0.0

    def test_isolated_nodes_are_allowed(self):
        g = SocialGraph.from_edges(plain_nodes(["a", "b", "c"]), [("a", "b", 1)])
        assert g.num_nodes == 3

    def test_duplicate_arc_rejected(self):
        with pytest.raises(ValueError):
            SocialGraph.from_edges(plain_nodes(["a", "b"]),
                                   [("a", "b", 1), ("a", "b", 2)])

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            SocialGraph.from_edges(plain_nodes(["a", "b"]), [("a", "a", 1)])

    def test_unknown_node_rejected(self):
        with pytest.raises(ValueError):
            SocialGraph.from_edges(plain_nodes(["a", "b"]), [("a", "z", 1)])

    def test_reputation_is_mean_of_traits(self):
        attrs = NodeAttributes(goodwill=0.9, power=0.6, uprightness=0.3, valence=0.0)
        npt.assert_allclose(attrs.reputation, 0.6)

    def test_attribute_bounds_enforced(self):
        with pytest.raises(ValueError):
            NodeAttributes(goodwill=1.5)
        with pytest.raises(ValueError):
            NodeAttributes(valence=-2.0)

    def test_empty_graph_rejected(self):
        with pytest.raises(EmptyGraph):
            SocialGraph(node_ids=(), attributes={}, counts=np.zeros((0, 0)))


# ------------------------------------------------------------ trust channels

class TestDirectTrust:
    def test_single_arc_normalizes_to_one(self):
        g = SocialGraph.from_edges(plain_nodes(["a", "b"]), [("a", "b", 7)])
        dt = direct_trust(g.counts)
        assert dt[0, 1] == 1.0
        assert dt[1, 0] == 0.0

    def test_rows_normalized_by_busiest_arc(self):
        counts = np.array([[0.0, 2.0, 8.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        dt = direct_trust(counts)
        npt.assert_allclose(dt[0], [0.0, 0.25, 1.0])
        npt.assert_allclose(dt[1], 0.0)


class TestIndirectTrust:
    def test_single_intermediary_max_min(self):
        # a trusts b at 1, b trusts c at 0.4 -> best a..c chain carries 0.4
        dt = np.array([
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 0.4],
            [0.0, 0.0, 0.0],
        ])
        idt = indirect_trust(dt)
        npt.assert_allclose(idt[0, 2], 0.4)
        assert idt[0, 1] == 0.0  # no intermediary exists
        assert idt[2, 0] == 0.0

    def test_no_path_means_zero(self):
        g = SocialGraph.from_edges(plain_nodes(["a", "b", "c"]), [("a", "b", 1)])
        idt = indirect_trust(direct_trust(g.counts))
        npt.assert_array_equal(idt, np.zeros((3, 3)))

    def test_picks_the_strongest_intermediary(self):
        dt = np.array([
            [0.0, 1.0, 0.5, 0.0],
            [0.0, 0.0, 0.0, 0.3],
            [0.0, 0.0, 0.0, 0.9],
            [0.0, 0.0, 0.0, 0.0],
        ])
        idt = indirect_trust(dt)
        # via b carries min(1, .3) = .3; via c carries min(.5, .9) = .5
        npt.assert_allclose(idt[0, 3], 0.5)


class TestRecommendedTrust:
    def test_weighted_mean_of_qualifying_recommenders(self):
        dt = np.array([
            [0.0, 0.0, 0.9],
            [0.0, 0.0, 0.6],
            [0.0, 0.0, 0.0],
        ])
        reputations = np.array([0.9, 0.3, 0.5])
        rt = recommended_trust(dt, reputations, threshold=0.5)
        # recommenders of c visible to... nobody else: x must differ from z
        expected_b_to_c = 0.9 * 0.9 / 0.9      # only a qualifies (z != b)
        expected_a_to_c = 0.3 * 0.6 / 0.3      # only b qualifies (z != a)
        npt.assert_allclose(rt[1, 2], expected_b_to_c)
        npt.assert_allclose(rt[0, 2], expected_a_to_c)

    def test_recommender_below_threshold_is_ignored(self):
        dt = np.array([
            [0.0, 0.0, 0.4],
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
        ])
        rt = recommended_trust(dt, np.full(3, 0.6), threshold=0.5)
        npt.assert_array_equal(rt, np.zeros((3, 3)))

    def test_value_is_independent_of_the_asker(self):
        # the formula only looks at the target's endorsers, so any two askers
        # outside the recommender set read the same value
        rng = np.random.default_rng(3)
        dt = rng.uniform(0.0, 1.0, size=(5, 5))
        np.fill_diagonal(dt, 0.0)
        reputations = rng.uniform(0.2, 1.0, size=5)
        rt = recommended_trust(dt, reputations, threshold=0.5)
        y = 4
        qualifying = [z for z in range(5) if dt[z, y] >= 0.5]
        askers = [x for x in range(5) if x != y and x not in qualifying]
        values = {round(rt[x, y], 12) for x in askers}
        assert len(values) <= 1


class TestBuildTrustGraph:
    def make_probe(self):
        """Three nodes: a endorses c strongly, barely speaks to b."""
        return SocialGraph.from_edges(
            plain_nodes(["a", "b", "c"]), [("a", "b", 1), ("a", "c", 10)])

    def test_hand_enumerated_edges(self):
        result = build_trust_graph(self.make_probe(), TrustModel())
        # {a,c}: direct 1.0; {b,c}: recommended 1.0 (a endorses c);
        # {a,b}: direct .1, indirect 0, recommended 0 -> no edge
        assert result.adjacency[0, 2] and result.adjacency[2, 0]
        assert result.adjacency[1, 2] and result.adjacency[2, 1]
        assert not result.adjacency[0, 1] and not result.adjacency[1, 0]

    def test_hand_computed_composite_matrix(self):
        result = build_trust_graph(self.make_probe(), TrustModel())
        # w_d*(dt+dt')/2 + w_i*(idt+idt')/2 + w_r*(r_x+r_y)/2 with r = 0.6
        expected = np.array([
            [0.0, 0.145, 0.37],
            [0.145, 0.0, 0.12],
            [0.37, 0.12, 0.0],
        ])
        npt.assert_allclose(result.composite, expected, atol=1e-12)

    def test_uniform_chain_connects_every_pair(self):
        # bidirectional uniform counts normalize to direct trust 1 along the
        # chain; one-intermediary indirect trust then bridges two-hop pairs and
        # every endorsed node is recommended to all others, so the minimal
        # thresholds connect all pairs
        edges = []
        for a, b in (("a", "b"), ("b", "c"), ("c", "d")):
            edges.append((a, b, 2))
            edges.append((b, a, 2))
        g = SocialGraph.from_edges(plain_nodes(["a", "b", "c", "d"]), edges)
        result = build_trust_graph(g, TrustModel(k=0.5, l=0.5, s=0.5))
        expected = np.ones((4, 4), dtype=bool) & ~np.eye(4, dtype=bool)
        npt.assert_array_equal(result.adjacency, expected)

    def test_adjacency_is_symmetric_with_zero_diagonal(self):
        rng = np.random.default_rng(11)
        ids = [f"n{k}" for k in range(6)]
        edges = []
        for i in ids:
            for j in ids:
                if i != j and rng.uniform() < 0.4:
                    edges.append((i, j, int(rng.integers(1, 10))))
        g = SocialGraph.from_edges(plain_nodes(ids), edges)
        result = build_trust_graph(g)
        npt.assert_array_equal(result.adjacency, result.adjacency.T)
        assert not result.adjacency.diagonal().any()
        npt.assert_allclose(result.composite, result.composite.T, atol=1e-15)

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            TrustModel(k=0.4)
        with pytest.raises(ValueError):
            TrustModel(s=1.0)
        with pytest.raises(ValueError):
            TrustModel(w_d=0.5, w_i=0.5, w_r=0.5)

    def test_trust_edges_lists_unordered_pairs(self):
        result = build_trust_graph(self.make_probe(), TrustModel())
        assert result.trust_edges() == [("a", "c"), ("b", "c")]


# -------------------------------------------------------------- centralities

class TestCentralityClosedForms:
    def test_star_of_five(self):
        a = adjacency_from_edges(5, [(0, k) for k in range(1, 5)])
        c = compute_centralities(a, tuple("cdefg"))
        npt.assert_allclose(c.degree, [1.0, 0.25, 0.25, 0.25, 0.25])
        # leaf distances: 1 to the hub, 2 to each of the three other leaves
        npt.assert_allclose(c.closeness, [1.0] + [4.0 / 7.0] * 4)
        npt.assert_allclose(c.betweenness, [1.0, 0.0, 0.0, 0.0, 0.0], atol=1e-12)
        npt.assert_allclose(c.eigenvector, [1.0, 0.5, 0.5, 0.5, 0.5], atol=1e-8)
        npt.assert_allclose(c.clustering, 0.0)

    def test_triangle(self):
        a = adjacency_from_edges(3, [(0, 1), (1, 2), (0, 2)])
        c = compute_centralities(a, ("x", "y", "z"))
        npt.assert_allclose(c.degree, 1.0)
        npt.assert_allclose(c.closeness, 1.0)
        npt.assert_allclose(c.betweenness, 0.0)
        npt.assert_allclose(c.eigenvector, 1.0, atol=1e-8)
        npt.assert_allclose(c.clustering, 1.0)

    def test_path_of_three(self):
        a = adjacency_from_edges(3, [(0, 1), (1, 2)])
        c = compute_centralities(a, ("a", "b", "c"))
        npt.assert_allclose(c.degree, [0.5, 1.0, 0.5])
        npt.assert_allclose(c.closeness, [2.0 / 3.0, 1.0, 2.0 / 3.0])
        npt.assert_allclose(c.betweenness, [0.0, 1.0, 0.0])
        # leading eigenvector of the path is (1, sqrt 2, 1), max-scaled
        npt.assert_allclose(c.eigenvector, [1.0 / math.sqrt(2.0), 1.0, 1.0 / math.sqrt(2.0)],
                            atol=1e-8)

    def test_four_cycle_is_fully_symmetric(self):
        a = adjacency_from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        c = compute_centralities(a, tuple("abcd"))
        npt.assert_allclose(c.degree, 2.0 / 3.0)
        npt.assert_allclose(c.closeness, 3.0 / 4.0)
        npt.assert_allclose(c.betweenness, 1.0 / 6.0, atol=1e-12)
        npt.assert_allclose(c.eigenvector, 1.0, atol=1e-8)
        npt.assert_allclose(c.clustering, 0.0)

    def test_complete_graph(self):
        a = adjacency_from_edges(4, list(itertools.combinations(range(4), 2)))
        c = compute_centralities(a, tuple("abcd"))
        npt.assert_allclose(c.degree, 1.0)
        npt.assert_allclose(c.closeness, 1.0)
        npt.assert_allclose(c.betweenness, 0.0)
        npt.assert_allclose(c.eigenvector, 1.0, atol=1e-8)
        npt.assert_allclose(c.clustering, 1.0)


class TestBetweennessOracle:
    def test_matches_path_enumeration_on_seeded_graphs(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            n = int(rng.integers(4, 8))
            edges = [(i, j) for i, j in itertools.combinations(range(n), 2)
                     if rng.uniform() < 0.45]
            a = adjacency_from_edges(n, edges)
            npt.assert_allclose(betweenness_centrality(a),
                                brute_force_betweenness(a), atol=1e-12)


class TestDisconnectedGraphs:
    def test_components_are_found(self):
        a = adjacency_from_edges(5, [(0, 1), (2, 3)])
        comps = connected_components(a)
        assert sorted(sorted(c) for c in comps) == [[0, 1], [2, 3], [4]]

    def test_closeness_is_scoped_to_components(self):
        a = adjacency_from_edges(5, [(0, 1), (2, 3), (3, 4)])
        cc = closeness_centrality(a)
        npt.assert_allclose(cc[:2], 1.0)            # dyad: distance 1
        npt.assert_allclose(cc[3], 1.0)             # path center
        npt.assert_allclose(cc[2], 2.0 / 3.0)
        npt.assert_allclose(cc[4], 2.0 / 3.0)

    def test_isolated_nodes_score_zero_everywhere(self):
        a = adjacency_from_edges(4, [(0, 1)])
        assert degree_centrality(a)[2] == 0.0
        assert closeness_centrality(a)[2] == 0.0
        assert betweenness_centrality(a)[2] == 0.0
        assert eigenvector_centrality(a)[2] == 0.0
        assert clustering_coefficients(a)[2] == 0.0

    def test_eigenvector_handles_disconnection_deterministically(self):
        a = adjacency_from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4)])
        ec = eigenvector_centrality(a)
        assert ec.max() == 1.0
        npt.assert_allclose(ec[:3], 1.0, atol=1e-8)  # the triangle dominates
        assert ec[5] == 0.0


# ------------------------------------------------------------------- weights

class TestAssignWeights:
    def chain_graph(self, valences):
        ids = [f"n{k}" for k in range(len(valences))]
        nodes = {i: NodeAttributes(0.5, 0.5, 0.5, v) for i, v in zip(ids, valences)}
        edges = []
        for a, b in zip(ids, ids[1:]):
            edges.append((a, b, 1))
        return SocialGraph.from_edges(nodes, edges), ids

    def test_exponential_decay_along_a_chain(self):
        g, ids = self.chain_graph([1.0] * 5)
        w = assign_weights(g, [ids[0]], decay_kappa=math.log(2.0), max_hops=3)
        npt.assert_allclose([w.weights[i] for i in ids], [1.0, 0.5, 0.25, 0.125, 0.0])
        assert [w.hops[i] for i in ids] == [0, 1, 2, 3, 4]

    def test_negative_valence_flips_the_sign_only(self):
        g, ids = self.chain_graph([1.0, -0.5, 0.0])
        w = assign_weights(g, [ids[0]])
        assert w.weights[ids[1]] == -0.5
        assert w.weights[ids[2]] == 0.25  # zero valence counts as positive

    def test_nearest_leader_wins(self):
        g, ids = self.chain_graph([1.0] * 5)
        w = assign_weights(g, [ids[0], ids[4]])
        assert w.hops[ids[1]] == 1 and w.hops[ids[3]] == 1
        assert w.hops[ids[2]] == 2

    def test_unreachable_nodes_get_zero_and_negative_hop(self):
        nodes = plain_nodes(["a", "b", "z"])
        g = SocialGraph.from_edges(nodes, [("a", "b", 1)])
        w = assign_weights(g, ["a"])
        assert w.hops["z"] == -1
        assert w.weights["z"] == 0.0

    def test_arc_direction_does_not_matter_for_hops(self):
        nodes = plain_nodes(["a", "b", "c"])
        g = SocialGraph.from_edges(nodes, [("b", "a", 1), ("b", "c", 1)])
        w = assign_weights(g, ["a"])
        assert w.hops["b"] == 1 and w.hops["c"] == 2

    def test_as_array_follows_node_order(self):
        g, ids = self.chain_graph([1.0, 1.0, 1.0])
        w = assign_weights(g, [ids[1]])
        npt.assert_allclose(w.as_array(), [0.5, 1.0, 0.5])

    def test_unknown_leader_rejected(self):
        g, ids = self.chain_graph([1.0, 1.0])
        with pytest.raises(ValueError):
            assign_weights(g, ["ghost"])
