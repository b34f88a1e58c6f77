"""Graph core: parsing, ordering, reachability and d-separation."""

from itertools import chain, combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causal_reduce.graph import (
    CycleError,
    Dag,
    GraphError,
    GraphParseError,
    ancestors,
    children,
    d_separated,
    descendants,
    format_graph,
    has_causal_path,
    inducing_path_exists,
    parents,
    parse_graph,
    topo_sort,
)
from conftest import golden
from oracles import causal_path_oracle, d_separated_oracle, random_dag


def powerset(items):
    items = list(items)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


class TestParse:
    def test_minimal(self):
        g = parse_graph("!treatment A\n!outcome Y\nA -> Y")
        assert g == Dag(["A", "Y"], [("A", "Y")], "A", "Y")

    def test_motivating_vertices_in_first_appearance_order(self):
        g = golden("motivating")
        assert g.vertices == ("A", "Y", "I1", "O1", "W4", "W2", "W3", "W1")
        assert len(g.edges) == 8

    def test_cycle_rejected(self):
        with pytest.raises(CycleError):
            parse_graph("!treatment A\n!outcome B\nA -> B\nB -> A")

    def test_malformed_line_reports_number(self):
        with pytest.raises(GraphParseError) as err:
            parse_graph("!treatment A\n!outcome Y\nA -> Y\nA -> ")
        assert err.value.line == 4

    def test_missing_treatment(self):
        with pytest.raises(GraphError):
            parse_graph("!outcome Y\nA -> Y")

    def test_undeclared_outcome(self):
        with pytest.raises(GraphError):
            parse_graph("!treatment A\n!outcome Z\nA -> Y")

    def test_comments_and_isolated_vertices(self):
        g = parse_graph("# top\n!treatment A\n!outcome Y\nA -> Y\nLonely\n")
        assert "Lonely" in g.vertices
        assert g.children("Lonely") == frozenset()

    def test_duplicate_edge_rejected(self):
        with pytest.raises(GraphParseError):
            parse_graph("!treatment A\n!outcome Y\nA -> Y\nA -> Y")

    def test_format_round_trip(self):
        for name in ("motivating", "zoo", "covariate_web"):
            g = golden(name)
            assert parse_graph(format_graph(g)) == g
            assert parse_graph(format_graph(g)).vertices == g.vertices


class TestTopoSort:
    def test_chain(self):
        g = parse_graph("!treatment A\n!outcome C\nA -> B\nB -> C")
        assert topo_sort(g) == ("A", "B", "C")

    def test_motivating_reduced_order(self):
        order = topo_sort(golden("motivating_reduced"))
        pos = {v: i for i, v in enumerate(order)}
        assert pos["W2"] < pos["O1"] < pos["A"] < pos["Y"]
        assert pos["W3"] < pos["O1"]

    def test_parent_before_child_random(self, rng):
        for _ in range(30):
            g = random_dag(rng, 7, 0.5)
            pos = {v: i for i, v in enumerate(topo_sort(g))}
            for u, v in g.edges:
                assert pos[u] < pos[v]

    def test_deterministic_across_parses(self):
        text = format_graph(golden("covariate_web"))
        assert topo_sort(parse_graph(text)) == topo_sort(parse_graph(text))


class TestRelations:
    def test_ancestors_trivial(self):
        g = golden("trivial")
        assert ancestors(g, {"Y"}) == {"A", "Y"}

    def test_ancestors_motivating(self):
        assert ancestors(golden("motivating"), {"O1"}) == {"O1", "W4", "W2", "W3", "W1"}

    def test_descendants_zoo(self):
        assert descendants(golden("zoo"), {"A"}) == {
            "A",
            "M1",
            "M2",
            "M3",
            "Y",
            "N1",
        }

    def test_parents_children_not_reflexive(self):
        g = golden("motivating")
        assert parents(g, {"W4"}) == {"W2", "W3"}
        assert children(g, {"W4"}) == {"I1", "O1"}

    def test_unknown_label(self):
        with pytest.raises(GraphError):
            ancestors(golden("trivial"), {"Q"})

    def test_reflexive_transitive_monotone(self, rng):
        for _ in range(20):
            g = random_dag(rng, 6, 0.4)
            vs = list(g.vertices)
            s = set(vs[:2])
            bigger = set(vs[:3])
            an = ancestors(g, s)
            assert s <= an
            assert ancestors(g, an) == an
            assert an <= ancestors(g, bigger)
            de = descendants(g, s)
            assert s <= de
            assert descendants(g, de) == de
            assert de <= descendants(g, bigger)


class TestDSeparation:
    def test_motivating_separations(self):
        g = golden("motivating")
        assert d_separated(g, {"O1"}, {"W2", "W3"}, {"W4"})
        assert d_separated(g, {"W4"}, {"O1"}, {"O1"})

    def test_empty_convention(self):
        g = golden("motivating")
        assert d_separated(g, set(), {"Y"}, set())
        assert d_separated(g, {"A"}, set(), {"W1"})

    def test_symmetry_random(self, rng):
        for _ in range(50):
            g = random_dag(rng, 6, 0.4)
            vs = list(g.vertices)
            rng.shuffle(vs)
            x, y, z = {vs[0]}, {vs[1]}, set(vs[2:4])
            assert d_separated(g, x, y, z) == d_separated(g, y, x, z)

    def test_overlap_rewrite(self, rng):
        for _ in range(50):
            g = random_dag(rng, 6, 0.4)
            vs = list(g.vertices)
            rng.shuffle(vs)
            x, y, z = {vs[0], vs[2]}, {vs[1], vs[3]}, {vs[2], vs[3]}
            assert d_separated(g, x, y, z) == d_separated(g, x - z, y - z, z)

    def test_oracle_all_partitions_small(self, rng):
        # exhaustive <=3-way partitions on graphs up to 5 vertices
        for _ in range(15):
            n = int(rng.integers(3, 6))
            g = random_dag(rng, n, 0.5)
            labels = g.vertices
            for assign in product(range(4), repeat=n):
                x = {labels[i] for i in range(n) if assign[i] == 0}
                y = {labels[i] for i in range(n) if assign[i] == 1}
                z = {labels[i] for i in range(n) if assign[i] == 2}
                if not x or not y:
                    continue
                assert d_separated(g, x, y, z) == d_separated_oracle(g, x, y, z)

    def test_oracle_pairs_seven_vertices(self, rng):
        for _ in range(10):
            g = random_dag(rng, 7, 0.35)
            labels = g.vertices
            for i, j in combinations(range(7), 2):
                rest = [labels[k] for k in range(7) if k not in (i, j)]
                for z in powerset(rest):
                    assert d_separated(
                        g, {labels[i]}, {labels[j]}, set(z)
                    ) == d_separated_oracle(g, {labels[i]}, {labels[j]}, set(z))


class TestCausalPath:
    def test_direct_edge(self):
        assert has_causal_path(golden("trivial"), "A", "Y")

    def test_indirect_blocked_through_treatment(self):
        g = golden("motivating")
        assert not has_causal_path(g, "I1", "Y", avoiding={"A"})
        assert has_causal_path(g, "I1", "Y")

    def test_oracle_random(self, rng):
        for _ in range(50):
            g = random_dag(rng, 7, 0.4)
            vs = list(g.vertices)
            rng.shuffle(vs)
            frm, to = vs[0], vs[1]
            avoid = set(vs[2:4])
            assert has_causal_path(g, frm, to, avoid) == causal_path_oracle(
                g, frm, to, avoid
            )


class TestInducingPath:
    def test_edge_is_trivial_inducing_path(self):
        assert inducing_path_exists(golden("trivial"), "A", "Y", set())

    def test_non_ancestral_collider(self):
        g = parse_graph("!treatment A\n!outcome B\nA -> C\nB -> C\nA -> B")
        # path A -> C <- B has its collider non-ancestral to {A, B}
        g2 = Dag(["A", "B", "C"], [("A", "C"), ("B", "C"), ("A", "B")], "A", "B")
        assert g == g2
        g3 = Dag(["A", "B", "C"], [("A", "C"), ("B", "C")], "A", "B")
        assert not inducing_path_exists(g3, "A", "B", set())

    def test_implies_d_connection(self, rng):
        for _ in range(100):
            g = random_dag(rng, 6, 0.4)
            vs = list(g.vertices)
            rng.shuffle(vs)
            a, b = vs[0], vs[1]
            c = set(vs[2 : 2 + int(rng.integers(0, 4))])
            if inducing_path_exists(g, a, b, c):
                assert not d_separated(g, {a}, {b}, c)

    def test_endpoint_in_conditioning_set_rejected(self):
        g = golden("trivial")
        with pytest.raises(GraphError):
            inducing_path_exists(g, "A", "Y", {"A"})


class TestEquality:
    def test_order_insensitive(self):
        g1 = Dag(["A", "Y", "B"], [("A", "Y"), ("B", "Y")], "A", "Y")
        g2 = Dag(["B", "A", "Y"], [("B", "Y"), ("A", "Y")], "A", "Y")
        assert g1 == g2
        assert hash(g1) == hash(g2)

    def test_treatment_matters(self):
        g1 = Dag(["A", "Y", "B"], [("A", "Y"), ("B", "Y")], "A", "Y")
        g2 = Dag(["A", "Y", "B"], [("A", "Y"), ("B", "Y")], "B", "Y")
        assert g1 != g2


@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40, deadline=None)
def test_dsep_convention_properties(n, seed):
    rng = np.random.default_rng(seed)
    g = random_dag(rng, n, 0.4)
    vs = list(g.vertices)
    z = set(vs[: n // 2])
    assert d_separated(g, set(), set(vs), z)
    # reflexive overlap: x and y sharing a non-conditioned vertex connect
    free = [v for v in vs if v not in z]
    if free:
        assert not d_separated(g, {free[0]}, {free[0]}, z)
