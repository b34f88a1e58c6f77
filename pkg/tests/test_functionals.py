"""Exact functionals, the influence function, and plugin estimators."""

import numpy as np
import pytest

from causal_reduce.bn import (
    Dataset,
    DiscreteBn,
    PositivityError,
    ZeroConditioningEvent,
    _broadcast_factor,
    random_law,
    sample,
)
from causal_reduce.functionals import (
    EifContext,
    EmptyCellError,
    adjustment_exact,
    adjustment_if_variance,
    eif_exact,
    eif_variance,
    eif_variance_for_graph,
    front_door_exact,
    g_functional_exact,
    g_functional_for_graph,
    plugin_adjustment,
    plugin_g,
)
from causal_reduce.graph import parse_graph
from causal_reduce.reduction import reduce
from conftest import golden


def coin_pair():
    g = golden("trivial")
    return DiscreteBn(
        g,
        {"A": 2, "Y": 2},
        {"A": np.array([0.5, 0.5]), "Y": np.array([[0.5, 0.5], [0.5, 0.5]])},
    )


def biased_chain(py1=0.7):
    g = golden("trivial")
    return DiscreteBn(
        g,
        {"A": 2, "Y": 2},
        {"A": np.array([0.5, 0.5]), "Y": np.array([[0.6, 0.4], [1 - py1, py1]])},
    )


def law_on(name, seed, rng=None, max_card=3, epsilon=0.02):
    g = golden(name)
    gen = np.random.default_rng(seed)
    cards = {v: int(gen.integers(2, max_card + 1)) for v in g.vertices}
    return random_law(g, cards, seed=seed, epsilon=epsilon)


class TestGFunctional:
    def test_chain(self):
        assert g_functional_exact(biased_chain(0.7), 1) == pytest.approx(0.7)

    def test_no_confounding_reduces_to_mean(self):
        bn = coin_pair()
        assert g_functional_exact(bn, 0) == pytest.approx(0.5)
        assert g_functional_exact(bn, 1) == pytest.approx(0.5)

    def test_adjustment_identity_on_motivating(self):
        for seed in range(20):
            bn = law_on("motivating", seed)
            psi = g_functional_exact(bn, 1)
            assert abs(psi - adjustment_exact(bn, {"O1"}, 1)) <= 1e-10
            # any valid back-door set gives the same answer
            assert abs(psi - adjustment_exact(bn, {"I1"}, 1)) <= 1e-10
            assert abs(psi - adjustment_exact(bn, {"W4"}, 1)) <= 1e-10
            assert abs(psi - adjustment_exact(bn, {"I1", "W4"}, 1)) <= 1e-10

    def test_positivity_error(self):
        g = golden("trivial")
        bn = DiscreteBn(
            g,
            {"A": 2, "Y": 2},
            {"A": np.array([1.0, 0.0]), "Y": np.array([[0.5, 0.5], [0.5, 0.5]])},
        )
        with pytest.raises(PositivityError):
            g_functional_exact(bn, 1)

    def test_for_graph_matches_reduced_marginal(self):
        g = golden("motivating")
        red = reduce(g).output
        for seed in range(10):
            bn = law_on("motivating", seed)
            assert abs(
                g_functional_exact(bn, 1) - g_functional_for_graph(bn, red, 1)
            ) <= 1e-10


class TestAdjustment:
    def test_empty_set_is_conditional_mean(self):
        assert adjustment_exact(biased_chain(0.7), set(), 1) == pytest.approx(0.7)

    def test_zero_conditioning(self):
        g = parse_graph("!treatment A\n!outcome Y\nL -> A\nA -> Y\nL -> Y")
        cpts = {
            "L": np.array([0.5, 0.5]),
            "A": np.array([[1.0, 0.0], [0.5, 0.5]]),
            "Y": np.array([[[0.5, 0.5]] * 2] * 2),
        }
        bn = DiscreteBn(g, {"L": 2, "A": 2, "Y": 2}, cpts)
        with pytest.raises(ZeroConditioningEvent):
            adjustment_exact(bn, {"L"}, 1)


class TestFrontDoor:
    def test_agrees_with_g_formula_on_markov_laws(self):
        for seed in range(20):
            bn = law_on("front_door", seed)
            assert abs(
                front_door_exact(bn, {"M"}, 1) - g_functional_exact(bn, 1)
            ) <= 1e-10
            assert abs(
                adjustment_exact(bn, {"O"}, 1) - g_functional_exact(bn, 1)
            ) <= 1e-10

    def test_degenerate_copy_mediator(self):
        g = parse_graph("!treatment A\n!outcome Y\nA -> M\nM -> Y")
        bn = DiscreteBn(
            g,
            {"A": 2, "M": 2, "Y": 2},
            {
                "A": np.array([0.4, 0.6]),
                "M": np.array([[1.0, 0.0], [0.0, 1.0]]),
                "Y": np.array([[0.8, 0.2], [0.3, 0.7]]),
            },
        )
        assert front_door_exact(bn, {"M"}, 1) == pytest.approx(0.7)

    def test_witness_gap_off_model(self):
        # law Markov to the graph with a direct treatment-outcome edge is
        # generally not Markov to the pure front-door graph
        gw = parse_graph(
            "!treatment A\n!outcome Y\nA -> M\nM -> Y\nA -> Y\nO -> A\nO -> Y"
        )
        bn = random_law(gw, {v: 2 for v in gw.vertices}, seed=0, epsilon=0.05)
        gap = abs(front_door_exact(bn, {"M"}, 1) - adjustment_exact(bn, {"O"}, 1))
        assert gap > 0.01


class TestEif:
    def test_trivial_point_value(self):
        bn = coin_pair()
        assert eif_exact(bn, 1, (1, 1)) == pytest.approx(1.0)
        assert eif_exact(bn, 1, (0, 1)) == pytest.approx(0.0)
        assert eif_variance(bn, 1) == pytest.approx(0.5)

    def test_mean_zero_across_laws(self):
        for name in ("motivating", "mediator_chain", "mediator_plain"):
            for seed in range(10):
                bn = law_on(name, seed)
                ctx = EifContext.build(bn, 1)
                assert abs(float((ctx.joint * ctx.values).sum())) <= 1e-10

    def test_tables_exposed(self):
        bn = law_on("motivating", 3)
        ctx = EifContext.build(bn, 1)
        assert set(map(len, ctx.b_table)) <= {1}
        assert all(v > 0 for v in ctx.rho_table.values())

    def test_variance_matches_reduced_graph(self):
        for name in ("motivating", "mediator_chain", "covariate_web"):
            g = golden(name)
            red = reduce(g).output
            for seed in range(5):
                gen = np.random.default_rng(seed)
                cards = {v: int(gen.integers(2, 3)) for v in g.vertices}
                bn = random_law(g, cards, seed=seed, epsilon=0.02)
                v_full = eif_variance(bn, 1)
                v_red = eif_variance_for_graph(bn, red, 1)
                assert abs(v_full - v_red) <= 1e-8

    def test_constant_in_uninformative_coordinates(self):
        from causal_reduce.criteria import informative_set

        g = golden("motivating")
        vstar = informative_set(g)
        for seed in range(5):
            bn = law_on("motivating", seed)
            ctx = EifContext.build(bn, 1)
            for i, v in enumerate(g.vertices):
                if v not in vstar:
                    assert float(np.ptp(ctx.values, axis=i).max()) <= 1e-9

    def test_pathwise_derivative(self):
        g = golden("motivating")
        rng = np.random.default_rng(99)
        for _ in range(5):
            cards = {v: int(rng.integers(2, 4)) for v in g.vertices}
            bn = random_law(g, cards, seed=int(rng.integers(10**6)), epsilon=0.02)
            v = g.vertices[int(rng.integers(len(g.vertices)))]
            shape = bn.cpts[v].shape
            row = tuple(int(rng.integers(s)) for s in shape[:-1])
            q = rng.dirichlet(np.ones(shape[-1]))
            p_row = bn.cpts[v][row]

            def psi_at(t):
                table = bn.cpts[v].copy()
                table[row] = (1 - t) * p_row + t * q
                return g_functional_exact(bn.with_cpt(v, table), 1)

            def central(h):
                return (psi_at(h) - psi_at(-h)) / (2 * h)

            fd = (100 * central(1e-5) - central(1e-4)) / 99
            ctx = EifContext.build(bn, 1)
            score_fac = np.zeros(shape)
            score_fac[row] = (q - p_row) / p_row
            score = _broadcast_factor(
                g.vertices, bn.cards, list(bn.parent_order(v)) + [v], score_fac
            )
            want = float((ctx.joint * ctx.values * score).sum())
            assert abs(fd - want) <= 1e-6 * max(1.0, abs(fd), abs(want))

    def test_matches_nested_loop_oracle(self):
        # fully independent composition: loop-based conditional expectations,
        # no array broadcasting anywhere
        from oracles import eif_loop, g_functional_loop

        rng = np.random.default_rng(12)
        for name in ("mediator_confounded", "front_door", "two_adjusters"):
            g = golden(name)
            bn = law_on(name, 5)
            assert g_functional_exact(bn, 1) == pytest.approx(
                g_functional_loop(bn, 1), abs=1e-12
            )
            ctx = EifContext.build(bn, 1)
            for _ in range(4):
                point = {
                    v: int(rng.integers(bn.cards[v])) for v in g.vertices
                }
                want = eif_loop(bn, 1, point)
                got = ctx.evaluate([point[v] for v in g.vertices])
                assert got == pytest.approx(want, abs=1e-10)

    def test_bound_below_adjustment_variance(self):
        from causal_reduce.simulate import SimConfig, build_benchmark_dgp

        bn = build_benchmark_dgp(SimConfig("a", 5, 50, 100, 1, 0))
        bound = eif_variance(bn, 1)
        adj = adjustment_if_variance(bn, {"O1"}, 1)
        assert bound <= adj + 1e-10
        assert adj - bound > 0.01
        for seed in range(10):
            bn2 = law_on("motivating", seed)
            assert eif_variance(bn2, 1) <= adjustment_if_variance(bn2, {"O1"}, 1) + 1e-10


def exact_count_dataset(bn):
    """All configurations replicated proportionally to an all-rational law."""
    from causal_reduce.bn import joint_table

    table = joint_table(bn)
    denom = 2400
    counts = np.round(table * denom).astype(int)
    assert abs(counts.sum() - denom) <= 0, "law must have rational cells"
    rows = []
    for idx in np.ndindex(table.shape):
        rows.extend([list(idx)] * int(counts[idx]))
    return Dataset(tuple(bn.graph.vertices), np.array(rows), dict(bn.cards))


def rational_front_door_law():
    g = golden("front_door")
    return DiscreteBn(
        g,
        {v: 2 for v in g.vertices},
        {
            "O": np.array([0.5, 0.5]),
            "A": np.array([[0.75, 0.25], [0.25, 0.75]]),
            "M": np.array([[0.8, 0.2], [0.4, 0.6]]),
            "Y": np.array([[[0.9, 0.1], [0.5, 0.5]], [[0.6, 0.4], [0.2, 0.8]]]),
        },
    )


class TestPlugins:
    def test_all_ones_dataset(self):
        g = golden("trivial")
        rows = np.array([[0, 1], [1, 1], [1, 1], [0, 1]])
        ds = Dataset(("A", "Y"), rows, {"A": 2, "Y": 2})
        assert plugin_g(ds, g, 1).value == pytest.approx(1.0)

    def test_exact_counts_match_exact_functional(self):
        bn = rational_front_door_law()
        ds = exact_count_dataset(bn)
        assert plugin_g(ds, bn.graph, 1).value == pytest.approx(
            g_functional_exact(bn, 1), abs=1e-10
        )
        assert plugin_adjustment(ds, bn.graph, {"O"}, 1).value == pytest.approx(
            adjustment_exact(bn, {"O"}, 1), abs=1e-10
        )

    def test_adjustment_empty_set_is_treated_mean(self):
        rows = np.array([[1, 1], [1, 0], [0, 1], [1, 1]])
        ds = Dataset(("A", "Y"), rows, {"A": 2, "Y": 2})
        got = plugin_adjustment(ds, golden("trivial"), set(), 1)
        assert got.value == pytest.approx(2 / 3)

    def test_empty_cell_error_lists_cells(self):
        g = golden("trivial")
        rows = np.array([[0, 0], [0, 1]])
        ds = Dataset(("A", "Y"), rows, {"A": 2, "Y": 2})
        with pytest.raises(EmptyCellError):
            plugin_g(ds, g, 1)
        with pytest.raises(EmptyCellError):
            plugin_adjustment(ds, g, set(), 1)

    def test_laplace_opt_in(self):
        g = golden("trivial")
        rows = np.array([[0, 0], [0, 1]])
        ds = Dataset(("A", "Y"), rows, {"A": 2, "Y": 2})
        report = plugin_g(ds, g, 1, laplace=1.0)
        assert 0.0 <= report.value <= 1.0

    def test_plugin_consistency(self):
        bn = rational_front_door_law()
        truth = g_functional_exact(bn, 1)
        ds = sample(bn, 200_000, seed=17)
        est = plugin_g(ds, bn.graph, 1).value
        assert abs(est - truth) < 0.01

    def test_extra_columns_ignored(self):
        # a dataset may carry more columns than the estimating graph uses
        bn = rational_front_door_law()
        ds = sample(bn, 5000, seed=2)
        red = parse_graph("!treatment A\n!outcome Y\nA -> Y\nO -> A\nO -> Y\nM\n")
        sub = parse_graph("!treatment A\n!outcome Y\nA -> Y\nO -> A\nO -> Y")
        assert plugin_g(ds, sub, 1).value == pytest.approx(
            plugin_g(ds, red, 1).value
        )
