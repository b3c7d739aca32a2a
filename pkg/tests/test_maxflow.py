import numpy as np
import pytest

from raycut.errors import MalformedCut, MalformedHeader
from raycut.graph import CAP_SCALE, CostGrid, SegGraph, build_graph, dump_dimacs
from raycut.maxflow import (
    extract_boundary,
    max_flow_bk,
    read_dimacs,
    reference_max_flow,
    warmup_solver,
)
from raycut.template import build_icosphere
from tests._checks import assert_cut_invariants
from tests.test_graph import single_ray_template


def random_graph(rng: np.random.Generator, max_nodes: int = 30) -> SegGraph:
    n = int(rng.integers(2, max_nodes + 1))
    s = 0
    t = n - 1
    m = int(rng.integers(1, 4 * n))
    tails = rng.integers(0, n, m)
    heads = rng.integers(0, n, m)
    keep = tails != heads
    caps = rng.integers(0, 101, m)
    return SegGraph.from_arcs(n, s, t, zip(tails[keep], heads[keep], caps[keep]))


class TestExamples:
    def test_two_node_chain(self):
        g = SegGraph.from_arcs(3, 0, 2, [(0, 1, 3), (1, 2, 2)])
        cut = max_flow_bk(g)
        assert cut.flow_value == 2
        assert cut.source_side.tolist() == [True, True, False]
        assert reference_max_flow(g) == 2

    def test_diamond(self):
        g = SegGraph.from_arcs(
            4, 0, 3,
            [(0, 1, 3), (0, 2, 2), (1, 3, 2), (2, 3, 3), (1, 2, 1)],
        )
        cut = max_flow_bk(g)
        assert cut.flow_value == 5
        assert reference_max_flow(g) == 5

    def test_single_ray_boundary(self):
        g = build_graph(CostGrid(mu=0.0, c=np.array([[5.0, 2.0, 9.0]])), single_ray_template(), 0)
        cut = max_flow_bk(g)
        # cut cost = c[1] + |w<0| constant = (2 + 3) * scale
        assert cut.flow_value == 5 * CAP_SCALE
        assert cut.boundary.tolist() == [1]
        assert reference_max_flow(g) == cut.flow_value

    def test_terminals_only_no_flow(self):
        g = SegGraph.from_arcs(5, 3, 4, [(0, 4, 7), (1, 4, 2), (2, 4, 9)])
        cut = max_flow_bk(g)
        assert cut.flow_value == 0
        assert reference_max_flow(g) == 0

    def test_no_arcs_at_all(self):
        g = SegGraph.from_arcs(2, 0, 1, [])
        assert max_flow_bk(g).flow_value == 0
        assert reference_max_flow(g) == 0


class TestOracleAgreement:
    def test_random_graphs(self):
        rng = np.random.default_rng(2024)
        for _ in range(150):
            g = random_graph(rng)
            assert max_flow_bk(g).flow_value == reference_max_flow(g)

    def test_dense_small(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            n = 6
            arcs = [
                (u, v, int(rng.integers(0, 20)))
                for u in range(n)
                for v in range(n)
                if u != v
            ]
            g = SegGraph.from_arcs(n, 0, n - 1, arcs)
            assert max_flow_bk(g).flow_value == reference_max_flow(g)


class TestCutStructure:
    def test_duality_random(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            g = random_graph(rng)
            cut = max_flow_bk(g)
            crossing = cut.source_side[g.tails] & ~cut.source_side[g.heads]
            assert int(g.caps[crossing].sum()) == cut.flow_value
            assert cut.source_side[g.source]
            assert not cut.source_side[g.sink]

    def test_conservation_random(self):
        rng = np.random.default_rng(13)
        for _ in range(60):
            g = random_graph(rng)
            cut = max_flow_bk(g)
            assert (cut.arc_flow >= 0).all()
            assert (cut.arc_flow <= g.caps).all()
            net = np.zeros(g.num_nodes, dtype=np.int64)
            np.subtract.at(net, g.tails, cut.arc_flow)
            np.add.at(net, g.heads, cut.arc_flow)
            interior = np.ones(g.num_nodes, dtype=bool)
            interior[[g.source, g.sink]] = False
            assert (net[interior] == 0).all()
            assert -net[g.source] == cut.flow_value
            assert net[g.sink] == cut.flow_value

    def test_minimal_source_set(self):
        # two equal-cost cuts: s->a (2), a->t (2); canonical pick is the
        # residual-reachable set, which excludes a
        g = SegGraph.from_arcs(3, 0, 2, [(0, 1, 2), (1, 2, 2)])
        cut = max_flow_bk(g)
        assert cut.source_side.tolist() == [True, False, False]

    def test_ray_graph_invariants(self):
        tmpl = build_icosphere(1)
        rng = np.random.default_rng(17)
        for delta_r in (0, 1, 2):
            c = rng.uniform(0, 80, (tmpl.ray_count, 8))
            g = build_graph(CostGrid(mu=0.0, c=c), tmpl, delta_r)
            cut = max_flow_bk(g)
            assert_cut_invariants(g, cut, tmpl, delta_r)

    def test_delta_zero_is_sphere(self):
        tmpl = build_icosphere(1)
        rng = np.random.default_rng(19)
        c = rng.uniform(0, 80, (tmpl.ray_count, 10))
        cut = max_flow_bk(build_graph(CostGrid(mu=0.0, c=c), tmpl, 0))
        assert np.unique(cut.boundary).size == 1

    def test_unconstrained_argmin(self):
        tmpl = build_icosphere(0)
        samples = 6
        rng = np.random.default_rng(23)
        # integer grid then distinct jitter keeps per-ray minima unique
        c = rng.permuted(
            np.tile(np.arange(samples, dtype=np.float64), (tmpl.ray_count, 1)), axis=1
        ) * 10.0
        cut = max_flow_bk(build_graph(CostGrid(mu=0.0, c=c), tmpl, samples - 1))
        assert cut.boundary.tolist() == c.argmin(axis=1).tolist()


class TestExtractBoundary:
    def test_all_source_side(self):
        side = np.ones(4 * 5 + 2, dtype=bool)
        assert extract_boundary(side, 4, 5).tolist() == [4, 4, 4, 4]

    def test_only_base_layer(self):
        side = np.zeros(3 * 4 + 2, dtype=bool)
        side[[0, 4, 8]] = True
        assert extract_boundary(side, 3, 4).tolist() == [0, 0, 0]

    def test_base_not_source_side(self):
        side = np.zeros(2 * 3 + 2, dtype=bool)
        side[0:3] = True
        with pytest.raises(MalformedCut) as e:
            extract_boundary(side, 2, 3)
        assert "ray 1" in str(e.value)

    def test_prefix_violation(self):
        side = np.zeros(1 * 4 + 2, dtype=bool)
        side[[0, 2]] = True  # gap at z=1
        with pytest.raises(MalformedCut) as e:
            extract_boundary(side, 1, 4)
        assert "prefix" in str(e.value)

    def test_partition_too_small(self):
        with pytest.raises(MalformedCut):
            extract_boundary(np.ones(5, dtype=bool), 2, 3)


class TestDimacsInterop:
    def test_round_trip_flow(self):
        tmpl = build_icosphere(0)
        rng = np.random.default_rng(29)
        c = rng.uniform(0, 40, (12, 5))
        g = build_graph(CostGrid(mu=0.0, c=c), tmpl, 1)
        g2 = read_dimacs(dump_dimacs(g))
        assert g2.num_nodes == g.num_nodes
        assert (g2.tails == g.tails).all()
        assert (g2.heads == g.heads).all()
        assert (g2.caps == g.caps).all()
        assert max_flow_bk(g2).flow_value == max_flow_bk(g).flow_value

    def test_comments_and_blanks_ok(self):
        text = "c comment\n\np max 2 1\nn 1 s\nn 2 t\na 1 2 9\n"
        g = read_dimacs(text)
        assert max_flow_bk(g).flow_value == 9

    @pytest.mark.parametrize(
        "text",
        [
            "p min 2 1\nn 1 s\nn 2 t\na 1 2 9",
            "p max 2\nn 1 s\nn 2 t\na 1 2 9",
            "p max 2 1\nn 1 x\nn 2 t\na 1 2 9",
            "p max 2 1\nn 1 s\nn 2 t\na 1 2",
            "p max 2 1\nn 1 s\nn 2 t\nq 1 2 9",
            "n 1 s\nn 2 t\na 1 2 9",
            "p max 2 1\na 1 2 9",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(MalformedHeader):
            read_dimacs(text)


class TestDeterminism:
    def test_repeat_solve_identical(self):
        tmpl = build_icosphere(1)
        rng = np.random.default_rng(31)
        c = rng.uniform(0, 120, (tmpl.ray_count, 12))
        g = build_graph(CostGrid(mu=0.0, c=c), tmpl, 1)
        a = max_flow_bk(g)
        b = max_flow_bk(g)
        assert a.flow_value == b.flow_value
        assert (a.source_side == b.source_side).all()
        assert (a.boundary == b.boundary).all()
        assert (a.arc_flow == b.arc_flow).all()

    def test_warmup_runs(self):
        warmup_solver()
        warmup_solver()
