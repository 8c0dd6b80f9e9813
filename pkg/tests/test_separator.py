"""Dual graph, triangulation, cycle separator, boundary trace, encoding,
and the cheap balanced cut contract."""

import math
import random
from fractions import Fraction

import networkx as nx
import pytest

from polymis.cuttings import (Cutting, SampleParams, _island_weights,
                              build_cutting, conflict_weights, rho_sample,
                              total_weight)
from polymis.corridors import build_corridors
from polymis.geom import INTERSECTING, classify_against, polygon
from polymis.instances import gen_disjoint_polygons
from polymis.separator import (DualGraph, HeavyPolygon, SeparatingPolygon,
                               SeparatorError, cheap_balanced_cut,
                               candidate_cycles, cycle_separator, decode,
                               dual_graph, encode, fix_and_triangulate,
                               splice_cycle, trace_separating_polygon)


def make_cutting(m, n, seed, rho, sample_seed=5):
    inst = gen_disjoint_polygons(m, n, seed=seed)
    polys = inst.polygons()
    sample = rho_sample(polys, SampleParams(Fraction(rho), seed=sample_seed))
    if not sample:
        sample = [polys[0]]
    decomp = build_corridors(sample, inst.frame)
    cut = Cutting(decomp, tuple(p.id for p in sample), 2,
                  conflict_weights(decomp, polys),
                  _island_weights(sample, polys), 0, 0)
    return inst, polys, cut


class TestDualGraph:
    def test_single_polygon_two_regions(self):
        inst, polys, cut = make_cutting(1, 12, seed=0, rho=1)
        g = dual_graph(cut, polys)
        kinds = sorted(k[0] for k in g.vertices)
        assert kinds == ["c", "i"]
        assert g.total_weight() == total_weight(polys)

    def test_adjacent_corridors_share_edge(self):
        inst, polys, cut = make_cutting(2, 18, seed=1, rho=2)
        g = dual_graph(cut, polys)
        cc = [e for e in g.edges if e[0][0] == "c" and e[1][0] == "c"]
        assert cc  # corridors around two islands share spokes

    def test_weight_sum_m50(self):
        inst, polys, cut = make_cutting(50, 110, seed=3, rho=6)
        g = dual_graph(cut, polys)
        assert g.total_weight() == total_weight(polys)
        assert all(w >= 0 for w in g.weights.values())

    def test_deterministic(self):
        inst, polys, cut = make_cutting(10, 40, seed=2, rho=3)
        a, b = dual_graph(cut, polys), dual_graph(cut, polys)
        assert a.vertices == b.vertices and a.edges == b.edges
        assert a.weights == b.weights

    def test_rotations_cover_edges(self):
        inst, polys, cut = make_cutting(12, 44, seed=2, rho=4)
        g = dual_graph(cut, polys)
        simple = {frozenset(e) for e in g.edges if e[0] != e[1]}
        from_rot = set()
        for u, nbrs in g.rotations.items():
            for v in nbrs:
                from_rot.add(frozenset((u, v)))
        assert simple == from_rot


class TestFixAndTriangulate:
    def test_triangle_unchanged(self):
        g = DualGraph((("c", 0), ("c", 1), ("c", 2)),
                      {("c", 0): 1, ("c", 1): 1, ("c", 2): 1},
                      ((("c", 0), ("c", 1)), (("c", 1), ("c", 2)),
                       (("c", 2), ("c", 0))))
        tri = fix_and_triangulate(g)
        assert tri.graph.number_of_edges() == 3
        assert tri.graph.number_of_nodes() == 3

    def test_loops_and_parallels_dropped(self):
        g = DualGraph((("c", 0), ("c", 1), ("c", 2)),
                      {("c", 0): 1, ("c", 1): 1, ("c", 2): 0},
                      ((("c", 0), ("c", 0)), (("c", 0), ("c", 1)),
                       (("c", 0), ("c", 1)), (("c", 1), ("c", 2)),
                       (("c", 2), ("c", 0))))
        tri = fix_and_triangulate(g)
        assert nx.number_of_selfloops(tri.graph) == 0

    def test_random_dual_structural(self):
        inst, polys, cut = make_cutting(15, 48, seed=4, rho=4)
        tri = fix_and_triangulate(dual_graph(cut, polys))
        G = tri.graph
        v, e = G.number_of_nodes(), G.number_of_edges()
        assert nx.is_connected(G)
        assert nx.number_of_selfloops(G) == 0
        if v >= 3:
            # fully triangulated simple planar graph
            assert e == 3 * v - 6
            assert nx.check_planarity(G)[0]
        # straight-line drawing has distinct positions
        assert len({tri.pos[u] for u in G.nodes()}) == v

    def test_weights_preserved(self):
        inst, polys, cut = make_cutting(10, 40, seed=6, rho=3)
        g = dual_graph(cut, polys)
        tri = fix_and_triangulate(g)
        assert sum(tri.weights.values()) == g.total_weight()


class TestCycleSeparator:
    def _contract(self, tri, cycle):
        n = tri.graph.number_of_nodes()
        assert len(cycle) <= 4 * math.sqrt(n)
        assert len(cycle) == len(set(cycle))
        W = sum(tri.weights.values())
        found = [(c, i, o) for c, i, o in candidate_cycles(tri)
                 if c == cycle]
        assert found
        _, inside, outside = found[0]
        assert inside <= Fraction(3, 4) * W
        assert outside <= Fraction(3, 4) * W

    def test_cutting_duals(self):
        for seed in (0, 1, 2):
            inst, polys, cut = make_cutting(20, 56, seed=seed, rho=5)
            tri = fix_and_triangulate(dual_graph(cut, polys))
            if tri.graph.number_of_nodes() <= 3:
                continue
            cycle = cycle_separator(tri)
            self._contract(tri, cycle)

    def test_triangulated_grid_100(self):
        # uniform weights on a 10x10 grid with one diagonal per cell
        G = nx.Graph()
        for i in range(10):
            for j in range(10):
                if i < 9:
                    G.add_edge((i, j), (i + 1, j))
                if j < 9:
                    G.add_edge((i, j), (i, j + 1))
                if i < 9 and j < 9:
                    G.add_edge((i, j), (i + 1, j + 1))
        g = DualGraph(tuple(G.nodes()), {v: 1 for v in G.nodes()},
                      tuple(G.edges()))
        tri = fix_and_triangulate(g)
        cycle = cycle_separator(tri)
        assert len(cycle) <= 40
        found = [(c, i, o) for c, i, o in candidate_cycles(tri) if c == cycle]
        _, inside, outside = found[0]
        assert inside <= 75 and outside <= 75

    def test_small_graph_returns_all(self):
        g = DualGraph((("c", 0), ("c", 1)), {("c", 0): 5, ("c", 1): 3},
                      ((("c", 0), ("c", 1)),))
        tri = fix_and_triangulate(g)
        assert cycle_separator(tri) == [("c", 0), ("c", 1)]


class TestTrace:
    def test_single_corridor_cycle(self):
        inst, polys, cut = make_cutting(1, 12, seed=0, rho=1)
        c = cut.decomposition.corridors[0]
        gamma = trace_separating_polygon([("c", c.cid)], cut, polys)
        ring = list(c.outer[:-1] if c.outer[0] == c.outer[-1] else c.outer)
        assert set(gamma.boundary) <= set(ring)

    def test_union_interiorizes_shared_spoke(self):
        inst, polys, cut = make_cutting(2, 18, seed=1, rho=2)
        g = dual_graph(cut, polys)
        cc = [e for e in g.edges if e[0][0] == "c" and e[1][0] == "c"]
        u, v = cc[0]
        gamma = trace_separating_polygon([u, v], cut, polys)
        # simple closed loop with every vertex carrying provenance
        assert len(gamma.boundary) == len(set(gamma.boundary))
        assert len(gamma.tokens) == len(gamma.boundary)

    def test_islands_never_cut(self):
        inst, polys, cut = make_cutting(12, 44, seed=2, rho=4)
        tri = fix_and_triangulate(dual_graph(cut, polys))
        done = 0
        for cycle, _, _ in candidate_cycles(tri, limit=10):
            keys = splice_cycle(cycle, tri) or list(cycle)
            try:
                gamma = trace_separating_polygon(keys, cut, polys)
            except SeparatorError:
                continue
            parts = classify_against(polys, list(gamma.boundary))
            hit = {p.id for p in parts[INTERSECTING]}
            assert not (hit & set(cut.islands))
            done += 1
        assert done >= 1

    def test_weights_partition(self):
        inst, polys, cut = make_cutting(12, 44, seed=2, rho=4)
        tri = fix_and_triangulate(dual_graph(cut, polys))
        for cycle, _, _ in candidate_cycles(tri, limit=6):
            keys = splice_cycle(cycle, tri) or list(cycle)
            try:
                gamma = trace_separating_polygon(keys, cut, polys)
            except SeparatorError:
                continue
            assert (gamma.inside_weight + gamma.outside_weight
                    + gamma.cut_weight) == total_weight(polys)
            return
        pytest.skip("no traceable candidate")


class TestEncoding:
    def _roundtrip(self, m, n, seed):
        inst = gen_disjoint_polygons(m, n, seed=seed)
        polys = inst.polygons()
        gamma = cheap_balanced_cut(polys, Fraction(1, 2), seed=seed + 7,
                                   frame=inst.frame)
        assert isinstance(gamma, SeparatingPolygon)
        back = decode(gamma.encoding, polys, inst.frame)
        assert back.boundary == gamma.boundary
        assert back.inside_weight == gamma.inside_weight
        assert back.outside_weight == gamma.outside_weight
        assert back.cut_weight == gamma.cut_weight

    def test_roundtrip_small(self):
        self._roundtrip(12, 44, seed=2)

    def test_roundtrip_medium(self):
        self._roundtrip(25, 64, seed=9)

    def test_bits_are_binary(self):
        inst = gen_disjoint_polygons(12, 44, seed=2)
        polys = inst.polygons()
        gamma = cheap_balanced_cut(polys, Fraction(1, 2), seed=3,
                                   frame=inst.frame)
        assert set(gamma.encoding) <= {"0", "1"}


class TestCheapBalancedCut:
    def test_heavy_polygon_branch(self):
        polys = [polygon([(3 * i, 0), (3 * i + 1, 0),
                          (3 * i + 1, 1), (3 * i, 1)], 1, i)
                 for i in range(9)]
        polys.append(polygon([(30, 0), (31, 0), (31, 1), (30, 1)], 100, 9))
        out = cheap_balanced_cut(polys, Fraction(1, 2), seed=0)
        assert isinstance(out, HeavyPolygon)
        assert out.polygon.id == 9

    def test_contract_m30(self):
        inst = gen_disjoint_polygons(30, 70, seed=4)
        polys = inst.polygons()
        W = total_weight(polys)
        gamma = cheap_balanced_cut(polys, Fraction(1, 2), seed=5,
                                   frame=inst.frame)
        assert isinstance(gamma, SeparatingPolygon)
        cap = Fraction(1, 2) / Fraction(math.log2(30)).limit_denominator(10 ** 9)
        assert gamma.cut_weight <= cap * W
        assert gamma.inside_weight <= Fraction(2, 3) * W
        assert gamma.outside_weight <= Fraction(2, 3) * W
        # exact partition re-verified independently
        parts = classify_against(polys, list(gamma.boundary))
        assert sum(p.weight for p in parts[INTERSECTING]) == gamma.cut_weight

    def test_invalid_eps(self):
        inst = gen_disjoint_polygons(4, 24, seed=0)
        with pytest.raises(ValueError):
            cheap_balanced_cut(inst.polygons(), Fraction(3, 2), seed=0,
                               frame=inst.frame)

    def test_deterministic(self):
        inst = gen_disjoint_polygons(15, 48, seed=6)
        polys = inst.polygons()
        a = cheap_balanced_cut(polys, Fraction(1, 2), seed=11, frame=inst.frame)
        b = cheap_balanced_cut(polys, Fraction(1, 2), seed=11, frame=inst.frame)
        assert a.boundary == b.boundary and a.encoding == b.encoding
