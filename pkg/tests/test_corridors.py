"""Corridor decomposition tests: axis oracle comparison, reduction,
tiling, conflict lists, and the sampling axioms."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polymis.corridors import (FREE_END, LOOP_END, GeneralPositionError,
                               build_corridors, conflict_list,
                               corridor_conflicts, dump_segments, medial_axis,
                               reduce, verify_tiling)
from polymis.geom import (Frame, P, Point, WeightedPolygon, general_position,
                          interiors_intersect, make_rect, polygon)
from polymis.instances import gen_disjoint_polygons


def sheared_square(x, y, side, pid=0, weight=1):
    sq = polygon([(x, y), (x + side, y), (x + side, y + side), (x, y + side)],
                 weight, pid)
    return sq


def prepared(squares):
    polys = [polygon([(x, y), (x + s, y), (x + s, y + s), (x, y + s)], 1, i)
             for i, (x, y, s) in enumerate(squares)]
    out, _ = general_position(polys)
    return out


# ---------------------------------------------------------------------------
# Independent float oracle: L-inf distances without the piece machinery


def _seg_dist_linf(qx, qy, ax, ay, bx, by):
    """min over t in [0,1] of max(|qx-(ax+t dx)|, |qy-(ay+t dy)|).

    The objective is a max of two absolute affine functions of t, hence
    convex piecewise linear: the minimum is at an endpoint or where the two
    arguments agree in absolute value.
    """
    dx, dy = bx - ax, by - ay
    cands = [0.0, 1.0]
    # qx-ax-t*dx = +-(qy-ay-t*dy)
    for s in (1.0, -1.0):
        den = dx - s * dy
        if den != 0:
            cands.append((qx - ax - s * (qy - ay)) / den)
    best = float("inf")
    for t in cands:
        t = min(1.0, max(0.0, t))
        best = min(best, max(abs(qx - ax - t * dx), abs(qy - ay - t * dy)))
    return best


def _poly_dist_linf(qx, qy, poly):
    vs = [(float(v.x), float(v.y)) for v in poly.vertices]
    return min(_seg_dist_linf(qx, qy, *vs[i], *vs[(i + 1) % len(vs)])
               for i in range(len(vs)))


def _site_dists(qx, qy, polys, n):
    """Distances to every site: each polygon, then the 4 frame edges."""
    ds = [_poly_dist_linf(qx, qy, p) for p in polys]
    ds += [qx - 0.0, n - qx, qy - 0.0, n - qy]
    return ds


class TestMedialAxisOracle:
    def test_single_square_matches_distance_transform(self):
        n = 4
        polys = prepared([(Fraction(3, 2), Fraction(3, 2), 1)])
        frame = Frame(make_rect(0, n, 0, n))
        axis = medial_axis(polys, frame)

        # rasterized distance transform at resolution 1/64
        h = 1 / 64
        flagged = []
        steps = int(n / h)
        for i in range(1, steps):
            for j in range(1, steps):
                qx, qy = i * h, j * h
                ds = sorted(_site_dists(qx, qy, polys, n))
                if ds[1] - ds[0] < h:
                    flagged.append((qx, qy))
        assert flagged, "distance transform found no equidistant cells"

        segs = []
        for arc in axis.arcs:
            pts = [(float(p.x), float(p.y)) for p in arc.points]
            segs.extend(zip(pts, pts[1:]))

        def seg_point_dist(q, a, b):
            ax, ay = a
            dx, dy = b[0] - ax, b[1] - ay
            L2 = dx * dx + dy * dy
            t = 0.0 if L2 == 0 else min(1.0, max(
                0.0, ((q[0] - ax) * dx + (q[1] - ay) * dy) / L2))
            ex, ey = q[0] - ax - t * dx, q[1] - ay - t * dy
            return max(abs(ex), abs(ey))

        # every flagged cell lies within one cell of the computed axis
        for q in flagged:
            assert min(seg_point_dist(q, a, b) for a, b in segs) <= 2 * h
        # every axis sample point is equidistant to its two nearest sites
        for arc in axis.arcs:
            for p in arc.points:
                ds = sorted(_site_dists(float(p.x), float(p.y), polys, n))
                assert ds[1] - ds[0] < 1e-9

    def test_two_squares_have_midline_bisector(self):
        polys = prepared([(2, 4, 2), (8, 4, 2)])
        frame = Frame(make_rect(0, 12, 0, 12))
        axis = reduce(medial_axis(polys, frame))
        pair = tuple(sorted((0, 1)))
        mid_arcs = [a for a in axis.arcs if a.pair == pair]
        assert mid_arcs
        # the bisector hugs the (sheared) midline at square height; above and
        # below the squares the L-inf bisector legitimately fans out
        crossings = []
        for arc in mid_arcs:
            for a, b in zip(arc.points, arc.points[1:]):
                ay, by = float(a.y), float(b.y)
                if min(ay, by) <= 5.0 <= max(ay, by):
                    t = 0.5 if ay == by else (5.0 - ay) / (by - ay)
                    crossings.append(float(a.x) + t * (float(b.x) - float(a.x)))
        assert crossings
        for x in crossings:
            assert abs(x - 6.0) < 0.1

    def test_axis_points_have_two_contacts(self):
        inst = gen_disjoint_polygons(3, 24, seed=4)
        polys = inst.polygons()
        axis = medial_axis(polys, inst.frame)
        n = inst.n
        for arc in axis.arcs:
            step = max(1, len(arc.points) // 4)
            for p in arc.points[::step]:
                ds = sorted(_site_dists(float(p.x), float(p.y), polys, n))
                assert ds[1] - ds[0] < 1e-9

    def test_not_disjoint_rejected(self):
        a = polygon([(0, 0), (3, 0), (3, 3), (0, 3)], 1, 0)
        b = polygon([(2, 2), (5, 2), (5, 5), (2, 5)], 1, 1)
        sheared, _ = general_position([a, b])
        with pytest.raises(ValueError, match="inputs not disjoint"):
            medial_axis(sheared, Frame(make_rect(-10, 20, -10, 20)))

    def test_axis_parallel_edge_rejected(self):
        sq = polygon([(2, 2), (4, 2), (4, 4), (2, 4)], 1, 0)
        with pytest.raises(GeneralPositionError, match="general position"):
            medial_axis([sq], Frame(make_rect(0, 8, 0, 8)))


class TestReduce:
    def test_idempotent(self):
        inst = gen_disjoint_polygons(4, 28, seed=1)
        axis = medial_axis(inst.polygons(), inst.frame)
        r1 = reduce(axis)
        r2 = reduce(r1)
        assert r1 == r2

    def test_no_degree_one_vertices(self):
        inst = gen_disjoint_polygons(5, 32, seed=6)
        axis = reduce(medial_axis(inst.polygons(), inst.frame))
        for d in axis.degrees():
            assert d != 1
        for arc in axis.arcs:
            assert FREE_END not in (arc.a, arc.b)

    def test_single_polygon_single_loop(self):
        inst = gen_disjoint_polygons(1, 12, seed=3)
        axis = reduce(medial_axis(inst.polygons(), inst.frame))
        # Euler count for a single closed loop: V = E, every degree exactly 2
        # (a standalone vertex-free loop arc also qualifies)
        degs = axis.degrees()
        loops = [a for a in axis.arcs if (a.a, a.b) == (LOOP_END, LOOP_END)]
        if loops:
            assert len(axis.arcs) == 1 and not axis.vertices
        else:
            assert all(d == 2 for d in degs)
            assert len(axis.arcs) == len(axis.vertices)

    def test_tendrils_removed(self):
        inst = gen_disjoint_polygons(3, 24, seed=8)
        full = medial_axis(inst.polygons(), inst.frame)
        red = reduce(full)
        assert len(red.arcs) <= len(full.arcs)
        # the full axis has frame-corner tendrils ending free
        assert any(FREE_END in (a.a, a.b) for a in full.arcs)


class TestBuildCorridors:
    def test_single_polygon_annulus(self):
        inst = gen_disjoint_polygons(1, 12, seed=0)
        cd = build_corridors(inst.polygons(), inst.frame)
        assert len(cd.corridors) == 1
        c = cd.corridors[0]
        assert len(c.holes) == 1 and not c.spokes

    def test_two_squares_at_most_three(self):
        polys = prepared([(2, 4, 2), (8, 4, 2)])
        cd = build_corridors(polys, Frame(make_rect(0, 12, 0, 12)))
        assert 1 <= len(cd.corridors) <= 3

    def test_corridor_count_bound(self):
        for seed in range(5):
            inst = gen_disjoint_polygons(6, 44, seed=seed)
            cd = build_corridors(inst.polygons(), inst.frame)
            assert len(cd.corridors) <= 3 * 6 - 3

    def test_interiors_avoid_polygons(self):
        inst = gen_disjoint_polygons(10, 68, seed=12)
        polys = inst.polygons()
        cd = build_corridors(polys, inst.frame)
        for c in cd.corridors:
            for p in polys:
                assert not corridor_conflicts(c, p) or p.id in c.conflicts \
                    or p.id in c.defining_set
        # sample polygons never conflict with their own decomposition
        for c in cd.corridors:
            assert not set(c.conflicts or ()) & set(pl.id for pl in polys)

    def test_tiling_identity(self):
        inst = gen_disjoint_polygons(7, 50, seed=21)
        cd = build_corridors(inst.polygons(), inst.frame)
        got, want = verify_tiling(cd, inst.polygons())
        assert got == want

    def test_defining_sets_small(self):
        inst = gen_disjoint_polygons(8, 56, seed=2)
        cd = build_corridors(inst.polygons(), inst.frame)
        for c in cd.corridors:
            assert len(c.defining_set) <= 4
            assert len(c.spokes) <= 4

    @given(st.integers(0, 10_000))
    @settings(max_examples=15, deadline=None)
    def test_random_instances_tile(self, seed):
        m = 2 + seed % 5
        inst = gen_disjoint_polygons(m, 6 * m + 8, seed=seed)
        cd = build_corridors(inst.polygons(), inst.frame)
        got, want = verify_tiling(cd, inst.polygons())
        assert got == want
        assert len(cd.corridors) <= 3 * m - 3


class TestConflictLists:
    def _setup(self, seed=5):
        inst = gen_disjoint_polygons(8, 56, seed=seed)
        universe = inst.polygons()
        sample = universe[:4]
        cd = build_corridors(sample, inst.frame)
        return universe, sample, cd, inst.frame

    def test_intersecting_polygon_conflicts(self):
        universe, sample, cd, _ = self._setup()
        for sigma in universe[4:]:
            hit = [c for c in cd.corridors if corridor_conflicts(c, sigma)]
            # sigma occupies free space, so some corridor must conflict
            assert hit
            for c in hit:
                assert sigma.id in conflict_list(c, universe)

    def test_far_polygon_does_not_conflict(self):
        universe, sample, cd, _ = self._setup()
        for c in cd.corridors:
            cl = conflict_list(c, universe)
            assert not set(cl) & set(c.defining_set)

    def test_predicate_matches_rebuild(self):
        universe, sample, cd, frame = self._setup(seed=13)
        for c in cd.corridors:
            pred = conflict_list(c, universe, method="predicate")
            reb = conflict_list(c, universe, method="rebuild", frame=frame)
            assert pred == reb


class TestClarksonShor:
    def test_membership_iff_defining_in_conflict_out(self):
        inst = gen_disjoint_polygons(5, 38, seed=17)
        universe = inst.polygons()
        frame = inst.frame
        full = build_corridors(universe, frame)
        # reference data: conflict lists against the universe, per subset
        for r in range(2, 5):
            for combo in itertools.combinations(universe, r):
                cd = build_corridors(list(combo), frame)
                sset = {p.id for p in combo}
                for c in cd.corridors:
                    assert set(c.defining_set) <= sset
                    cl = set(conflict_list(c, universe))
                    assert not cl & sset
                    # corridor of the subset iff defining in, conflicts out
                    dsub = [p for p in universe
                            if p.id in set(c.defining_set)]
                    cd_min = build_corridors(dsub, frame)
                    assert c.key() in cd_min.by_key()


class TestDump:
    def test_dump_formats(self):
        inst = gen_disjoint_polygons(2, 20, seed=1)
        axis = medial_axis(inst.polygons(), inst.frame)
        cd = build_corridors(inst.polygons(), inst.frame)
        for text in (dump_segments(axis), dump_segments(cd)):
            for line in text.strip().splitlines():
                parts = line.split()
                assert len(parts) == 5
                [float(v) for v in parts[:4]]
