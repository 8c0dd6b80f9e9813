"""Grid partition, segment sets, face classification, and the block PTAS."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polymis.blocks import (BlocksError, CapsExceeded, Region, Seg, TrailDP,
                            _exact_rect_subset, _hole_count,
                            _is_effective_ring, build_grid, build_partition,
                            construct_X, construct_Y, covered_edges,
                            extract_faces, frame_segments, is_block,
                            nicely_connected, rect_cells,
                            representative_block, solve_blocks,
                            solve_rectangles, trail_value, verify_partition)
from polymis.geom import make_rect, polygon, rect_to_vertices, \
    rects_interiors_intersect
from polymis.instances import gen_delta_large
from polymis.oracle import build_conflict_graph, mwis_exact

HALF = Fraction(1, 2)


def oracle_rects(items):
    """Exact MWIS of (id, Rect) items through the polygon conflict graph."""
    polys = [polygon([(p.x, p.y) for p in rect_to_vertices(r)], r.weight, i)
             for i, r in items]
    return mwis_exact(build_conflict_graph(polys))


def greedy_ref(blocks):
    ref = []
    for it in blocks:
        if all(not rects_interiors_intersect(it[1], o[1]) for o in ref):
            ref.append(it)
    return ref


class TestGrid:
    def test_examples(self):
        g = build_grid(100, Fraction(1, 5))
        assert g.spacing == 20 and g.per_side == 5 and len(g.cells()) == 25
        g = build_grid(8, HALF)
        assert g.spacing == 4 and len(g.cells()) == 4

    def test_single_cell(self):
        g = build_grid(7, Fraction(1))
        assert g.spacing == 7 and g.cells() == [(0, 0)]

    def test_incompatible(self):
        with pytest.raises(ValueError):
            build_grid(10, Fraction(1, 3))   # delta * n not integral
        with pytest.raises(ValueError):
            build_grid(9, Fraction(2, 3))    # 1/delta not integral
        with pytest.raises(ValueError):
            build_grid(8, Fraction(3, 2))

    def test_is_block(self):
        g = build_grid(8, HALF)
        assert is_block((0, make_rect(0, 8, 3, 4)), g)
        assert is_block((0, make_rect(3, 4, 1, 7)), g)
        assert not is_block((0, make_rect(0, 4, 3, 4)), g)    # too short
        assert not is_block((0, make_rect(0, 8, 3, 5)), g)    # too thick
        assert not is_block((0, make_rect(0, 8, 3, Fraction(7, 2))), g)


class TestSeg:
    def test_normalization(self):
        assert Seg.make((5, 2), (1, 2)) == Seg(1, 2, 5, 2)
        with pytest.raises(ValueError):
            Seg(0, 0, 1, 1)
        with pytest.raises(ValueError):
            Seg(3, 0, 3, 0)

    def test_crosses(self):
        v = Seg(2, 0, 2, 4)
        assert v.crosses(Seg(0, 2, 4, 2))
        assert not v.crosses(Seg(0, 0, 4, 0))      # endpoint touch
        assert not v.crosses(Seg(2, 4, 5, 4))
        assert v.crosses(Seg(2, 3, 2, 6))          # collinear overlap
        assert not v.crosses(Seg(2, 4, 2, 6))      # collinear touch

    def test_cuts_rect(self):
        r = make_rect(1, 5, 1, 2)
        assert Seg(3, 0, 3, 8).cuts_rect(r)
        assert Seg(3, 1, 3, 2).cuts_rect(r)       # exactly spanning
        assert not Seg(0, 0, 0, 8).cuts_rect(r)   # misses
        assert not Seg(3, 2, 3, 8).cuts_rect(r)   # does not span

    def test_intersects_rect_interior(self):
        r = make_rect(1, 5, 1, 2)
        assert Seg(3, 1, 3, 2).intersects_rect_interior(r)
        assert not Seg(1, 0, 1, 8).intersects_rect_interior(r)  # on edge
        assert not Seg(0, 1, 8, 1).intersects_rect_interior(r)


class TestConstructX:
    @pytest.mark.parametrize("seed", range(12))
    def test_structure(self, seed):
        grid = build_grid(8, HALF)
        inst = gen_delta_large(6, 8, HALF, seed=seed, blocks_only=True)
        ref = greedy_ref(list(inst.items))
        X = construct_X(ref, grid)
        bound = 16 * int(1 / grid.delta) ** 2 + 4
        assert len(X) <= bound
        frame = set(frame_segments(8))
        for s in X:
            if s not in frame:
                assert s.length > grid.spacing
            for _, r in ref:
                assert not s.intersects_rect_interior(r)
        for i, s in enumerate(X):
            for t in X[i + 1:]:
                assert not s.crosses(t)

    def test_rejects_non_block_reference(self):
        grid = build_grid(8, HALF)
        with pytest.raises(ValueError):
            construct_X([(0, make_rect(0, 3, 0, 1))], grid)


class TestConstructY:
    def test_straight_walk(self):
        grid = build_grid(8, HALF)
        blk = (0, make_rect(1, 6, 3, 4, weight=5))
        X = list(frame_segments(8)) + [Seg(3, 4, 3, 8)]
        Y, sc, steps = construct_Y(X, [blk], grid, HALF, HALF)
        assert Y == [Seg(3, 4, 8, 4)] and sc == [] and steps == 1
        assert nicely_connected(X + Y) == []

    def test_walk_turns_at_second_block(self):
        grid = build_grid(8, HALF)
        b1 = (0, make_rect(1, 6, 3, 4, weight=5))
        b2 = (1, make_rect(6, 7, 2, 8, weight=4))
        X = list(frame_segments(8)) + [Seg(2, 4, 2, 8)]
        Y, sc, steps = construct_Y(X, [b1, b2], grid, HALF, HALF)
        assert Y == [Seg(2, 4, 6, 4), Seg(6, 4, 6, 8)]
        assert sc == [] and steps == 2
        assert nicely_connected(X + Y) == []

    def test_shortcut_when_budget_exhausted(self):
        grid = build_grid(8, HALF)
        b1 = (0, make_rect(1, 6, 3, 4, weight=5))
        b2 = (1, make_rect(6, 7, 2, 8, weight=4))
        X = list(frame_segments(8)) + [Seg(2, 4, 2, 8)]
        # step budget M = int(64 / (eps * delta^2)) == 1 forces a shortcut
        Y, sc, _ = construct_Y(X, [b1, b2], grid, Fraction(64), Fraction(1))
        assert sc == [Seg(4, 4, 4, 8)]
        assert nicely_connected(X + Y) == []

    def test_no_loose_ends_no_walk(self):
        grid = build_grid(8, HALF)
        X = list(frame_segments(8)) + [Seg(4, 0, 4, 8)]
        Y, sc, steps = construct_Y(X, [], grid, HALF, HALF)
        assert Y == [] and sc == [] and steps == 0

    def test_walk_off_nothing_raises(self):
        grid = build_grid(8, HALF)
        X = list(frame_segments(8)) + [Seg(3, 4, 3, 8)]
        with pytest.raises(BlocksError):
            construct_Y(X, [], grid, HALF, HALF)   # loose end, no block


class TestNicelyConnected:
    def test_frame_alone(self):
        assert nicely_connected(frame_segments(8)) == []

    def test_detects_loose_end(self):
        out = nicely_connected(frame_segments(8) + [Seg(3, 4, 3, 8)])
        assert any("loose" in v for v in out)

    def test_detects_crossing(self):
        zs = frame_segments(8) + [Seg(2, 0, 2, 8), Seg(0, 3, 8, 3)]
        out = nicely_connected(zs)
        assert any("cross" in v for v in out)

    def test_t_junctions_are_fine(self):
        zs = frame_segments(8) + [Seg(2, 0, 2, 8), Seg(2, 3, 8, 3)]
        assert nicely_connected(zs) == []


class TestCellsAndEdges:
    def test_rect_cells(self):
        assert rect_cells(make_rect(1, 3, 0, 1)) == {(1, 0), (2, 0)}

    def test_covered_edges_skips_frame_lines(self):
        es = covered_edges([Seg(0, 0, 0, 8), Seg(4, 0, 4, 2)], 8)
        assert es == {("v", 4, 0), ("v", 4, 1)}

    def test_hole_count(self):
        ring = frozenset([(0, 0), (1, 0), (2, 0), (0, 1), (2, 1),
                          (0, 2), (1, 2), (2, 2)])
        assert _hole_count(ring, 6) == 1
        assert _hole_count(ring - {(1, 2)}, 6) == 0

    def test_effective_ring_and_opening(self):
        ring = frozenset([(0, 0), (1, 0), (2, 0), (0, 1), (2, 1),
                          (0, 2), (1, 2), (2, 2)])
        assert _is_effective_ring(Region(ring), 6)
        opened = Region(ring, frozenset([("v", 1, 0)]))
        assert not _is_effective_ring(opened, 6)
        trail = frozenset([(0, 0), (1, 0), (2, 0)])
        assert not _is_effective_ring(Region(trail), 6)


class TestFaces:
    @pytest.mark.parametrize("seed", range(8))
    def test_partition_faces_classified(self, seed):
        grid = build_grid(8, HALF)
        inst = gen_delta_large(6, 8, HALF, seed=seed, blocks_only=True)
        ref = greedy_ref(list(inst.items))
        part = build_partition(ref, grid, Fraction(1, 8))
        faces = extract_faces(part.z, grid)
        n_cells = sum(len(f.cells) for f in faces)
        assert n_cells == 64     # faces tile the square
        for f in faces:
            holds = [i for i, r in ref if rect_cells(r) <= f.cells]
            if holds:
                assert f.kind in ("trail", "ring")


def random_trail(rng, n, k):
    """Connected hole-free set of at most k unit cells."""
    while True:
        c = (rng.randrange(n), rng.randrange(n))
        cells = {c}
        while len(cells) < k:
            i, j = c
            nbrs = [(i + di, j + dj)
                    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1))
                    if 0 <= i + di < n and 0 <= j + dj < n
                    and (i + di, j + dj) not in cells]
            if not nbrs:
                break
            c = rng.choice(nbrs)
            cells.add(c)
        if _hole_count(frozenset(cells), n) == 0:
            return frozenset(cells)


def straight_runs(cells, n):
    runs = []
    for (i, j) in cells:
        for size in range(1, n + 1):
            if all((i + t, j) in cells for t in range(size)):
                runs.append((i, i + size, j, j + 1))
            if all((i, j + t) in cells for t in range(size)):
                runs.append((i, i + 1, j, j + size))
    return runs


class TestTrailDP:
    def test_matches_brute_force(self):
        grid = build_grid(6, HALF)
        rng = random.Random(3)
        for _ in range(60):
            cells = random_trail(rng, 6, 8)
            cand = straight_runs(cells, 6)
            k = min(len(cand), rng.randint(1, 6))
            blocks = [(i, make_rect(*spec, weight=rng.randint(1, 9)))
                      for i, spec in enumerate(rng.sample(cand, k))]
            assert trail_value(cells, blocks, grid) == \
                _exact_rect_subset(blocks)[0]

    def test_ring_is_opened_exactly_here(self):
        grid = build_grid(6, HALF)
        cells = frozenset([(3, 0), (3, 1), (3, 2), (4, 0), (4, 2),
                           (5, 0), (5, 1), (5, 2)])
        blocks = [(0, make_rect(3, 4, 0, 2, weight=5)),
                  (1, make_rect(4, 6, 2, 3, weight=8)),
                  (2, make_rect(3, 4, 2, 3, weight=5)),
                  (3, make_rect(4, 5, 0, 1, weight=4)),
                  (4, make_rect(3, 6, 2, 3, weight=6))]
        w, ids = TrailDP(grid, blocks, HALF).value(Region(cells))
        assert (w, sorted(ids)) == (22, [0, 1, 2, 3])

    @given(seed=st.integers(0, 10 ** 6))
    @settings(max_examples=25, deadline=None)
    def test_ring_meets_guarantee(self, seed):
        grid = build_grid(6, HALF)
        rng = random.Random(seed)
        # any connected region qualifies: trails must come out exact and
        # rings within the (1 - eps) factor
        c = (rng.randrange(6), rng.randrange(6))
        cells = {c}
        while len(cells) < 12:
            i, j = c
            nbrs = [(i + di, j + dj)
                    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1))
                    if 0 <= i + di < 6 and 0 <= j + dj < 6
                    and (i + di, j + dj) not in cells]
            if not nbrs:
                break
            c = rng.choice(nbrs)
            cells.add(c)
        cells = frozenset(cells)
        cand = straight_runs(cells, 6)
        k = min(len(cand), rng.randint(1, 6))
        blocks = [(i, make_rect(*spec, weight=rng.randint(1, 9)))
                  for i, spec in enumerate(rng.sample(cand, k))]
        dp = trail_value(cells, blocks, grid)
        bf, _ = _exact_rect_subset(blocks)
        assert Fraction(dp) >= (1 - HALF) * bf

    def test_subset_cap(self):
        grid = build_grid(6, Fraction(1))
        cells = frozenset((i, j) for i in range(6) for j in range(6))
        blocks = [(i, make_rect(i % 6, i % 6 + 1, i // 6, i // 6 + 1,
                                weight=1)) for i in range(14)]
        dp = TrailDP(grid, blocks, HALF, max_subset=4)
        with pytest.raises(CapsExceeded):
            dp.value(Region(cells))


class TestVerifyPartition:
    @pytest.mark.parametrize("seed", range(6))
    def test_zero_violations_desk_scale(self, seed):
        grid = build_grid(40, Fraction(1, 4))
        inst = gen_delta_large(12, 40, Fraction(1, 4), seed=seed,
                               blocks_only=True)
        blocks = list(inst.items)
        _, ids = oracle_rects(blocks)
        ref = [b for b in blocks if b[0] in set(ids)]
        part = build_partition(ref, grid, Fraction(1, 8))
        rep = verify_partition(part, ref, HALF, Fraction(1, 4))
        assert rep["violations"] == []
        assert rep["x_size"] <= 16 * 16 + 4

    def test_reports_cut_weight(self):
        grid = build_grid(8, HALF)
        ref = [(0, make_rect(0, 8, 3, 4, weight=7))]
        part = build_partition(ref, grid, Fraction(1, 8))
        # force a violation by pretending a much lighter reference
        part.x_segments.append(Seg(0, 2, 8, 2))
        bad = verify_partition(part, [(0, make_rect(1, 7, 1, 3, weight=7))],
                               Fraction(1, 100), HALF)
        assert any("cut weight" in v for v in bad["violations"])


class TestSolveBlocks:
    def test_trivial_sizes(self):
        assert solve_blocks(8, HALF, HALF, []).weight == 0
        one = [(5, make_rect(0, 8, 3, 4, weight=9))]
        res = solve_blocks(8, HALF, HALF, one)
        assert res.chosen == (5,) and res.weight == 9

    def test_rejects_non_blocks(self):
        with pytest.raises(ValueError):
            solve_blocks(8, HALF, HALF, [(0, make_rect(0, 3, 0, 1))])
        with pytest.raises(ValueError):
            solve_blocks(8, Fraction(3, 2), HALF,
                         [(0, make_rect(0, 8, 0, 1))])

    def test_caps(self):
        blocks = [(0, make_rect(0, 16, 0, 1))]
        with pytest.raises(CapsExceeded):
            solve_blocks(16, HALF, HALF, blocks)
        with pytest.raises(CapsExceeded):
            solve_blocks(8, Fraction(1, 8), HALF,
                         [(0, make_rect(0, 8, 0, 1))])

    @pytest.mark.parametrize("seed", range(15))
    def test_guarantee_against_oracle(self, seed):
        inst = gen_delta_large(10, 8, HALF, seed=seed, blocks_only=True)
        blocks = list(inst.items)
        res = solve_blocks(8, HALF, HALF, blocks)
        w_opt, _ = oracle_rects(blocks)
        chosen = [r for i, r in blocks if i in set(res.chosen)]
        assert res.weight == sum(r.weight for r in chosen)
        for k, a in enumerate(chosen):
            for b in chosen[k + 1:]:
                assert not rects_interiors_intersect(a, b)
        assert Fraction(res.weight) >= (1 - HALF) * w_opt

    def test_deterministic(self):
        inst = gen_delta_large(8, 8, HALF, seed=2, blocks_only=True)
        blocks = list(inst.items)
        a = solve_blocks(8, HALF, HALF, blocks)
        b = solve_blocks(8, HALF, HALF, blocks)
        assert a == b


class TestSolveRectangles:
    def test_representative_block(self):
        g = build_grid(8, HALF)
        r = make_rect(0, 8, 2, 6, weight=3)
        b = representative_block(r, g)
        assert b.x1 == 0 and b.x2 == 8 and b.y2 - b.y1 == 1
        assert r.y1 <= b.y1 and b.y2 <= r.y2 and b.weight == 3
        tall = make_rect(2, 5, 0, 8, weight=4)
        b = representative_block(tall, g)
        assert b.y1 == 0 and b.y2 == 8 and b.x2 - b.x1 == 1

    def test_rejects_small_or_fractional(self):
        with pytest.raises(ValueError):
            solve_rectangles(8, HALF, HALF, [(0, make_rect(0, 4, 0, 3))])
        with pytest.raises(ValueError):
            solve_rectangles(8, HALF, HALF,
                             [(0, make_rect(0, 8, 0, Fraction(3, 2)))])

    def test_m_cap(self):
        blocks = [(i, make_rect(0, 8, i % 8, i % 8 + 1)) for i in range(13)]
        with pytest.raises(CapsExceeded):
            solve_rectangles(8, HALF, HALF, blocks)

    @pytest.mark.parametrize("seed", range(15))
    def test_guarantee_against_oracle(self, seed):
        inst = gen_delta_large(6, 8, HALF, seed=seed)
        rects = list(inst.items)
        res = solve_rectangles(8, HALF, HALF, rects)
        w_opt, _ = oracle_rects(rects)
        chosen = [r for i, r in rects if i in set(res.chosen)]
        assert res.weight == sum(r.weight for r in chosen)
        for k, a in enumerate(chosen):
            for b in chosen[k + 1:]:
                assert not rects_interiors_intersect(a, b)
        assert Fraction(res.weight) >= (1 - HALF) * w_opt
