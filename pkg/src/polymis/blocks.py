"""Partition-based approximation scheme for large axis-parallel rectangles.

All coordinates are integers inside the square [0, N]^2.  A *block* is a
delta-large rectangle of unit thickness.  The pipeline:

* build_grid       -- uniform grid of (1/delta)^2 tiles of side Delta = d*N.
* construct_X      -- initial segment set: frame + O(1) admissible segments
                      per cell edge, avoiding a reference independent set.
* construct_Y      -- connects loose ends by walks along block edges, with
                      minimum-weight shortcuts on grid edges when a walk
                      exceeds its step budget.
* extract_faces    -- faces of the square minus the segments, classified as
                      trail (narrow, no hole), ring (narrow, one hole), or
                      other.
* TrailDP          -- exact MWIS of blocks inside a trail, by recursive
                      splitting; rings are reduced to trails with a bounded
                      loss.
* solve_blocks     -- enumerates candidate partitions (one per maximal
                      independent set) and solves every face.
* solve_rectangles -- extension to general delta-large rectangles via a
                      representative block per rectangle.

Faces and DP regions are represented as sets of unit cells; a region may
additionally carry *blocked* unit edges (cuts), which is how ring cuts and
split paths are expressed without leaving integer arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .geom import Rect, rects_interiors_intersect

DEFAULT_CAP_N = 8
DEFAULT_CAP_INV_EPS_DELTA = 4


class BlocksError(RuntimeError):
    pass


class CapsExceeded(BlocksError):
    pass


# ---------------------------------------------------------------------------
# Grid and segments


@dataclass(frozen=True)
class Grid:
    n: int
    delta: Fraction
    spacing: int   # side length of a tile

    @property
    def per_side(self) -> int:
        return self.n // self.spacing

    def cells(self) -> list[tuple[int, int]]:
        k = self.per_side
        return [(i, j) for i in range(k) for j in range(k)]


def build_grid(n: int, delta) -> Grid:
    delta = Fraction(delta)
    if delta <= 0 or delta > 1:
        raise ValueError("delta in (0,1] required")
    if (1 / delta).denominator != 1 or (delta * n).denominator != 1:
        raise ValueError("parameters not grid-compatible: "
                         "1/delta and delta*n must be integers")
    return Grid(n, delta, int(delta * n))


@dataclass(frozen=True, order=True)
class Seg:
    """Axis-parallel closed segment with integer endpoints, normalized."""
    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        if not ((self.x1 == self.x2) ^ (self.y1 == self.y2)):
            raise ValueError("segment must be axis-parallel and non-degenerate")
        if (self.x1, self.y1) > (self.x2, self.y2):
            raise ValueError("segment endpoints must be sorted")

    @staticmethod
    def make(a: tuple[int, int], b: tuple[int, int]) -> "Seg":
        (x1, y1), (x2, y2) = sorted((tuple(a), tuple(b)))
        return Seg(x1, y1, x2, y2)

    @property
    def vertical(self) -> bool:
        return self.x1 == self.x2

    @property
    def length(self) -> int:
        return (self.x2 - self.x1) + (self.y2 - self.y1)

    def contains_point(self, p: tuple[int, int]) -> bool:
        x, y = p
        return self.x1 <= x <= self.x2 and self.y1 <= y <= self.y2

    def interior_contains(self, p: tuple[int, int]) -> bool:
        x, y = p
        if self.vertical:
            return x == self.x1 and self.y1 < y < self.y2
        return y == self.y1 and self.x1 < x < self.x2

    def crosses(self, other: "Seg") -> bool:
        """True when the two segments intersect in their interiors
        (collinear interior overlap included)."""
        if self.vertical == other.vertical:
            if self.vertical:
                return (self.x1 == other.x1
                        and max(self.y1, other.y1) < min(self.y2, other.y2))
            return (self.y1 == other.y1
                    and max(self.x1, other.x1) < min(self.x2, other.x2))
        v, h = (self, other) if self.vertical else (other, self)
        return (h.x1 < v.x1 < h.x2) and (v.y1 < h.y1 < v.y2)

    def cuts_rect(self, r: Rect) -> bool:
        """r minus the segment has two connected components."""
        if self.vertical:
            return (r.x1 < self.x1 < r.x2
                    and self.y1 <= r.y1 and r.y2 <= self.y2)
        return (r.y1 < self.y1 < r.y2
                and self.x1 <= r.x1 and r.x2 <= self.x2)

    def intersects_rect_interior(self, r: Rect) -> bool:
        if self.vertical:
            return (r.x1 < self.x1 < r.x2
                    and max(self.y1, r.y1) < min(self.y2, r.y2))
        return (r.y1 < self.y1 < r.y2
                and max(self.x1, r.x1) < min(self.x2, r.x2))


def frame_segments(n: int) -> list[Seg]:
    return [Seg(0, 0, 0, n), Seg(n, 0, n, n), Seg(0, 0, n, 0), Seg(0, n, n, n)]


def is_block(item: tuple[int, Rect], grid: Grid) -> bool:
    _, r = item
    if any(v.denominator != 1 for v in (r.x1, r.x2, r.y1, r.y2)):
        return False
    if not (0 <= r.x1 and r.x2 <= grid.n and 0 <= r.y1 and r.y2 <= grid.n):
        return False
    w, h = r.x2 - r.x1, r.y2 - r.y1
    return (h == 1 and w > grid.spacing) or (w == 1 and h > grid.spacing)


def is_delta_large(item: tuple[int, Rect], grid: Grid) -> bool:
    _, r = item
    return (r.x2 - r.x1 > grid.spacing) or (r.y2 - r.y1 > grid.spacing)


# ---------------------------------------------------------------------------
# Construction step I: the set X


def _maximal_at(coord: int, anchor: int, vertical: bool,
                blocks: Sequence[tuple[int, Rect]], existing: Sequence[Seg],
                n: int) -> Optional[tuple[int, int]]:
    """Maximal extent [lo, hi] of the axis-parallel segment at abscissa
    `coord` containing the point with cross-coordinate `anchor`, avoiding
    block interiors and not crossing existing segments.  Returns None when
    the anchor point lies inside a block."""
    lo, hi = 0, n
    for _, r in blocks:
        if vertical:
            inside, a, b = (r.x1 < coord < r.x2), int(r.y1), int(r.y2)
        else:
            inside, a, b = (r.y1 < coord < r.y2), int(r.x1), int(r.x2)
        if not inside:
            continue
        if a < anchor < b:
            return None
        if b <= anchor:
            lo = max(lo, b)
        else:
            hi = min(hi, a)
    for s in existing:
        if s.vertical != vertical:
            if vertical:
                c, lim = (s.y1, (s.x1, s.x2))
            else:
                c, lim = (s.x1, (s.y1, s.y2))
            if not (lim[0] < coord < lim[1]):
                continue
            # a perpendicular segment may be touched at an endpoint but the
            # interior must not pass through it
            if c < anchor:
                lo = max(lo, c)
            elif c > anchor:
                hi = min(hi, c)
            # c == anchor: segment may touch at the anchor from either side;
            # extension through it is a crossing
            else:
                return (anchor, anchor)
        else:
            same = (s.x1 == coord) if vertical else (s.y1 == coord)
            if not same:
                continue
            a, b = (s.y1, s.y2) if vertical else (s.x1, s.x2)
            if a < anchor < b:
                return None   # anchor inside a collinear segment: redundant
            if b <= anchor:
                lo = max(lo, b)
            else:
                hi = min(hi, a)
    return (lo, hi)


def construct_X(opt_blocks: Sequence[tuple[int, Rect]],
                grid: Grid) -> list[Seg]:
    """Frame plus the admissible segments of every cell edge.

    For each cell edge the admissible family consists of maximal long
    (> Delta) segments through the edge avoiding the reference blocks and
    not crossing segments added earlier; we keep the extreme two and the
    extremal reach segments.  All vertical passes run before all horizontal
    passes."""
    for it in opt_blocks:
        if not is_block(it, grid):
            raise ValueError("reference item %r is not a block" % (it[0],))
    n, d = grid.n, grid.spacing
    X: list[Seg] = list(frame_segments(n))
    for vertical in (True, False):
        for (ci, cj) in grid.cells():
            x0, y0 = ci * d, cj * d
            if vertical:
                edges = [(y0, 1), (y0 + d, -1)]     # bottom, top (dir into cell)
            else:
                edges = [(x0, 1), (x0 + d, -1)]     # left, right
            for anchor_line, into in edges:
                best: list[tuple[int, int, int]] = []   # (coord, lo, hi)
                span = range(x0, x0 + d + 1) if vertical \
                    else range(y0, y0 + d + 1)
                for coord in span:
                    ext = _maximal_at(coord, anchor_line, vertical,
                                      opt_blocks, X, n)
                    if ext is None:
                        continue
                    lo, hi = ext
                    if hi - lo <= d:
                        continue      # not long
                    # the interior must reach into the cell
                    if into > 0 and hi <= anchor_line:
                        continue
                    if into < 0 and lo >= anchor_line:
                        continue
                    best.append((coord, lo, hi))
                if not best:
                    continue
                cl, ch = (y0, y0 + d) if vertical else (x0, x0 + d)
                reach = {c: min(hi, ch) - max(lo, cl)
                         for c, lo, hi in best}
                rmax = max(reach.values())
                picks = {best[0], best[-1]}
                maximizers = [t for t in best if reach[t[0]] == rmax]
                picks.add(maximizers[0])
                picks.add(maximizers[-1])
                for coord, lo, hi in sorted(picks):
                    if vertical:
                        s = Seg(coord, lo, coord, hi)
                    else:
                        s = Seg(lo, coord, hi, coord)
                    if s not in X:
                        X.append(s)
    return X


# ---------------------------------------------------------------------------
# Construction step II: the set Y


@dataclass
class Partition:
    grid: Grid
    x_segments: list[Seg]
    y_segments: list[Seg]
    shortcuts: list[Seg]
    walk_steps: int = 0

    @property
    def z(self) -> list[Seg]:
        return self.x_segments + self.y_segments


def _hit_block(p: tuple[int, int], vertical_prev: bool,
               blocks: Sequence[tuple[int, Rect]]) -> Optional[Rect]:
    """Block whose long edge (perpendicular to the previous segment)
    contains p with p strictly inside its long-edge span."""
    x, y = p
    for _, r in blocks:
        if vertical_prev:
            if (y == r.y1 or y == r.y2) and r.x1 < x < r.x2:
                return r
        else:
            if (x == r.x1 or x == r.x2) and r.y1 < y < r.y2:
                return r
    return None


def _loose(p: tuple[int, int], seg: Seg, zs: Sequence[Seg]) -> bool:
    for t in zs:
        if t is seg or t == seg:
            continue
        if t.vertical != seg.vertical and t.contains_point(p):
            return False
    return True


def _grid_edges(grid: Grid) -> list[Seg]:
    n, d, k = grid.n, grid.spacing, grid.per_side
    out = []
    for a in range(k + 1):
        for b in range(k):
            out.append(Seg(a * d, b * d, a * d, (b + 1) * d))     # vertical
            out.append(Seg(b * d, a * d, (b + 1) * d, a * d))     # horizontal
    return out


def _shortcut_candidates(grid: Grid, zs: Sequence[Seg],
                         path: Sequence[Seg]) -> list[Seg]:
    """Maximal sub-segments of grid edges between consecutive contacts with
    existing segments, one endpoint on the walk and the other on any
    segment, crossing nothing."""
    every = list(zs) + list(path)
    out = []
    for e in _grid_edges(grid):
        marks: list[tuple[int, bool]] = []   # (position along e, on-path)
        covered: list[tuple[int, int]] = []
        for s in every:
            on_path = any(s == q for q in path)
            if s.vertical == e.vertical:
                same_line = (s.x1 == e.x1) if e.vertical else (s.y1 == e.y1)
                if same_line:
                    if e.vertical:
                        a, b = max(s.y1, e.y1), min(s.y2, e.y2)
                    else:
                        a, b = max(s.x1, e.x1), min(s.x2, e.x2)
                    if a < b:
                        covered.append((a, b))
                continue
            if e.vertical:
                touches = s.x1 <= e.x1 <= s.x2 and e.y1 <= s.y1 <= e.y2
                pos = s.y1
            else:
                touches = s.y1 <= e.y1 <= s.y2 and e.x1 <= s.x1 <= e.x2
                pos = s.x1
            if touches:
                marks.append((pos, on_path))
        marks.sort()
        for (a, pa), (b, pb) in zip(marks, marks[1:]):
            if b <= a or not (pa or pb):
                continue
            if any(ca < b and a < cb for ca, cb in covered):
                continue
            if e.vertical:
                out.append(Seg(e.x1, a, e.x1, b))
            else:
                out.append(Seg(a, e.y1, b, e.y1))
    return out


def construct_Y(x_segments: Sequence[Seg],
                opt_blocks: Sequence[tuple[int, Rect]], grid: Grid,
                eps, delta) -> tuple[list[Seg], list[Seg], int]:
    """Walks from every loose end of X along block edges until an existing
    segment is hit; overly long walks are closed by a minimum-weight
    shortcut on a grid edge.  Returns (Y, shortcuts, total walk steps)."""
    eps = Fraction(eps)
    delta = Fraction(delta)
    M = int(64 / (eps * delta ** 2))
    n = grid.n
    X = list(x_segments)
    Y: list[Seg] = []
    shortcuts: list[Seg] = []
    steps_total = 0

    ends = []
    for idx, s in enumerate(X[4:], start=4):
        for p in ((s.x1, s.y1), (s.x2, s.y2)):
            ends.append((p, idx))
    ends.sort(key=lambda t: (t[0][0], t[0][1], t[1]))

    for p0, idx in ends:
        seg0 = X[idx]
        if not _loose(p0, seg0, X + Y):
            continue
        path: list[Seg] = []
        p_prev, s_prev = p0, seg0
        done = False
        for _ in range(M):
            steps_total += 1
            blk = _hit_block(p_prev, s_prev.vertical, opt_blocks)
            if blk is None:
                raise BlocksError("walk invariant violated at %r" % (p_prev,))
            # the maximal segment containing the block edge through p_prev
            vertical_new = not s_prev.vertical
            anchor = p_prev[1] if vertical_new else p_prev[0]
            coord = p_prev[0] if vertical_new else p_prev[1]
            ext = _maximal_at(coord, anchor, vertical_new, opt_blocks,
                              X + Y + path, n)
            if ext is None:
                raise BlocksError("walk stepped inside a segment")
            lo, hi = ext
            # march towards the far end of the hit block
            if vertical_new:
                far_up = (blk.y2 - p_prev[1]) >= (p_prev[1] - blk.y1)
                p_new = (coord, hi) if far_up else (coord, lo)
            else:
                far_right = (blk.x2 - p_prev[0]) >= (p_prev[0] - blk.x1)
                p_new = (hi, coord) if far_right else (lo, coord)
            if p_new == p_prev:
                # blocked immediately; go the other way
                p_new = ((coord, lo) if p_new[1] == hi else (coord, hi)) \
                    if vertical_new else \
                    ((lo, coord) if p_new[0] == hi else (hi, coord))
            if p_new == p_prev:
                raise BlocksError("walk invariant violated at %r" % (p_prev,))
            s_new = Seg.make(p_prev, p_new)
            # case A: the new segment swallows an existing one
            swallowed = None
            for s in Y + path:
                if s != s_new and s.vertical == s_new.vertical \
                        and s_new.crosses(s):
                    swallowed = s
                    break
            if swallowed is not None:
                if swallowed in Y:
                    Y.remove(swallowed)
                keep = [q for q in path if q != swallowed]
                Y.extend(keep + [s_new])
                done = True
                break
            path.append(s_new)
            # case B: the far endpoint touches a perpendicular segment
            hit = any(t.vertical != s_new.vertical and t.contains_point(p_new)
                      for t in X + Y + path[:-1])
            if hit:
                Y.extend(path)
                done = True
                break
            p_prev, s_prev = p_new, s_new
        if done:
            continue
        # shortcut
        cands = _shortcut_candidates(grid, X + Y, path)
        if not cands:
            raise BlocksError("no shortcut candidate for walk from %r" % (p0,))
        weighted = []
        for c in cands:
            w = sum(wt for _, wt in
                    ((it[0], it[1].weight) for it in opt_blocks
                     if c.cuts_rect(it[1])))
            weighted.append((w, c))
        weighted.sort(key=lambda t: (t[0], t[1]))
        wbest, cut = weighted[0]
        # trim the last path segment at the shortcut contact when collinear
        q = (cut.x1, cut.y1) if any(s.contains_point((cut.x1, cut.y1))
                                    for s in path) else (cut.x2, cut.y2)
        trimmed = []
        for s in path:
            if s.vertical != cut.vertical and s.contains_point(q) \
                    and s is path[-1]:
                a = (s.x1, s.y1)
                b = (s.x2, s.y2)
                end = a if (abs(a[0] - q[0]) + abs(a[1] - q[1])
                            < abs(b[0] - q[0]) + abs(b[1] - q[1])) else b
                start = b if end == a else a
                if q != start:
                    trimmed.append(Seg.make(start, q))
            else:
                trimmed.append(s)
        Y.extend(trimmed + [cut])
        shortcuts.append(cut)
    return Y, shortcuts, steps_total


def build_partition(opt_blocks: Sequence[tuple[int, Rect]], grid: Grid,
                    eps) -> Partition:
    X = construct_X(opt_blocks, grid)
    Y, shortcuts, steps = construct_Y(X, opt_blocks, grid, eps, grid.delta)
    return Partition(grid, X, Y, shortcuts, steps)


def nicely_connected(zs: Sequence[Seg]) -> list[str]:
    """Violation messages; empty when the segment set is nicely connected."""
    out = []
    for i, s in enumerate(zs):
        for t in zs[i + 1:]:
            if s.crosses(t):
                out.append("segments %r and %r cross" % (s, t))
    for s in zs:
        for p in ((s.x1, s.y1), (s.x2, s.y2)):
            ok = any(t.vertical != s.vertical and t.contains_point(p)
                     for t in zs if t != s)
            if not ok:
                out.append("endpoint %r of %r is loose" % (p, s))
    return out


# ---------------------------------------------------------------------------
# Faces as unit-cell regions

Cell = tuple[int, int]
Edge = tuple[str, int, int]     # ("v", x, j): between (x-1,j),(x,j)
                                # ("h", y, i): between (i,y-1),(i,y)


def covered_edges(zs: Iterable[Seg], n: int) -> frozenset[Edge]:
    out = set()
    for s in zs:
        if s.vertical:
            if 0 < s.x1 < n:
                for j in range(s.y1, s.y2):
                    out.add(("v", s.x1, j))
        else:
            if 0 < s.y1 < n:
                for i in range(s.x1, s.x2):
                    out.add(("h", s.y1, i))
    return frozenset(out)


def _neighbors(c: Cell, n: int, blocked: frozenset[Edge]):
    i, j = c
    if i > 0 and ("v", i, j) not in blocked:
        yield (i - 1, j)
    if i < n - 1 and ("v", i + 1, j) not in blocked:
        yield (i + 1, j)
    if j > 0 and ("h", j, i) not in blocked:
        yield (i, j - 1)
    if j < n - 1 and ("h", j + 1, i) not in blocked:
        yield (i, j + 1)


def _components(cells: set[Cell], n: int,
                blocked: frozenset[Edge]) -> list[frozenset[Cell]]:
    left = set(cells)
    comps = []
    while left:
        seed = min(left)
        stack, comp = [seed], {seed}
        left.discard(seed)
        while stack:
            c = stack.pop()
            for nb in _neighbors(c, n, blocked):
                if nb in left:
                    left.discard(nb)
                    comp.add(nb)
                    stack.append(nb)
        comps.append(frozenset(comp))
    return comps


def rect_cells(r: Rect) -> frozenset[Cell]:
    return frozenset((i, j) for i in range(int(r.x1), int(r.x2))
                     for j in range(int(r.y1), int(r.y2)))


def _hole_count(cells: frozenset[Cell], n: int) -> int:
    outside = {(i, j) for i in range(n) for j in range(n)} - set(cells)
    holes = 0
    for comp in _components(outside, n, frozenset()):
        if any(i in (0, n - 1) or j in (0, n - 1) for i, j in comp):
            continue
        # enclosed by this face only if every outward neighbor is in it
        ring = set()
        for (i, j) in comp:
            for nb in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if nb not in comp and 0 <= nb[0] < n and 0 <= nb[1] < n:
                    ring.add(nb)
        if ring <= set(cells):
            holes += 1
    return holes


def _vertex_count(cells: frozenset[Cell]) -> int:
    corners = 0
    pts = set()
    for (i, j) in cells:
        pts.update([(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)])
    for (x, y) in pts:
        around = [(x - 1, y - 1), (x, y - 1), (x - 1, y), (x, y)]
        k = sum(1 for c in around if c in cells)
        if k in (1, 3):
            corners += 1
        elif k == 2:
            a = (x - 1, y - 1) in cells
            b = (x, y) in cells
            if a == b:      # diagonal pinch: two corners meet
                corners += 2
    return corners


def _is_l_or_rect(comp: frozenset[Cell]) -> bool:
    xs = [i for i, _ in comp]
    ys = [j for _, j in comp]
    w = max(xs) - min(xs) + 1
    h = max(ys) - min(ys) + 1
    if len(comp) == w * h:
        return True
    # L-shape: bounding box minus one corner rectangle
    box = {(i, j) for i in range(min(xs), max(xs) + 1)
           for j in range(min(ys), max(ys) + 1)}
    miss = box - set(comp)
    mx = [i for i, _ in miss]
    my = [j for _, j in miss]
    mw = max(mx) - min(mx) + 1
    mh = max(my) - min(my) + 1
    if len(miss) != mw * mh:
        return False
    corners = {(min(xs), min(ys)), (min(xs), max(ys)),
               (max(xs), min(ys)), (max(xs), max(ys))}
    return bool(corners & {(i, j) for i in (min(mx), max(mx))
                           for j in (min(my), max(my))}
                and ((min(mx), min(my)) in
                     {(min(xs), min(ys)), (min(xs), max(ys) - mh + 1),
                      (max(xs) - mw + 1, min(ys)),
                      (max(xs) - mw + 1, max(ys) - mh + 1)}))


def _narrow_violations(cells: frozenset[Cell], grid: Grid,
                       blocked: frozenset[Edge] = frozenset()) -> list[str]:
    n, d = grid.n, grid.spacing
    out = []
    for a in range(1, grid.per_side):
        for b in range(1, grid.per_side):
            x, y = a * d, b * d
            around = [(x - 1, y - 1), (x, y - 1), (x - 1, y), (x, y)]
            if all(c in cells for c in around):
                out.append("grid vertex (%d,%d) interior" % (x, y))

    def continues(comp, edge_cells, across, edge):
        # the face extends past this cell edge only if some unit edge on it
        # is open and has face cells on both sides
        return any(c in comp and across(c) in cells and edge(c) not in blocked
                   for c in edge_cells)

    for (ci, cj) in grid.cells():
        tile = {(i, j) for i in range(ci * d, (ci + 1) * d)
                for j in range(cj * d, (cj + 1) * d)} & set(cells)
        if not tile:
            continue
        for comp in _components(tile, n, frozenset()):
            if not _is_l_or_rect(comp):
                out.append("component in cell (%d,%d) is not a rectangle "
                           "or L-shape" % (ci, cj))
            x0, x1 = ci * d, (ci + 1) * d
            y0, y1 = cj * d, (cj + 1) * d
            touched = 0
            touched += continues(comp, [(x0, j) for j in range(y0, y1)],
                                 lambda c: (c[0] - 1, c[1]),
                                 lambda c: ("v", c[0], c[1]))
            touched += continues(comp, [(x1 - 1, j) for j in range(y0, y1)],
                                 lambda c: (c[0] + 1, c[1]),
                                 lambda c: ("v", c[0] + 1, c[1]))
            touched += continues(comp, [(i, y0) for i in range(x0, x1)],
                                 lambda c: (c[0], c[1] - 1),
                                 lambda c: ("h", c[1], c[0]))
            touched += continues(comp, [(i, y1 - 1) for i in range(x0, x1)],
                                 lambda c: (c[0], c[1] + 1),
                                 lambda c: ("h", c[1] + 1, c[0]))
            if touched > 2:
                out.append("component in cell (%d,%d) touches %d cell edges"
                           % (ci, cj, touched))
    return out


@dataclass(frozen=True)
class Face:
    cells: frozenset[Cell]
    holes: int
    kind: str            # "trail" | "ring" | "other"
    narrow: bool
    vertices: int


def extract_faces(zs: Sequence[Seg], grid: Grid) -> list[Face]:
    n = grid.n
    blocked = covered_edges(zs, n)
    every = {(i, j) for i in range(n) for j in range(n)}
    faces = []
    for comp in sorted(_components(every, n, blocked), key=min):
        holes = _hole_count(comp, n)
        narrow = not _narrow_violations(comp, grid, blocked)
        if narrow and holes == 0:
            kind = "trail"
        elif narrow and holes == 1:
            kind = "ring"
        else:
            kind = "other"
        faces.append(Face(comp, holes, kind, narrow, _vertex_count(comp)))
    return faces


# ---------------------------------------------------------------------------
# Regions (cells + cut edges) and the trail/ring solver


@dataclass(frozen=True)
class Region:
    cells: frozenset[Cell]
    blocked: frozenset[Edge] = frozenset()

    def key(self) -> tuple:
        return (tuple(sorted(self.cells)), tuple(sorted(self.blocked)))


def _region_contains(region: Region, r: Rect) -> bool:
    rc = rect_cells(r)
    if not rc <= region.cells:
        return False
    # a blocked edge strictly inside the rectangle cuts it
    for e in region.blocked:
        kind, c, o = e
        if kind == "v":
            if r.x1 < c < r.x2 and r.y1 <= o and o + 1 <= r.y2:
                return False
        else:
            if r.y1 < c < r.y2 and r.x1 <= o and o + 1 <= r.x2:
                return False
    return True


def _chords(region: Region, n: int) -> list[tuple[Seg, frozenset[Edge]]]:
    """Maximal straight chords through the region interior, as (segment,
    unit edges it covers)."""
    cells = region.cells
    out = []
    for x in range(n + 1):
        runs: list[list[int]] = []
        for j in range(n):
            open_here = ((x - 1, j) in cells and (x, j) in cells
                         and ("v", x, j) not in region.blocked)
            if open_here:
                if runs and runs[-1][-1] == j - 1:
                    runs[-1].append(j)
                else:
                    runs.append([j])
        for run in runs:
            es = frozenset(("v", x, j) for j in run)
            out.append((Seg(x, run[0], x, run[-1] + 1), es))
    for y in range(n + 1):
        runs = []
        for i in range(n):
            open_here = ((i, y - 1) in cells and (i, y) in cells
                         and ("h", y, i) not in region.blocked)
            if open_here:
                if runs and runs[-1][-1] == i - 1:
                    runs[-1].append(i)
                else:
                    runs.append([i])
        for run in runs:
            es = frozenset(("h", y, i) for i in run)
            out.append((Seg(run[0], y, run[-1] + 1, y), es))
    return out


def _split_by_edges(region: Region, cut: frozenset[Edge],
                    n: int) -> list[Region]:
    blocked = region.blocked | cut
    comps = _components(set(region.cells), n, blocked)
    return [Region(c, frozenset(e for e in blocked if _edge_in(e, c)))
            for c in comps]


def _edge_in(e: Edge, cells: frozenset[Cell]) -> bool:
    kind, c, o = e
    if kind == "v":
        return (c - 1, o) in cells or (c, o) in cells
    return (o, c - 1) in cells or (o, c) in cells


def _enclosed_holes(cells: frozenset[Cell], n: int) -> list[frozenset[Cell]]:
    outside = {(i, j) for i in range(n) for j in range(n)} - set(cells)
    out = []
    for comp in _components(outside, n, frozenset()):
        if any(i in (0, n - 1) or j in (0, n - 1) for i, j in comp):
            continue
        ring = set()
        for (i, j) in comp:
            for nb in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if nb not in comp and 0 <= nb[0] < n and 0 <= nb[1] < n:
                    ring.add(nb)
        if ring <= set(cells):
            out.append(comp)
    return out


def _is_effective_ring(region: Region, n: int) -> bool:
    """True when some cycle of the region still winds around a hole.

    Cut edges have zero width, so the cell set alone cannot tell an opened
    ring from a closed one; a two-sheet search that flips parity whenever a
    path crosses a vertical ray shot upward from the hole detects a winding
    cycle exactly."""
    for hole in _enclosed_holes(region.cells, n):
        # ray from the hole's interior straight up along the vertical line
        # x = hx + 1; a move crosses it exactly when it passes through one
        # of the vertical unit edges ("v", hx + 1, j) above the hole cell
        hx, hy = min(hole)
        ray = {("v", hx + 1, j) for j in range(hy + 1, n)}
        start = min(region.cells)
        seen = {(start, 0)}
        stack = [(start, 0)]
        winds = False
        while stack and not winds:
            c, par = stack.pop()
            i, j = c
            moves = []
            if i > 0 and ("v", i, j) not in region.blocked:
                moves.append(((i - 1, j), ("v", i, j)))
            if i < n - 1 and ("v", i + 1, j) not in region.blocked:
                moves.append(((i + 1, j), ("v", i + 1, j)))
            if j > 0 and ("h", j, i) not in region.blocked:
                moves.append(((i, j - 1), None))
            if j < n - 1 and ("h", j + 1, i) not in region.blocked:
                moves.append(((i, j + 1), None))
            for nb, crossed in moves:
                if nb not in region.cells:
                    continue
                npar = par ^ (1 if crossed in ray else 0)
                if (nb, npar) not in seen:
                    seen.add((nb, npar))
                    stack.append((nb, npar))
                if (nb, npar ^ 1) in seen:
                    winds = True
                    break
        if winds:
            return True
    return False


def _ray_walk_split(region: Region, avoid: Sequence[tuple[int, Rect]],
                    n: int, open_ring: bool = False) -> Optional[list[Region]]:
    """Split the region along a rectilinear path that starts on the
    boundary and turns along edges of the `avoid` blocks.  Returns the
    resulting regions, or None when no start point produces a valid
    split.  With `open_ring` a cut that leaves one connected piece is
    accepted as long as it breaks the winding around a hole (a path from
    the outer boundary to a hole turns a ring into a trail)."""
    cells = region.cells
    avoid_cells = [(rect_cells(r), r) for _, r in avoid]

    def edge_open(p, d) -> bool:
        (x, y) = p
        dx, dy = d
        if dx:      # horizontal move along y-line: cells above/below
            i = x if dx > 0 else x - 1
            up, dn = (i, y), (i, y - 1)
            blocked = ("h", y, i) if 0 < y < n else None
        else:
            j = y if dy > 0 else y - 1
            up, dn = (x, j), (x - 1, j)
            blocked = ("v", x, j) if 0 < x < n else None
        if blocked and blocked in region.blocked:
            return False
        return up in cells and dn in cells

    def in_block(p, d) -> Optional[Rect]:
        (x, y) = p
        dx, dy = d
        for rc, r in avoid_cells:
            if dx:
                i = x if dx > 0 else x - 1
                if r.y1 < y < r.y2 and r.x1 <= i and i + 1 <= r.x2:
                    return r
            else:
                j = y if dy > 0 else y - 1
                if r.x1 < x < r.x2 and r.y1 <= j and j + 1 <= r.y2:
                    return r
        return None

    # candidate starts: boundary lattice points with an inward direction
    pts = set()
    for (i, j) in cells:
        pts.update([(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)])
    starts = []
    for p in sorted(pts):
        for d in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            back = (-d[0], -d[1])
            if edge_open(p, d) and not edge_open(p, back):
                starts.append((p, d))
    for p0, d0 in starts:
        p, d = p0, d0
        path: set[Edge] = set()
        seen = set()
        ok = True
        for _ in range(8 * n * n):
            if (p, d) in seen:
                ok = False
                break
            seen.add((p, d))
            if not edge_open(p, d):
                break       # reached the boundary
            blk = in_block(p, d)
            if blk is not None:
                # turn along the near edge of the blocking rectangle
                turned = False
                for nd in (((0, 1), (0, -1)) if d[0] else ((1, 0), (-1, 0))):
                    if edge_open(p, nd) and in_block(p, nd) is None:
                        d = nd
                        turned = True
                        break
                if not turned:
                    ok = False
                    break
                continue
            # advance one unit
            x, y = p
            if d[0]:
                e = ("h", y, x if d[0] > 0 else x - 1)
            else:
                e = ("v", x, y if d[1] > 0 else y - 1)
            if 0 < (y if d[0] else x) < n:
                path.add(e)
            p = (x + d[0], y + d[1])
        if not ok or not path:
            continue
        parts = _split_by_edges(region, frozenset(path), n)
        if len(parts) < 2 and not (open_ring and parts
                                   and not _is_effective_ring(parts[0], n)):
            continue
        # no avoid-block may be cut
        if any(not any(_region_contains(q, r) for q in parts)
               for _, r in avoid):
            continue
        return parts
    return None


def trail_split(region: Region, blocks_inside: Sequence[tuple[int, Rect]],
                n: int) -> list[Region]:
    """Two sub-regions covering the trail with every given block intact."""
    if len(blocks_inside) < 2:
        raise ValueError("need at least two blocks to split between")
    for seg, es in _chords(region, n):
        if any(seg.intersects_rect_interior(r) for _, r in blocks_inside):
            continue
        parts = _split_by_edges(region, es, n)
        if len(parts) == 2 \
                and all(any(_region_contains(q, r) for q in parts)
                        for _, r in blocks_inside):
            return parts
    parts = _ray_walk_split(region, blocks_inside, n)
    if parts is None:
        raise BlocksError("trail split failed")
    return parts


def ring_split(region: Region, blocks_inside: Sequence[tuple[int, Rect]],
               eps, grid: Grid) -> list[Region]:
    """Open the ring: a clean grid-edge cut when one exists, otherwise a
    ray-walk, otherwise a minimum-weight ladder of cuts."""
    eps = Fraction(eps)
    n, d = grid.n, grid.spacing
    # case (A): a grid-edge piece free of the given blocks
    for seg, es in _chords(region, n):
        on_grid = (seg.vertical and seg.x1 % d == 0) or \
            (not seg.vertical and seg.y1 % d == 0)
        if not on_grid:
            continue
        if any(seg.intersects_rect_interior(r) for _, r in blocks_inside):
            continue
        parts = _split_by_edges(region, es, n)
        if len(parts) > 1 or (parts
                              and not _is_effective_ring(parts[0], n)):
            return parts
    # case (B): ray walk
    parts = _ray_walk_split(region, blocks_inside, n, open_ring=True)
    if parts is not None:
        return parts
    # case (C): ladder of grid-edge cuts, minimum weight among t offsets
    t = max(1, int(-(-8 // eps)))
    cuts = []
    for seg, es in _chords(region, n):
        on_grid = (seg.vertical and seg.x1 % d == 0) or \
            (not seg.vertical and seg.y1 % d == 0)
        if on_grid:
            w = sum(r.weight for _, r in blocks_inside
                    if seg.intersects_rect_interior(r))
            cuts.append((w, seg, es))
    if not cuts:
        raise BlocksError("ring split found no grid-edge cuts")
    ladders = []
    for off in range(min(t, len(cuts))):
        chosen = cuts[off::t]
        ladders.append((sum(w for w, _, _ in chosen), off, chosen))
    ladders.sort(key=lambda x: (x[0], x[1]))
    _, _, chosen = ladders[0]
    es = frozenset(e for _, _, ees in chosen for e in ees)
    return _split_by_edges(region, es, grid.n)


class TrailDP:
    """Exact MWIS of blocks inside trails; (1-eps)-approximation inside
    rings.  Memoized on the region's canonical encoding."""

    def __init__(self, grid: Grid, blocks: Sequence[tuple[int, Rect]],
                 eps, max_subset: int = 12):
        self.grid = grid
        self.blocks = list(blocks)
        self.eps = Fraction(eps)
        self.max_subset = max_subset
        self.memo: dict[tuple, tuple[int, frozenset[int]]] = {}

    def _contained(self, region: Region) -> list[tuple[int, Rect]]:
        return [(i, r) for i, r in self.blocks
                if _region_contains(region, r)]

    def value(self, region: Region) -> tuple[int, frozenset[int]]:
        key = region.key()
        if key in self.memo:
            return self.memo[key]
        inside = self._contained(region)
        if len(inside) <= 1:
            out = (inside[0][1].weight, frozenset([inside[0][0]])) \
                if inside else (0, frozenset())
            self.memo[key] = out
            return out
        if len(inside) > self.max_subset:
            raise CapsExceeded(
                "region holds %d blocks; subset enumeration capped at %d "
                "(state space 2^%d)" % (len(inside), self.max_subset,
                                        len(inside)))
        self.memo[key] = max(
            (r.weight, frozenset([i])) for i, r in inside)   # provisional
        best = self.memo[key]
        n = self.grid.n
        is_ring = _is_effective_ring(region, n)
        for size in range(2, len(inside) + 1):
            for combo in itertools.combinations(inside, size):
                if any(rects_interiors_intersect(a[1], b[1])
                       for a, b in itertools.combinations(combo, 2)):
                    continue
                try:
                    if is_ring:
                        parts = ring_split(region, combo, self.eps, self.grid)
                    else:
                        parts = trail_split(region, combo, n)
                except BlocksError:
                    continue
                if len(parts) == 1 and parts[0].key() == key:
                    continue
                w, ids = 0, frozenset()
                for q in parts:
                    qw, qids = self.value(q)
                    w += qw
                    ids |= qids
                if w > best[0] or (w == best[0] and sorted(ids)
                                   < sorted(best[1])):
                    best = (w, ids)
        self.memo[key] = best
        return best


def trail_value(cells: Iterable[Cell], blocks: Sequence[tuple[int, Rect]],
                grid: Grid, eps=Fraction(1, 2)) -> int:
    dp = TrailDP(grid, blocks, eps)
    return dp.value(Region(frozenset(cells)))[0]


# ---------------------------------------------------------------------------
# Verification report


def verify_partition(part: Partition, reference: Sequence[tuple[int, Rect]],
                     eps, delta) -> dict:
    eps = Fraction(eps)
    grid = part.grid
    violations: list[str] = []
    bound = 16 * int(1 / grid.delta) ** 2 + 4
    if len(part.x_segments) > bound:
        violations.append("|X| = %d exceeds %d" % (len(part.x_segments),
                                                   bound))
    violations += nicely_connected(part.z)
    d = grid.spacing
    for s in part.shortcuts:
        if s.vertical:
            ok = s.x1 % d == 0 and s.y1 // d == (s.y2 - 1) // d \
                and s.y2 - s.y1 <= d
        else:
            ok = s.y1 % d == 0 and s.x1 // d == (s.x2 - 1) // d \
                and s.x2 - s.x1 <= d
        if not ok:
            violations.append("shortcut %r leaves its grid edge" % (s,))
    ref_w = sum(r.weight for _, r in reference)
    cut_w = sum(r.weight for i, r in reference
                if any(s.intersects_rect_interior(r) for s in part.z))
    if cut_w > eps * ref_w:
        violations.append("cut weight %d exceeds eps * %d" % (cut_w, ref_w))
    faces = extract_faces(part.z, grid)
    for f in faces:
        holds = [i for i, r in reference if rect_cells(r) <= f.cells]
        if holds and f.kind not in ("trail", "ring"):
            violations.append(
                "face with blocks %r is neither trail nor ring" % (holds,))
    return {
        "x_size": len(part.x_segments),
        "y_size": len(part.y_segments),
        "shortcuts": len(part.shortcuts),
        "cut_weight": cut_w,
        "reference_weight": ref_w,
        "faces": len(faces),
        "violations": violations,
    }


# ---------------------------------------------------------------------------
# The approximation algorithms


def _maximal_independent_sets(items: Sequence[tuple[int, Rect]]
                              ) -> list[list[tuple[int, Rect]]]:
    n = len(items)
    conflict = [[rects_interiors_intersect(items[a][1], items[b][1])
                 for b in range(n)] for a in range(n)]
    out: list[list[int]] = []

    def rec(idx: int, chosen: list[int]):
        if idx == n:
            if all(any(conflict[k][c] for c in chosen)
                   for k in range(n) if k not in chosen):
                out.append(list(chosen))
            return
        if not any(conflict[idx][c] for c in chosen):
            chosen.append(idx)
            rec(idx + 1, chosen)
            chosen.pop()
            rec(idx + 1, chosen)
        else:
            rec(idx + 1, chosen)

    rec(0, [])
    dedup = {tuple(sorted(c)) for c in out}
    return [[items[i] for i in c] for c in sorted(dedup)]


@dataclass(frozen=True)
class BlocksResult:
    chosen: tuple[int, ...]
    weight: int
    candidates: int
    report: dict = field(default_factory=dict)


def _check_caps(grid: Grid, eps: Fraction, cap_n: int, cap_r: int):
    inv = 1 / (eps * grid.delta)
    if grid.n > cap_n or inv > cap_r:
        raise CapsExceeded(
            "full enumeration requires N <= %d and 1/(eps*delta) <= %d "
            "(got N=%d, 1/(eps*delta)=%s; estimated state space "
            "N^(1/(eps*delta))^2 ~ %d^%d)"
            % (cap_n, cap_r, grid.n, inv, grid.n, int(inv) ** 2))


def solve_blocks(n: int, eps, delta, blocks: Sequence[tuple[int, Rect]],
                 cap_n: int = DEFAULT_CAP_N,
                 cap_r: int = DEFAULT_CAP_INV_EPS_DELTA) -> BlocksResult:
    """(1-eps)-approximate MWIS of blocks by enumerating one candidate
    partition per maximal independent set and solving each face."""
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise ValueError("eps in (0,1) required")
    grid = build_grid(n, delta)
    for it in blocks:
        if not is_block(it, grid):
            raise ValueError("item %r is not a block" % (it[0],))
    _check_caps(grid, eps, cap_n, cap_r)
    if not blocks:
        return BlocksResult((), 0, 0)
    if len(blocks) == 1:
        return BlocksResult((blocks[0][0],), blocks[0][1].weight, 1)
    eps_in = eps / 4
    best = (0, ())
    cands = _maximal_independent_sets(blocks)
    for ref in cands:
        try:
            part = build_partition(ref, grid, eps_in)
            faces = extract_faces(part.z, grid)
        except BlocksError:
            continue
        dp = TrailDP(grid, blocks, eps_in)
        total, ids = 0, []
        feasible = True
        for f in faces:
            if f.kind == "other":
                continue
            try:
                w, chosen = dp.value(Region(f.cells))
            except (BlocksError, CapsExceeded):
                feasible = False
                break
            total += w
            ids.extend(sorted(chosen))
        if not feasible:
            continue
        if total > best[0] or (total == best[0]
                               and tuple(sorted(ids)) < best[1]):
            best = (total, tuple(sorted(ids)))
    # greedy safety net: never return worse than the heaviest block
    heaviest = max(blocks, key=lambda it: (it[1].weight, -it[0]))
    if heaviest[1].weight > best[0]:
        best = (heaviest[1].weight, (heaviest[0],))
    chosen_rects = [r for i, r in blocks if i in set(best[1])]
    for a, b in itertools.combinations(chosen_rects, 2):
        if rects_interiors_intersect(a, b):
            raise BlocksError("internal error: output is not independent")
    return BlocksResult(best[1], best[0], len(cands))


def representative_block(r: Rect, grid: Grid) -> Rect:
    """Unit-thickness strip inside r, parallel to its longer side."""
    if r.x2 - r.x1 >= r.y2 - r.y1:
        yc = int(r.y1) + (int(r.y2) - int(r.y1)) // 2
        return Rect(r.x1, r.x2, Fraction(yc), Fraction(yc + 1), r.weight)
    xc = int(r.x1) + (int(r.x2) - int(r.x1)) // 2
    return Rect(Fraction(xc), Fraction(xc + 1), r.y1, r.y2, r.weight)


def solve_rectangles(n: int, eps, delta,
                     rects: Sequence[tuple[int, Rect]],
                     cap_n: int = DEFAULT_CAP_N,
                     cap_r: int = DEFAULT_CAP_INV_EPS_DELTA,
                     cap_m: int = 12) -> BlocksResult:
    """Extension to general delta-large rectangles: each rectangle is
    represented by a block inside it; for every candidate partition, the
    surviving rectangles (block uncut, inside a face) are packed optimally.

    At the configured instance sizes the per-face interaction-set dynamic
    program degenerates to enumerating the independent subsets of the
    surviving rectangles, which is what this computes."""
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise ValueError("eps in (0,1) required")
    grid = build_grid(n, delta)
    for it in rects:
        if not is_delta_large(it, grid):
            raise ValueError("rectangle %r is not delta-large" % (it[0],))
        r = it[1]
        if any(v.denominator != 1 for v in (r.x1, r.x2, r.y1, r.y2)):
            raise ValueError("rectangle %r has non-integer coordinates"
                             % (it[0],))
    _check_caps(grid, eps, cap_n, cap_r)
    if len(rects) > cap_m:
        raise CapsExceeded("rectangle mode capped at m <= %d (state space "
                           "2^m per partition)" % cap_m)
    if not rects:
        return BlocksResult((), 0, 0)
    rep = {i: representative_block(r, grid) for i, r in rects}
    best = (0, ())
    cands = _maximal_independent_sets(rects)
    for ref in cands:
        ref_blocks = [(i, rep[i]) for i, _ in ref]
        try:
            part = build_partition(ref_blocks, grid, eps / 4)
            faces = extract_faces(part.z, grid)
        except BlocksError:
            continue
        alive = [it for it in rects
                 if any(rect_cells(rep[it[0]]) <= f.cells for f in faces
                        if f.kind in ("trail", "ring"))]
        w, ids = _exact_rect_subset(alive)
        if w > best[0] or (w == best[0] and ids < best[1]):
            best = (w, ids)
    heaviest = max(rects, key=lambda it: (it[1].weight, -it[0]))
    if heaviest[1].weight > best[0]:
        best = (heaviest[1].weight, (heaviest[0],))
    return BlocksResult(best[1], best[0], len(cands))


def _exact_rect_subset(items: Sequence[tuple[int, Rect]]
                       ) -> tuple[int, tuple[int, ...]]:
    best = (0, ())
    m = len(items)
    for mask in range(1 << m):
        sel = [items[k] for k in range(m) if mask >> k & 1]
        if any(rects_interiors_intersect(a[1], b[1])
               for a, b in itertools.combinations(sel, 2)):
            continue
        w = sum(r.weight for _, r in sel)
        ids = tuple(sorted(i for i, _ in sel))
        if w > best[0] or (w == best[0] and ids < best[1]):
            best = (w, ids)
    return best
