"""Corridor decomposition of disjoint convex polygons inside a square frame.

The L-infinity medial axis of the complement is computed exactly: every
bisector arc is a rational polyline, every degree->=3 vertex carries a
critical square (the largest axis-parallel square centered there whose
interior avoids all polygons) with one contact point per touching site.
Spokes from those vertices to their contacts cut the complement into
corridors, each bounded by two polygon/frame chains and at most four spokes.

Discovery is seed-and-trace: from each polygon a nearby bisector point is
found exactly, then arcs are traced through breakpoint and triple-point
events; every vertex encountered has its three arc slots traced in turn, so
the structure is closed under arc-following and needs no float guidance.
The decomposition is self-checked by an exact tiling identity (corridor
areas plus polygon areas equal the frame area).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from ._axis import (FRAME_IDS, FREE_END, AxisBuilder, GeneralPositionError,
                    Piece, is_frame, sgn)
from .geom import (Frame, Point, Rect, WeightedPolygon, clip_area,
                   interior_point, on_segment, point_in_polygon,
                   polygon_signed_area, polygons_disjoint)

LOOP_END = -2  # arc is a closed vertex-free loop


# ---------------------------------------------------------------------------
# Public axis types


@dataclass(frozen=True)
class CriticalSquare:
    center: Point
    radius: Fraction
    contacts: tuple[tuple[int, Point], ...]  # (site id, contact point)

    def rect(self) -> Rect:
        return Rect(self.center.x - self.radius, self.center.x + self.radius,
                    self.center.y - self.radius, self.center.y + self.radius)


@dataclass(frozen=True)
class Spoke:
    vertex: Point
    contact: Point
    site: int  # polygon id, or negative frame edge id


@dataclass(frozen=True)
class AxisNode:
    point: Point
    radius: Fraction
    sites: tuple[int, ...]  # site ids (negative = frame edges)
    contacts: tuple[tuple[int, Point], ...]

    def critical_square(self) -> CriticalSquare:
        return CriticalSquare(self.point, self.radius, self.contacts)


@dataclass(frozen=True)
class AxisArc:
    pair: tuple[int, int]  # site ids of the two equidistant sites
    a: int  # start vertex index, FREE_END or LOOP_END
    b: int  # end vertex index, FREE_END or LOOP_END
    points: tuple[Point, ...]

    def reversed(self) -> "AxisArc":
        return AxisArc(self.pair, self.b, self.a, tuple(reversed(self.points)))


@dataclass(frozen=True)
class MedialAxis:
    vertices: tuple[AxisNode, ...]
    arcs: tuple[AxisArc, ...]

    def degrees(self) -> list[int]:
        deg = [0] * len(self.vertices)
        for arc in self.arcs:
            for end in (arc.a, arc.b):
                if end >= 0:
                    deg[end] += 1
        return deg


# ---------------------------------------------------------------------------
# Corridor types


@dataclass
class Corridor:
    cid: int
    floor: Optional[tuple[int, tuple[Point, ...]]]    # (site id, chain)
    ceiling: Optional[tuple[int, tuple[Point, ...]]]
    spokes: tuple[Spoke, ...]
    squares: tuple[CriticalSquare, ...]
    outer: tuple[Point, ...]                          # closed boundary loop (CCW)
    holes: tuple[tuple[Point, ...], ...] = ()
    defining_set: tuple[int, ...] = ()
    conflicts: Optional[tuple[int, ...]] = None
    axis_points: tuple[Point, ...] = ()               # the medial-axis chain inside

    def net_area(self) -> Fraction:
        a = abs(polygon_signed_area(self.outer))
        for h in self.holes:
            a -= abs(polygon_signed_area(h))
        return a

    def key(self):
        return (_canon_loop(self.outer),
                frozenset(_canon_loop(h) for h in self.holes))

    def bbox_float(self):
        xs = [float(p.x) for p in self.outer]
        ys = [float(p.y) for p in self.outer]
        for sq in self.squares:
            xs += [float(sq.center.x - sq.radius), float(sq.center.x + sq.radius)]
            ys += [float(sq.center.y - sq.radius), float(sq.center.y + sq.radius)]
        return min(xs), max(xs), min(ys), max(ys)


@dataclass(frozen=True)
class CorridorDecomposition:
    corridors: tuple[Corridor, ...]
    source_sample: frozenset[int]
    frame: Frame

    def by_key(self) -> dict:
        return {c.key(): c for c in self.corridors}


def _canon_loop(points: Sequence[Point]):
    pts = list(points)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    out = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    if polygon_signed_area(out) < 0:
        out.reverse()
    k = min(range(len(out)), key=lambda i: (out[i].x, out[i].y))
    return tuple(out[k:] + out[:k])


# ---------------------------------------------------------------------------
# Medial axis construction


def _frame_cycle(frame: Frame) -> tuple[Point, ...]:
    r = frame.square
    return (Point(r.x1, r.y1), Point(r.x2, r.y1), Point(r.x2, r.y2), Point(r.x1, r.y2))


def _validate(sample: Sequence[WeightedPolygon], frame: Frame) -> None:
    if not polygons_disjoint(sample):
        raise ValueError("inputs not disjoint")
    for p in sample:
        if not frame.contains_polygon(p):
            raise ValueError("polygon %d not strictly inside frame" % p.id)


def medial_axis(sample: Sequence[WeightedPolygon], frame: Frame) -> MedialAxis:
    """Full L-infinity medial axis of the frame interior minus the polygons."""
    _validate(sample, frame)
    if not sample:
        return _empty_frame_axis(frame)
    builder = AxisBuilder(sample, frame.square)
    _discover(builder)
    return _export_axis(builder)


def _empty_frame_axis(frame: Frame) -> MedialAxis:
    r = frame.square
    c = Point((r.x1 + r.x2) / 2, (r.y1 + r.y2) / 2)
    rad = (r.x2 - r.x1) / 2
    corners = _frame_cycle(frame)
    feet = [Point(r.x1, c.y), Point(r.x2, c.y), Point(c.x, r.y1), Point(c.x, r.y2)]
    node = AxisNode(c, rad, tuple(FRAME_IDS), tuple(zip(FRAME_IDS, feet)))
    arcs = tuple(AxisArc(pr, 0, FREE_END, (c, q))
                 for q, pr in zip(corners, ((-1, -3), (-2, -3), (-2, -4), (-1, -4))))
    return MedialAxis((node,), arcs)


def _discover(builder: AxisBuilder) -> None:
    """Trace all arcs; closed under slot-following from per-polygon seeds."""
    builder.raw_arcs = []  # (k1, k2, a_idx, b_idx, points) with indices or markers
    done_slots: set[tuple[int, tuple[int, int]]] = set()
    queue: list[int] = []

    def process_queue():
        while queue:
            vidx = queue.pop(0)
            v = builder.vertices[vidx]
            for k1, k2 in ((v.sites[0], v.sites[1]), (v.sites[0], v.sites[2]),
                           (v.sites[1], v.sites[2])):
                pair = (min(k1, k2), max(k1, k2))
                if (vidx, pair) in done_slots:
                    continue
                done_slots.add((vidx, pair))
                start = builder.start_direction(vidx, k1, k2)
                if start is None:
                    raise GeneralPositionError("no valid arc direction at axis vertex")
                g1, g2, dx, dy = start
                nverts = len(builder.vertices)
                pts, kind, data = builder.trace_arc(k1, k2, v.point, g1, g2,
                                                    dx, dy, vidx)
                if kind == "free":
                    builder.raw_arcs.append((k1, k2, vidx, FREE_END, tuple(pts)))
                elif kind == "vertex":
                    builder.raw_arcs.append((k1, k2, vidx, data, tuple(pts)))
                    done_slots.add((data, pair))
                    if data >= nverts:
                        queue.append(data)
                else:
                    raise RuntimeError("arc from a vertex closed on itself")

    sites_with_arcs: set[int] = set()
    npoly = len(builder.polys)
    for k in range(npoly):
        process_queue()
        sites_with_arcs = {s for arc in builder.raw_arcs for s in arc[:2]}
        for v in builder.vertices:
            sites_with_arcs.update(v.sites)
        if k in sites_with_arcs:
            continue
        seed = _loop_seed(builder, k)
        if seed is None:
            raise RuntimeError("failed to seed bisector for polygon site %d" % k)
        p0, k2, g1, g2, dx, dy = seed
        nverts = len(builder.vertices)
        pts, kind, data = builder.trace_arc(k, k2, p0, g1, g2, dx, dy, -1)
        if kind == "closed":
            builder.raw_arcs.append((k, k2, LOOP_END, LOOP_END, tuple(pts)))
        elif kind == "vertex":
            queue.append(data)
            process_queue()
        else:
            raise RuntimeError("seed trace ended at a frame corner")
    process_queue()


def _loop_seed(builder: AxisBuilder, k: int):
    """Exact point on the bisector between site k and its leftward neighbor.

    Shoots a ray left from the leftmost vertex of polygon k; site k's distance
    along the ray is exactly t (its left extreme-vertex piece), so the first
    site whose distance drops to t gives a certified equidistant point.
    """
    site = builder.sites[k]
    g1 = next(pc for pc in site.pieces
              if pc.kind == "vertex" and pc.a == -1 and pc.b == 0)
    p0 = g1.pv
    dx, dy = Fraction(-1), Fraction(0)
    best_t = None
    best_l = None
    for l, other in enumerate(builder.sites):
        if l == k:
            continue
        t = builder._site_meet(other, g1, p0, dx, dy)
        if t is not None and (best_t is None or t < best_t):
            best_t, best_l = t, l
    if best_t is None:
        return None
    p = Point(p0.x + best_t * dx, p0.y + best_t * dy)
    att = builder.sites[best_l].attaining(p)
    g2 = att[0]
    ddx, ddy = (g1.b - g2.b), -(g1.a - g2.a)
    if ddx == 0 and ddy == 0:
        raise GeneralPositionError("parallel pieces at loop seed")
    return p, best_l, g1, g2, ddx, ddy


def _export_axis(builder: AxisBuilder) -> MedialAxis:
    def sid(k: int) -> int:
        return builder.sites[k].sid

    nodes = tuple(
        AxisNode(v.point, v.radius, tuple(sid(k) for k in v.sites),
                 tuple((sid(k), q) for k, q in sorted(v.contacts.items())))
        for v in builder.vertices)
    arcs = []
    for k1, k2, a, b, pts in builder.raw_arcs:
        s1, s2 = sid(k1), sid(k2)
        pair = (min(s1, s2), max(s1, s2))
        arcs.append(AxisArc(pair, a, b, pts))
    return MedialAxis(nodes, tuple(arcs))


def reduce(axis: MedialAxis) -> MedialAxis:
    """Repeatedly delete degree-1 structure (free arc ends and their cascades)."""
    alive = [True] * len(axis.arcs)
    deg = axis.degrees()
    changed = True
    while changed:
        changed = False
        for i in range(len(axis.arcs)):
            if not alive[i]:
                continue
            arc = axis.arcs[i]
            dangling = (arc.a == FREE_END or arc.b == FREE_END
                        or (arc.a >= 0 and deg[arc.a] == 1)
                        or (arc.b >= 0 and deg[arc.b] == 1))
            if arc.a == LOOP_END:
                dangling = False
            if dangling:
                alive[i] = False
                changed = True
                for end in (arc.a, arc.b):
                    if end >= 0:
                        deg[end] -= 1
    keep_v = sorted({e for i, arc in enumerate(axis.arcs) if alive[i]
                     for e in (arc.a, arc.b) if e >= 0})
    remap = {old: new for new, old in enumerate(keep_v)}
    verts = tuple(axis.vertices[i] for i in keep_v)
    arcs = tuple(AxisArc(arc.pair,
                         remap.get(arc.a, arc.a), remap.get(arc.b, arc.b),
                         arc.points)
                 for i, arc in enumerate(axis.arcs) if alive[i])
    return MedialAxis(verts, arcs)


# ---------------------------------------------------------------------------
# Corridor assembly


def build_corridors(sample: Sequence[WeightedPolygon], frame: Frame
                    ) -> CorridorDecomposition:
    _validate(sample, frame)
    sample = list(sample)
    ids = frozenset(p.id for p in sample)
    if not sample:
        outer = _frame_cycle(frame) + (_frame_cycle(frame)[0],)
        c = Corridor(0, None, None, (), (), outer, (), ())
        return CorridorDecomposition((c,), ids, frame)
    axis = reduce(medial_axis(sample, frame))
    decomp = _assemble(axis, sample, frame)
    _self_check(decomp, sample, frame)
    return decomp


def _assemble(axis: MedialAxis, sample: Sequence[WeightedPolygon],
              frame: Frame) -> CorridorDecomposition:
    by_id = {p.id: p for p in sample}
    cycles = {p.id: p.vertices for p in sample}
    fcycle = _frame_cycle(frame)
    inner_pts = {p.id: interior_point(p.vertices) for p in sample}
    deg = axis.degrees()

    # vertex -> incident (arc index, True if arc starts here)
    incident: dict[int, list[tuple[int, bool]]] = {i: [] for i in range(len(axis.vertices))}
    for i, arc in enumerate(axis.arcs):
        if arc.a >= 0:
            incident[arc.a].append((i, True))
        if arc.b >= 0:
            incident[arc.b].append((i, False))

    chains: list[list[tuple[int, bool]]] = []   # oriented arc runs between deg>=3 vertices
    loops: list[list[tuple[int, bool]]] = []    # cycles with no deg>=3 vertex
    used: set[tuple[int, bool]] = set()

    def walk(start_arc: int, forward: bool):
        run = []
        ai, fwd = start_arc, forward
        while True:
            run.append((ai, fwd))
            used.add((ai, fwd))
            used.add((ai, not fwd))
            far = axis.arcs[ai].b if fwd else axis.arcs[ai].a
            if far < 0:
                raise RuntimeError("dangling arc in reduced axis")
            if deg[far] >= 3:
                return run, far
            nxt = [(j, jf) for j, jf in incident[far] if j != ai]
            if len(nxt) != 1:
                raise RuntimeError("degree-2 vertex with ambiguous continuation")
            ai, fwd = nxt[0]

    vorder = sorted(range(len(axis.vertices)),
                    key=lambda i: (axis.vertices[i].point.x, axis.vertices[i].point.y))
    for u in vorder:
        if deg[u] < 3:
            continue
        for ai, starts in sorted(incident[u]):
            if (ai, starts) in used:
                continue
            run, far = walk(ai, starts)
            chains.append(run)
    # leftover cycles (all degree-2) and explicit loop arcs
    for i, arc in enumerate(axis.arcs):
        if arc.a == LOOP_END:
            loops.append([(i, True)])
            used.add((i, True))
            used.add((i, False))
    for i, arc in enumerate(axis.arcs):
        if (i, True) in used or arc.a < 0:
            continue
        run = [(i, True)]
        used.add((i, True))
        used.add((i, False))
        cur, fwd = i, True
        far = axis.arcs[cur].b
        start_v = axis.arcs[i].a
        while far != start_v:
            nxt = [(j, jf) for j, jf in incident[far] if j != cur]
            if len(nxt) != 1:
                raise RuntimeError("broken degree-2 cycle in reduced axis")
            cur, fwd = nxt[0]
            run.append((cur, fwd))
            used.add((cur, True))
            used.add((cur, False))
            far = axis.arcs[cur].b if fwd else axis.arcs[cur].a
        loops.append(run)

    corridors: list[Corridor] = []
    cid = 0
    for run in chains:
        corridors.append(_chain_corridor(cid, run, axis, cycles, fcycle,
                                         inner_pts, frame))
        cid += 1

    # vertex-free cell loops: the enclosed polygon becomes a hole of the
    # surrounding corridor (the loop itself does not bound corridors)
    hole_jobs: list[tuple[int, tuple[Point, ...]]] = []
    for run in loops:
        pts = _run_points(run, axis)
        ring = pts[:-1] if pts[0] == pts[-1] else pts
        inner = None
        for pid, q in inner_pts.items():
            if _winding(q, ring) != 0:
                inner = pid
                break
        if inner is None:
            raise RuntimeError("vertex-free axis loop encloses no polygon")
        hole_jobs.append((inner, cycles[inner] + (cycles[inner][0],)))

    frame_corridor: Optional[Corridor] = None
    for pid, hole in hole_jobs:
        probe = _hole_probe(by_id[pid], sample, frame)
        target = None
        for c in corridors:
            loop = c.outer
            if _winding(probe, loop[:-1] if loop[0] == loop[-1] else loop) != 0 \
                    and all(_winding(probe, h[:-1] if h[0] == h[-1] else h) == 0
                            for h in c.holes):
                target = c
                break
        if target is None:
            if frame_corridor is None:
                outer = fcycle + (fcycle[0],)
                frame_corridor = Corridor(cid, None, None, (), (), outer)
                corridors.append(frame_corridor)
                cid += 1
            target = frame_corridor
        target.holes = target.holes + (hole,)
        target.defining_set = tuple(sorted(set(target.defining_set) | {pid}))

    return CorridorDecomposition(tuple(corridors),
                                 frozenset(p.id for p in sample), frame)


def _run_points(run: list[tuple[int, bool]], axis: MedialAxis) -> tuple[Point, ...]:
    pts: list[Point] = []
    for ai, fwd in run:
        seg = axis.arcs[ai].points if fwd else tuple(reversed(axis.arcs[ai].points))
        for p in seg:
            if not pts or pts[-1] != p:
                pts.append(p)
    return tuple(pts)


def _hole_probe(poly: WeightedPolygon, sample: Sequence[WeightedPolygon],
                frame: Frame) -> Point:
    """A point just outside poly, closer to it than to anything else."""
    from ._axis import polygon_site

    lv = min(poly.vertices, key=lambda p: (p.x, p.y))
    gap = min(lv.x - frame.square.x1, frame.square.x2 - lv.x,
              lv.y - frame.square.y1, frame.square.y2 - lv.y)
    for q in sample:
        if q.id != poly.id:
            gap = min(gap, polygon_site(q).dist(lv))
    eps = gap / 4
    return Point(lv.x - eps, lv.y)


def _chain_corridor(cid: int, run: list[tuple[int, bool]], axis: MedialAxis,
                    cycles: dict[int, tuple[Point, ...]],
                    fcycle: tuple[Point, ...],
                    inner_pts: dict[int, Point], frame: Frame) -> Corridor:
    first = axis.arcs[run[0][0]]
    last = axis.arcs[run[-1][0]]
    u = first.a if run[0][1] else first.b
    v = last.b if run[-1][1] else last.a
    nu, nv = axis.vertices[u], axis.vertices[v]
    pts = _run_points(run, axis)

    # the two sides: at most one polygon pair, or one polygon + the frame
    side_sites = set()
    for ai, _ in run:
        side_sites.update(axis.arcs[ai].pair)
    poly_sides = sorted(s for s in side_sites if s >= 0)
    frame_side = any(s < 0 for s in side_sites)
    if len(poly_sides) + (1 if frame_side else 0) != 2:
        raise RuntimeError("corridor chain with unexpected side structure: %r"
                           % (sorted(side_sites),))

    contacts_u = dict(nu.contacts)
    contacts_v = dict(nv.contacts)
    epair_u = axis.arcs[run[0][0]].pair
    epair_v = axis.arcs[run[-1][0]].pair

    def side_contact(contacts: dict[int, Point], end_pair: tuple[int, int],
                     side: int) -> tuple[int, Point]:
        if side >= 0:
            return side, contacts[side]
        fs = [s for s in end_pair if s < 0]
        if not fs:
            # chain touches the frame only in its interior; the end vertex
            # still stores a frame contact if a frame site is in its triple
            fs = [s for s in contacts if s < 0]
        return fs[0], contacts[fs[0]]

    sides: list[int] = poly_sides + ([-10] if frame_side else [])
    # -10 is a placeholder meaning "the frame"; chains on the frame walk its cycle
    mids = [Point((a.x + b.x) / 2, (a.y + b.y) / 2) for a, b in zip(pts, pts[1:])]

    options = []
    sa = sides[0]
    sb = sides[1]
    ca_u = side_contact(contacts_u, epair_u, sa)
    cb_u = side_contact(contacts_u, epair_u, sb)
    ca_v = side_contact(contacts_v, epair_v, sa)
    cb_v = side_contact(contacts_v, epair_v, sb)

    cyc_a = cycles[sa] if sa >= 0 else fcycle
    cyc_b = cycles[sb] if sb >= 0 else fcycle

    seen = {}
    for cha in _chain_options(cyc_a, ca_u[1], ca_v[1]):
        for chb in _chain_options(cyc_b, cb_v[1], cb_u[1]):
            loop = [nu.point] + list(cha) + [nv.point] + list(chb)
            loop = _dedupe_loop(loop)
            if len(loop) < 4:
                continue
            area = polygon_signed_area(loop[:-1])
            if area == 0:
                continue
            if area < 0:
                loop = [loop[0]] + list(reversed(loop[1:-1])) + [loop[0]]
            ring = loop[:-1]
            # every piece of the axis chain must be inside the loop, allowing
            # degenerate zero-width stretches where the arc runs on a spoke
            inside = 0
            ok = True
            for mid in mids:
                w = _winding(mid, ring)
                if w == 1:
                    inside += 1
                elif not _on_ring(mid, ring):
                    ok = False
                    break
            if not ok or inside == 0:
                continue
            bx1 = min(float(p.x) for p in ring)
            bx2 = max(float(p.x) for p in ring)
            by1 = min(float(p.y) for p in ring)
            by2 = max(float(p.y) for p in ring)
            if any(bx1 <= float(q.x) <= bx2 and by1 <= float(q.y) <= by2
                   and _winding(q, ring) != 0 for q in inner_pts.values()):
                continue
            key = _canon_loop(ring)
            if key not in seen:
                seen[key] = (loop, cha, chb)
                options.append((loop, cha, chb))
    if len(options) != 1:
        raise RuntimeError("corridor boundary selection found %d candidates"
                           % len(options))
    loop, cha, chb = options[0]

    floor = (sa, cha)
    ceiling = (sb if sb != -10 else min(s for s in side_sites if s < 0), chb)
    spokes = tuple(Spoke(n.point, c[1], c[0]) for n, c in
                   ((nu, ca_u), (nu, cb_u), (nv, ca_v), (nv, cb_v)))
    squares = (nu.critical_square(),) + ((nv.critical_square(),) if v != u else ())
    dset = sorted({s for s in (list(nu.sites) + list(nv.sites) + poly_sides)
                   if s >= 0})
    return Corridor(cid, floor, ceiling, spokes, squares, tuple(loop),
                    (), tuple(dset), axis_points=pts)


def _on_ring(p: Point, ring: Sequence[Point]) -> bool:
    n = len(ring)
    return any(on_segment(p, ring[i], ring[(i + 1) % n]) for i in range(n))


def _winding(p: Point, ring: Sequence[Point]) -> int:
    """Winding number of the closed ring around p (p must avoid the ring)."""
    w = 0
    n = len(ring)
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        if a.y <= p.y < b.y:
            if (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) > 0:
                w += 1
        elif b.y <= p.y < a.y:
            if (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0:
                w -= 1
    return w


def _dedupe_loop(loop: list[Point]) -> list[Point]:
    out: list[Point] = []
    for p in loop:
        if not out or out[-1] != p:
            out.append(p)
    if out and out[0] != out[-1]:
        out.append(out[0])
    return out


def _locate_on_cycle(cycle: Sequence[Point], p: Point):
    n = len(cycle)
    for i in range(n):
        a, b = cycle[i], cycle[(i + 1) % n]
        if p == b:
            return (i + 1) % n, Fraction(0)
        if p == a:
            return i, Fraction(0)
        if on_segment(p, a, b):
            if a.x != b.x:
                t = (p.x - a.x) / (b.x - a.x)
            else:
                t = (p.y - a.y) / (b.y - a.y)
            return i, t
    return None


def _cycle_chain(cycle: Sequence[Point], c1: Point, c2: Point
                 ) -> Optional[tuple[Point, ...]]:
    """Chain from c1 to c2 along the cycle's own orientation (c1 != c2)."""
    loc1 = _locate_on_cycle(cycle, c1)
    loc2 = _locate_on_cycle(cycle, c2)
    if loc1 is None or loc2 is None:
        return None
    i1, t1 = loc1
    i2, t2 = loc2
    n = len(cycle)
    pts = [c1]
    if i1 == i2 and t1 < t2:
        pts.append(c2)
        return tuple(pts)
    j = i1
    while True:
        j = (j + 1) % n
        pts.append(cycle[j])
        if j == i2:
            break
    if pts[-1] != c2:
        pts.append(c2)
    return tuple(pts)


def _chain_options(cycle: Sequence[Point], c1: Point, c2: Point
                   ) -> list[tuple[Point, ...]]:
    """Candidate boundary chains from c1 to c2 on the cycle.

    Distinct contacts: the two ways around.  Coincident contacts: the single
    point and the full cycle in both orientations (all occur in degenerate
    corridors; loop validity tests select the right one).
    """
    if c1 == c2:
        loc = _locate_on_cycle(cycle, c1)
        if loc is None:
            return []
        i1, _ = loc
        n = len(cycle)
        full = [c1] + [cycle[(i1 + j) % n] for j in range(1, n + 1)]
        if full[-1] != c1:
            full.append(c1)
        return [(c1,), tuple(full), tuple(reversed(full))]
    fwd = _cycle_chain(cycle, c1, c2)
    bwd = _cycle_chain(cycle, c2, c1)
    out = []
    if fwd is not None:
        out.append(fwd)
    if bwd is not None:
        out.append(tuple(reversed(bwd)))
    return out


# ---------------------------------------------------------------------------
# Self-check, conflicts, dumps


def _self_check(decomp: CorridorDecomposition,
                sample: Sequence[WeightedPolygon], frame: Frame) -> None:
    r = frame.square
    total = sum((c.net_area() for c in decomp.corridors), Fraction(0))
    total += sum((p.area() for p in sample), Fraction(0))
    want = (r.x2 - r.x1) * (r.y2 - r.y1)
    if total != want:
        raise RuntimeError(
            "corridor decomposition failed exact tiling check: %s != %s"
            % (total, want))


def verify_tiling(decomp: CorridorDecomposition,
                  sample: Sequence[WeightedPolygon]) -> tuple[Fraction, Fraction]:
    r = decomp.frame.square
    total = sum((c.net_area() for c in decomp.corridors), Fraction(0))
    total += sum((p.area() for p in sample), Fraction(0))
    return total, (r.x2 - r.x1) * (r.y2 - r.y1)


def corridor_conflicts(c: Corridor, sigma: WeightedPolygon) -> bool:
    """Does sigma's interior meet the corridor interior or a critical square?"""
    ring = list(c.outer[:-1] if c.outer[0] == c.outer[-1] else c.outer)
    a = clip_area(ring, sigma.vertices)
    for h in c.holes:
        hring = list(h[:-1] if h[0] == h[-1] else h)
        a -= clip_area(hring, sigma.vertices)
    if a > 0:
        return True
    for sq in c.squares:
        r = sq.rect()
        box = [Point(r.x1, r.y1), Point(r.x2, r.y1), Point(r.x2, r.y2), Point(r.x1, r.y2)]
        if clip_area(box, sigma.vertices) > 0:
            return True
    return False


def conflict_list(c: Corridor, universe: Sequence[WeightedPolygon],
                  method: str = "predicate",
                  frame: Optional[Frame] = None) -> list[int]:
    """Polygons outside the defining set whose insertion destroys corridor c."""
    dset = set(c.defining_set)
    out = []
    if method == "predicate":
        bx1, bx2, by1, by2 = c.bbox_float()
        for sigma in universe:
            if sigma.id in dset:
                continue
            sx1, sx2, sy1, sy2 = (float(x) for x in sigma.bbox())
            if sx1 > bx2 or bx1 > sx2 or sy1 > by2 or by1 > sy2:
                continue
            if corridor_conflicts(c, sigma):
                out.append(sigma.id)
        return sorted(out)
    if method != "rebuild":
        raise ValueError("unknown method %r" % (method,))
    if frame is None:
        raise ValueError("rebuild method needs the frame")
    by_id = {p.id: p for p in universe}
    base = [by_id[i] for i in sorted(dset)]
    ckey = c.key()
    for sigma in universe:
        if sigma.id in dset:
            continue
        d2 = build_corridors(base + [sigma], frame)
        if ckey not in d2.by_key():
            out.append(sigma.id)
    return sorted(out)


def dump_segments(obj) -> str:
    """Plain-text plot format: one segment per line, 'x1 y1 x2 y2 tag'."""
    lines: list[str] = []

    def emit(pts: Sequence[Point], tag: str):
        for a, b in zip(pts, pts[1:]):
            lines.append("%.9g %.9g %.9g %.9g %s"
                         % (float(a.x), float(a.y), float(b.x), float(b.y), tag))

    if isinstance(obj, MedialAxis):
        for i, arc in enumerate(obj.arcs):
            emit(arc.points, "arc:%d:%d|%d" % (i, arc.pair[0], arc.pair[1]))
    elif isinstance(obj, CorridorDecomposition):
        for c in obj.corridors:
            emit(c.outer, "corridor:%d" % c.cid)
            for h in c.holes:
                emit(h, "hole:%d" % c.cid)
            for s in c.spokes:
                emit((s.vertex, s.contact), "spoke:%d" % c.cid)
    else:
        raise TypeError("cannot dump %r" % (type(obj),))
    return "\n".join(lines) + "\n"
