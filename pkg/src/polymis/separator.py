"""Cheap balanced cuts from cuttings.

Pipeline: build the dual graph of a cutting's regions (corridors plus island
polygons), repair and triangulate it, find a weighted cycle separator on a
straight-line planar drawing, trace the outer boundary of the union of the
cycle's regions, and encode that boundary compactly.  The resulting closed
polygon splits the input <= 2/3 by weight on each side while crossing at most
an (eps / log2 m)-fraction of the weight; a single polygon holding >= 2/3 of
the weight short-circuits the construction.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import networkx as nx
from networkx.algorithms.planar_drawing import (combinatorial_embedding_to_pos,
                                                triangulate_embedding)

from .corridors import (CorridorDecomposition, _canon_loop, _winding,
                        build_corridors)
from .cuttings import Cutting, build_cutting, total_weight
from .geom import (INSIDE, INTERSECTING, OUTSIDE, Frame, Point,
                   WeightedPolygon, classify_against, on_segment,
                   polygon_signed_area)


class SeparatorError(RuntimeError):
    pass


class PinchError(SeparatorError):
    """Union boundary touches itself at isolated points."""

    def __init__(self, msg: str, points: tuple = ()):
        super().__init__(msg)
        self.points = points


# ---------------------------------------------------------------------------
# Dual graph


@dataclass(frozen=True)
class DualGraph:
    """Region adjacency of a cutting; may carry self-loops/parallel edges.

    rotations, when present, give for each region the cyclic counterclockwise
    order of its neighbors as their shared boundary pieces occur along the
    region's outer ring.  This pins down the plane embedding of the dual, so
    that cycle sides computed on a drawing agree with the true geometry.
    """
    vertices: tuple                      # region keys: ("c", cid) | ("i", pid)
    weights: dict                        # region key -> assigned weight
    edges: tuple                         # (key, key) pairs, unordered
    rotations: Optional[dict] = None     # region key -> list of neighbor keys

    def total_weight(self):
        return sum(self.weights.values())


def _region_of_point(cutting: Cutting, p: Point,
                     by_id: dict) -> tuple:
    """Region whose closure contains p; ties broken by region key order."""
    candidates = []
    for pid in cutting.islands:
        poly = by_id[pid]
        bb = poly.bbox()
        if not (bb[0] <= p.x <= bb[1] and bb[2] <= p.y <= bb[3]):
            continue
        w = _winding(p, poly.vertices)
        if w != 0 or _on_loop(p, poly.vertices):
            candidates.append(("i", pid))
    for c in cutting.decomposition.corridors:
        ring = _open_ring(c.outer)
        if _winding(p, ring) != 0 or _on_loop(p, ring):
            inside_hole = False
            for h in c.holes:
                hr = _open_ring(h)
                if _winding(p, hr) != 0 and not _on_loop(p, hr):
                    inside_hole = True
                    break
            if not inside_hole:
                candidates.append(("c", c.cid))
    if not candidates:
        raise SeparatorError("point %r lies in no region of the cutting" % (p,))
    return min(candidates)


def _open_ring(loop: Sequence[Point]) -> list[Point]:
    pts = list(loop)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    return pts


def _on_loop(p: Point, loop: Sequence[Point]) -> bool:
    pts = list(loop)
    n = len(pts)
    for i in range(n):
        if on_segment(p, pts[i], pts[(i + 1) % n]):
            return True
    return False


def _hole_polygon_id(hole: Sequence[Point],
                     by_id: dict) -> Optional[int]:
    key = _canon_loop(hole)
    for pid, poly in by_id.items():
        if _canon_loop(poly.vertices) == key:
            return pid
    return None


def _ring_param(q: Point, ring: Sequence[Point]):
    """Exact position of q along an open ring: segment index + fraction."""
    n = len(ring)
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        if on_segment(q, a, b):
            dx, dy = b.x - a.x, b.y - a.y
            f = (q.x - a.x) / dx if dx != 0 else (q.y - a.y) / dy
            return Fraction(i) + f
    return None


def _chain_midpoint(chain: Sequence[Point]) -> Point:
    if len(chain) == 1:
        return chain[0]
    seg = max(0, min(len(chain) // 2 - 1, len(chain) - 2))
    a, b = chain[seg], chain[seg + 1]
    return Point((a.x + b.x) / 2, (a.y + b.y) / 2)


def dual_graph(cutting: Cutting,
               assigned: Sequence[WeightedPolygon]) -> DualGraph:
    """One vertex per region; each polygon's weight goes to the region whose
    closure contains its leftmost vertex (ties by (x, y, id) then key order).

    Also records the geometric rotation system: for each region, the
    counterclockwise order of its neighbors along its outer ring (one slot
    per adjacent region, at the first shared piece in ring order)."""
    by_id = {p.id: p for p in _cutting_universe(cutting, assigned)}
    keys = [("i", pid) for pid in cutting.islands] + \
           [("c", c.cid) for c in cutting.decomposition.corridors]
    weights = {k: 0 for k in keys}
    islands = set(cutting.islands)
    for p in sorted(assigned, key=lambda q: (q.leftmost_vertex().x,
                                             q.leftmost_vertex().y, q.id)):
        if p.id in islands:
            key = ("i", p.id)
        else:
            key = _region_of_point(cutting, p.leftmost_vertex(), by_id)
        weights[key] += p.weight
    rings = {("c", c.cid): _open_ring(c.outer)
             for c in cutting.decomposition.corridors}
    for pid in cutting.islands:
        rings[("i", pid)] = list(by_id[pid].vertices)
    # shared boundary pieces: (u, v, representative point on both rings)
    pieces: list = []
    edges = []
    # corridor-corridor adjacency through shared spokes
    spoke_owner: dict = {}
    for c in cutting.decomposition.corridors:
        for s in c.spokes:
            skey = (min(s.vertex, s.contact), max(s.vertex, s.contact))
            if skey in spoke_owner and spoke_owner[skey] != c.cid:
                a, b = skey
                mid = Point((a.x + b.x) / 2, (a.y + b.y) / 2)
                edges.append((("c", spoke_owner[skey]), ("c", c.cid)))
                pieces.append((("c", spoke_owner[skey]), ("c", c.cid), mid))
            else:
                spoke_owner[skey] = c.cid
    # corridor-island adjacency through floor/ceiling chains and holes
    holes = []
    for c in cutting.decomposition.corridors:
        for side in (c.floor, c.ceiling):
            # single-point contact chains are not adjacencies: regions
            # sharing only a point cannot be merged into a simple boundary
            if side is not None and side[0] >= 0 and side[0] in islands \
                    and len(side[1]) >= 2:
                edges.append((("c", c.cid), ("i", side[0])))
                pieces.append((("c", c.cid), ("i", side[0]),
                               _chain_midpoint(side[1])))
        for h in c.holes:
            pid = _hole_polygon_id(h, by_id)
            if pid is not None and pid in islands:
                edges.append((("c", c.cid), ("i", pid)))
                holes.append((("c", c.cid), ("i", pid)))
    # one rotation slot per adjacent pair, at the first shared piece
    slot: dict = {}
    for u, v, pt in pieces:
        pair = frozenset((u, v))
        pu, pv = _ring_param(pt, rings[u]), _ring_param(pt, rings[v])
        if pu is None or pv is None:
            continue
        cur = slot.get(pair)
        if cur is None or (pu, pv) < (cur[u], cur[v]):
            slot[pair] = {u: pu, v: pv}
    incident: dict = {k: [] for k in keys}
    for pair, params in slot.items():
        u, v = tuple(pair)
        incident[u].append((params[u], v))
        incident[v].append((params[v], u))
    rotations = {k: [v for _, v in sorted(ps, key=lambda t: (t[0], str(t[1])))]
                 for k, ps in incident.items()}
    for u, v in holes:  # bridge into a hole: any rotation slot is valid
        if v not in rotations[u]:
            rotations[u].append(v)
        if u not in rotations[v]:
            rotations[v].append(u)
    return DualGraph(tuple(keys), weights, tuple(edges), rotations)


def _cutting_universe(cutting: Cutting,
                      assigned: Sequence[WeightedPolygon]) -> list:
    out = {p.id: p for p in assigned}
    sample = cutting.decomposition.source_sample
    missing = sample - set(out)
    if missing:
        raise SeparatorError("assigned list is missing sample polygons %s"
                             % sorted(missing))
    return list(out.values())


# ---------------------------------------------------------------------------
# Repair + triangulation + straight-line drawing


@dataclass(frozen=True)
class Triangulation:
    graph: "nx.Graph"
    pos: dict                            # vertex -> exact rational Point
    mapping: dict                        # original vertex -> tuple of vertices
    weights: dict                        # vertex -> weight
    original_edges: frozenset = frozenset()  # dual edges (triangulation adds more)
    embedding: object = None             # pre-triangulation PlanarEmbedding


def _geometric_embedding(g: DualGraph, G: "nx.Graph"):
    """PlanarEmbedding from the recorded rotation system, or None.

    Using the true plane rotation order (instead of an arbitrary combinatorial
    embedding) makes cycle sides computed on the drawing agree with the
    regions actually enclosed in the plane."""
    if g.rotations is None:
        return None
    emb = nx.PlanarEmbedding()
    try:
        for u in G.nodes():
            rot = [v for v in g.rotations.get(u, []) if G.has_edge(u, v)]
            if set(rot) != set(G.neighbors(u)) or len(rot) != len(set(rot)):
                return None
            prev = None
            for v in rot:
                if prev is None:
                    emb.add_half_edge_first(u, v)
                else:
                    emb.add_half_edge_ccw(u, v, prev)
                prev = v
        emb.check_structure()
    except nx.NetworkXException:
        return None
    return emb


def fix_and_triangulate(g: DualGraph) -> Triangulation:
    """Simple, planar, fully triangulated version of the dual graph.

    Self-loops and parallel edges are dropped; triangulation adds edges only,
    so every original vertex survives and D(v) = {v}.  Vertices get exact
    integer positions from a straight-line planar drawing.
    """
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    for a, b in g.edges:
        if a != b:
            G.add_edge(a, b)
    if G.number_of_nodes() == 0:
        raise SeparatorError("empty dual graph")
    if not nx.is_connected(G):
        raise SeparatorError("dual graph is not connected")
    orig = frozenset(frozenset((a, b)) for a, b in g.edges if a != b)
    if G.number_of_nodes() < 3:
        pos = {v: Point(Fraction(i), Fraction(0))
               for i, v in enumerate(G.nodes())}
        return Triangulation(G, pos, {v: (v,) for v in g.vertices},
                             dict(g.weights), orig)
    emb = _geometric_embedding(g, G)
    if emb is None:
        ok, emb = nx.check_planarity(G)
        if not ok:
            raise SeparatorError("dual graph is not planar")
    t_emb, _outer = triangulate_embedding(emb, True)
    raw_pos = combinatorial_embedding_to_pos(emb, True)
    TG = nx.Graph(t_emb)
    pos = {v: Point(Fraction(x), Fraction(y)) for v, (x, y) in raw_pos.items()}
    return Triangulation(TG, pos, {v: (v,) for v in g.vertices},
                         dict(g.weights), orig, emb)


# ---------------------------------------------------------------------------
# Cycle separator


def _cycle_sides(cycle: Sequence, tri: Triangulation):
    ring = [tri.pos[v] for v in cycle]
    if len(ring) < 3 or polygon_signed_area(ring) == 0:
        return None
    on = set(cycle)
    inside = outside = 0
    for v in tri.graph.nodes():
        if v in on:
            continue
        w = tri.weights.get(v, 0)
        if _winding(tri.pos[v], ring) != 0:
            inside += w
        else:
            outside += w
    return inside, outside


def candidate_cycles(tri: Triangulation, limit: Optional[int] = None,
                     original_only: bool = False):
    """Fundamental cycles of a BFS spanning tree, most balanced first.

    Yields (cycle, inside_weight, outside_weight) with cycle length within
    the 4*sqrt(|V|) budget, sorted by max side weight.  With original_only
    the BFS tree and the chords are restricted to dual edges (triangulation
    fill-in edges join plane-wise non-adjacent regions, whose union could
    not be traced into one boundary).
    """
    G = tri.graph
    if original_only:
        G = G.edge_subgraph(tuple(e) for e in tri.original_edges).copy()
        G.add_nodes_from(tri.graph.nodes())
        if not nx.is_connected(G):
            return []
    n = tri.graph.number_of_nodes()
    root = max(G.nodes(), key=lambda v: (tri.weights.get(v, 0), str(v)))
    parent = {root: None}
    depth = {root: 0}
    order = [root]
    for u, v in nx.bfs_edges(G, root):
        parent[v] = u
        depth[v] = depth[u] + 1
        order.append(v)
    tree_edges = {frozenset((v, parent[v])) for v in parent if parent[v] is not None}
    budget = 4 * math.sqrt(n)
    scored = []
    for a, b in G.edges():
        if frozenset((a, b)) in tree_edges:
            continue
        # fundamental cycle: tree paths to the meeting point
        pa, pb = a, b
        left, right = [a], [b]
        while depth[pa] > depth[pb]:
            pa = parent[pa]
            left.append(pa)
        while depth[pb] > depth[pa]:
            pb = parent[pb]
            right.append(pb)
        while pa != pb:
            pa, pb = parent[pa], parent[pb]
            left.append(pa)
            right.append(pb)
        cycle = left + right[:-1][::-1]
        if len(cycle) < 3 or len(cycle) > budget:
            continue
        sides = _cycle_sides(cycle, tri)
        if sides is None:
            continue
        scored.append((max(sides), cycle, sides))
    scored.sort(key=lambda t: (t[0], [str(v) for v in t[1]]))
    if limit is not None:
        scored = scored[:limit]
    return [(cycle, s[0], s[1]) for _, cycle, s in scored]


def _embedding_faces(emb) -> list:
    faces = []
    seen: set = set()
    for u, v in emb.edges():
        if (u, v) in seen:
            continue
        faces.append(emb.traverse_face(u, v, mark_half_edges=seen))
    return faces


def splice_cycle(cycle: Sequence, tri: Triangulation) -> Optional[list]:
    """Replace triangulation fill-in edges by face paths of original edges.

    A fill-in edge joins two regions that only meet at a point (they lie on
    a common face of the dual's plane embedding).  Routing through the
    shorter boundary arc of that face yields a ring of regions that are
    pairwise plane-adjacent, whose union can be traced into one boundary.
    Returns the ring with duplicates removed, or None when no face path
    exists."""
    if tri.embedding is None:
        return None
    faces = _embedding_faces(tri.embedding)
    ring: list = []
    n = len(cycle)
    for i in range(n):
        u, v = cycle[i], cycle[(i + 1) % n]
        ring.append(u)
        if frozenset((u, v)) in tri.original_edges:
            continue
        best = None
        for f in faces:
            if u not in f or v not in f:
                continue
            iu, iv = f.index(u), f.index(v)
            fwd = f[iu + 1:iv] if iu < iv else f[iu + 1:] + f[:iv]
            back = f[iv + 1:iu] if iv < iu else f[iv + 1:] + f[:iu]
            for arc in (fwd, back[::-1]):
                if best is None or len(arc) < len(best):
                    best = arc
        if best is None:
            return None
        ring.extend(best)
    return list(dict.fromkeys(ring))


def cycle_separator(tri: Triangulation) -> list:
    """Most balanced short cycle: both strict sides <= (3/4) W, length
    <= 4*sqrt(|V|).  Graphs with <= 3 vertices return the whole vertex set."""
    n = tri.graph.number_of_nodes()
    if n <= 3:
        return sorted(tri.graph.nodes(), key=str)
    W = sum(tri.weights.get(v, 0) for v in tri.graph.nodes())
    cands = candidate_cycles(tri)
    for cycle, inside, outside in cands:
        if inside <= Fraction(3, 4) * W and outside <= Fraction(3, 4) * W:
            return cycle
    raise SeparatorError(
        "no fundamental cycle meets the separator contract "
        "(|V|=%d, best=%s)" % (n, cands[0][1:] if cands else None))


# ---------------------------------------------------------------------------
# Boundary tracing


@dataclass(frozen=True)
class SeparatingPolygon:
    boundary: tuple[Point, ...]          # closed simple loop, CCW, no dup end
    tokens: tuple                        # per-vertex provenance tokens
    frame: Frame
    inside_weight: Fraction
    outside_weight: Fraction
    cut_weight: Fraction
    encoding: str = ""
    diagnostics: tuple[str, ...] = ()


def _region_rings(cutting: Cutting, key, by_id) -> list[list[Point]]:
    """Boundary rings of a region: outer (+holes for corridors)."""
    if key[0] == "i":
        return [list(by_id[key[1]].vertices)]
    c = next(c for c in cutting.decomposition.corridors if c.cid == key[1])
    rings = [_open_ring(c.outer)]
    rings += [_open_ring(h) for h in c.holes]
    return rings


def _dir_less_ccw(d1, d2) -> bool:
    """Exact counterclockwise angular order starting at direction (1,0)."""
    h1 = 0 if (d1[1] > 0 or (d1[1] == 0 and d1[0] > 0)) else 1
    h2 = 0 if (d2[1] > 0 or (d2[1] == 0 and d2[0] > 0)) else 1
    if h1 != h2:
        return h1 < h2
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    return cross > 0


def _union_boundary(cutting: Cutting, keys: Sequence,
                    by_id) -> tuple[list[Point], list[str]]:
    """Outer boundary of the union of the given regions.

    Rings are oriented with the union's interior on the left (outer CCW,
    holes CW) and split at every shared endpoint, so interior-shared pieces
    occur in opposite directions and cancel exactly.  The remaining directed
    pieces are stitched by face tracing (at each vertex, take the outgoing
    piece immediately clockwise from the reversed incoming one), which keeps
    the interior on the left and resolves pinch points into simple loops.
    The largest-area loop is the outer boundary; other loops (holes of a
    non-simply-connected union, or pinched-off lobes) are discarded with a
    diagnostic."""
    segs: list[tuple[Point, Point]] = []
    for key in keys:
        rings = _region_rings(cutting, key, by_id)
        for ri, ring in enumerate(rings):
            pts = list(ring)
            if polygon_signed_area(pts) < 0:
                pts.reverse()
            if ri > 0:  # hole ring: interior of the union lies outside it
                pts.reverse()
            n = len(pts)
            for i in range(n):
                a, b = pts[i], pts[(i + 1) % n]
                if a != b:
                    segs.append((a, b))
    points = sorted({p for s in segs for p in s})
    count: dict[tuple[Point, Point], int] = {}
    for a, b in segs:
        cuts = [p for p in points if p != a and p != b and on_segment(p, a, b)]
        cuts.sort(key=lambda p: (p.x - a.x) ** 2 + (p.y - a.y) ** 2)
        run = [a] + cuts + [b]
        for u, v in zip(run, run[1:]):
            count[(u, v)] = count.get((u, v), 0) + 1
    directed: set[tuple[Point, Point]] = set()
    for (u, v), c in count.items():
        net = c - count.get((v, u), 0)
        if net > 1:
            raise SeparatorError("union boundary piece repeated %d times" % net)
        if net == 1:
            directed.add((u, v))
    if not directed:
        raise SeparatorError("union of regions has empty boundary")
    outgoing: dict[Point, list] = {}
    for u, v in directed:
        outgoing.setdefault(u, []).append(v)
    loops: list[list[Point]] = []
    unused = set(directed)
    while unused:
        start = min(unused)
        u, w = start
        unused.discard(start)
        loop = [u]
        while w != loop[0]:
            loop.append(w)
            rev = (loop[-2].x - w.x, loop[-2].y - w.y)
            cands = [v for v in outgoing[w] if (w, v) in unused]
            if not cands:
                raise SeparatorError("union boundary failed to close")
            # immediate clockwise neighbor of rev in CCW angular order
            def ccw_gap(v):
                d = (v.x - w.x, v.y - w.y)
                return d
            best = None
            for v in cands:
                d = ccw_gap(v)
                if best is None:
                    best = (v, d)
                    continue
                # pick d maximizing CCW angle from rev going clockwise:
                # i.e. the largest direction strictly below rev in CCW order
                db = best[1]
                before_d = _ccw_angle_from(rev, d)
                before_b = _ccw_angle_from(rev, db)
                if before_d > before_b:
                    best = (v, d)
            w2 = best[0]
            unused.discard((w, w2))
            u, w = w, w2
        loops.append(loop)
    diagnostics = []
    loops.sort(key=lambda lp: -abs(polygon_signed_area(lp)))
    if len(loops) > 1:
        diagnostics.append("union not simply connected: kept outer loop, "
                           "discarded %d loop(s)" % (len(loops) - 1))
    outer = loops[0]
    outer = _merge_collinear(outer)
    if len(set(outer)) != len(outer):
        from collections import Counter
        dupes = tuple(sorted(p for p, k in Counter(outer).items() if k > 1))
        raise PinchError("outer boundary is not simple", dupes)
    if polygon_signed_area(outer) < 0:
        outer.reverse()
    k = min(range(len(outer)), key=lambda i: (outer[i].x, outer[i].y))
    return outer[k:] + outer[:k], diagnostics


def _ccw_angle_from(ref, d):
    """Sort key: CCW angle of d measured from ref, in (0, 2pi] exactly.

    Returns a tuple comparable without trigonometry: (half-plane index
    relative to ref, cross-product sign refinement) such that larger means
    further counterclockwise from ref.  Directions equal to ref come last
    (full turn).
    """
    cross = ref[0] * d[1] - ref[1] * d[0]
    dot = ref[0] * d[0] + ref[1] * d[1]
    if cross == 0:
        return (4, 0) if dot > 0 else (2, 0)
    if cross > 0:
        return (1, -_slope_key(cross, dot))
    return (3, _slope_key(-cross, dot))


def _slope_key(cross, dot):
    # within a half-plane, angle grows as dot/cross decreases
    return Fraction(dot, cross)


def _merge_collinear(loop: list[Point]) -> list[Point]:
    out: list[Point] = []
    n = len(loop)
    for i in range(n):
        a, b, c = loop[(i - 1) % n], loop[i], loop[(i + 1) % n]
        cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
        if cross != 0:
            out.append(b)
    return out


def _provenance_map(cutting: Cutting, by_id) -> dict:
    """Exact point -> provenance token over the whole cutting."""
    out: dict[Point, tuple] = {}
    for c in cutting.decomposition.corridors:
        for sq in c.squares:
            sites = tuple(sorted(s for s, _ in sq.contacts))
            out.setdefault(sq.center, ("A", sites))
            for site, contact in sq.contacts:
                out.setdefault(contact, ("C", sites, site))
    fr = cutting.decomposition.frame.square
    for i, corner in enumerate(((fr.x1, fr.y1), (fr.x2, fr.y1),
                                (fr.x2, fr.y2), (fr.x1, fr.y2))):
        out[Point(Fraction(corner[0]), Fraction(corner[1]))] = ("F", i)
    for pid, poly in by_id.items():
        for vi, v in enumerate(poly.vertices):
            out[v] = ("P", pid, vi)
    return out


def _pinch_filler(cutting: Cutting, keys: Sequence, points: Sequence,
                  by_id: dict) -> Optional[tuple]:
    """A region not yet in the union whose boundary passes a pinch point.

    Adding such a region thickens the union across the pinch, so the outer
    boundary no longer touches itself there."""
    used = set(keys)
    candidates = []
    for p in points:
        for pid in cutting.islands:
            k = ("i", pid)
            if k not in used and _on_loop(p, list(by_id[pid].vertices)):
                candidates.append(k)
        for c in cutting.decomposition.corridors:
            k = ("c", c.cid)
            if k not in used and _on_loop(p, _open_ring(c.outer)):
                candidates.append(k)
    return min(candidates) if candidates else None


def trace_separating_polygon(cycle: Sequence, cutting: Cutting,
                             assigned: Sequence[WeightedPolygon]
                             ) -> SeparatingPolygon:
    by_id = {p.id: p for p in _cutting_universe(cutting, assigned)}
    keys = list(dict.fromkeys(cycle))
    for _ in range(12):
        try:
            boundary, diagnostics = _union_boundary(cutting, keys, by_id)
            break
        except PinchError as exc:
            filler = _pinch_filler(cutting, keys, exc.points, by_id)
            if filler is None:
                raise
            keys.append(filler)
    else:
        raise SeparatorError("pinch repair did not converge")
    prov = _provenance_map(cutting, by_id)
    tokens = []
    for p in boundary:
        tok = prov.get(p)
        if tok is None:
            raise SeparatorError("encoding failure: boundary vertex %r has "
                                 "no provenance" % (p,))
        tokens.append(tok)
    parts = classify_against(list(by_id.values()), boundary)
    wsum = lambda ps: sum(p.weight for p in ps)
    gamma = SeparatingPolygon(
        boundary=tuple(boundary), tokens=tuple(tokens),
        frame=cutting.decomposition.frame,
        inside_weight=Fraction(wsum(parts[INSIDE])),
        outside_weight=Fraction(wsum(parts[OUTSIDE])),
        cut_weight=Fraction(wsum(parts[INTERSECTING])),
        diagnostics=tuple(diagnostics))
    return gamma


# ---------------------------------------------------------------------------
# Encoding


class _BitWriter:
    def __init__(self):
        self.bits: list[str] = []

    def write(self, value: int, width: int):
        if value < 0 or value >= (1 << width):
            raise SeparatorError("encoding failure: %d does not fit %d bits"
                                 % (value, width))
        self.bits.append(format(value, "0%db" % width))

    def result(self) -> str:
        return "".join(self.bits)


class _BitReader:
    def __init__(self, bits: str):
        self.bits = bits
        self.i = 0

    def read(self, width: int) -> int:
        if self.i + width > len(self.bits):
            raise SeparatorError("decoding failure: bit string exhausted")
        v = int(self.bits[self.i:self.i + width], 2)
        self.i += width
        return v


def _id_codec(universe: Sequence[WeightedPolygon]):
    ids = sorted(p.id for p in universe)
    code = {pid: i for i, pid in enumerate(ids)}
    for k, fid in enumerate((-1, -2, -3, -4)):
        code[fid] = len(ids) + k
    none_code = len(ids) + 4
    width = max(1, (none_code + 1 - 1).bit_length())
    return code, {v: k for k, v in code.items()}, none_code, width


def _axis_vertex_table(sites: tuple, universe_by_id: dict,
                       frame: Frame) -> list:
    """Deterministic list of axis points/contacts for a defining site set."""
    polys = [universe_by_id[s] for s in sites if s >= 0]
    cd = build_corridors(polys, frame)
    found = []
    for c in cd.corridors:
        for sq in c.squares:
            ss = tuple(sorted(s for s, _ in sq.contacts))
            if ss == sites and sq.center not in [f.center for f in found]:
                found.append(sq)
    found.sort(key=lambda sq: (sq.center.x, sq.center.y))
    return found


VB_WIDTH = 6     # vertex index within one polygon (<= 63 vertices)
IDX_WIDTH = 4    # axis-vertex disambiguation index
LEN_WIDTH = 16   # token count


def encode(gamma: SeparatingPolygon,
           universe: Sequence[WeightedPolygon]) -> str:
    """Bit-string encoding of the boundary, O(len * log m) bits."""
    code, _decode, none_code, width = _id_codec(universe)
    by_id = {p.id: p for p in universe}
    w = _BitWriter()
    w.write(len(gamma.tokens), LEN_WIDTH)
    for tok, point in zip(gamma.tokens, gamma.boundary):
        kind = tok[0]
        if kind == "P":
            w.write(0, 2)
            w.write(code[tok[1]], width)
            w.write(tok[2], VB_WIDTH)
        elif kind == "F":
            w.write(1, 2)
            w.write(tok[1], 2)
        elif kind in ("A", "C"):
            w.write(2 if kind == "A" else 3, 2)
            sites = tok[1]
            padded = list(sites) + [None] * (4 - len(sites))
            for s in padded:
                w.write(none_code if s is None else code[s], width)
            table = _axis_vertex_table(sites, by_id, gamma.frame)
            centers = [sq.center for sq in table]
            if kind == "A":
                if point not in centers:
                    raise SeparatorError("encoding failure: axis vertex not "
                                         "reproducible from defining set")
                w.write(centers.index(point), IDX_WIDTH)
            else:
                site = tok[2]
                hits = [i for i, sq in enumerate(table)
                        if dict(sq.contacts).get(site) == point]
                if not hits:
                    raise SeparatorError("encoding failure: contact not "
                                         "reproducible from defining set")
                w.write(hits[0], IDX_WIDTH)
                w.write(code[site], width)
        else:
            raise SeparatorError("encoding failure: unknown token %r" % (tok,))
    return w.result()


def decode(bits: str, universe: Sequence[WeightedPolygon],
           frame: Frame) -> SeparatingPolygon:
    code, rev, none_code, width = _id_codec(universe)
    by_id = {p.id: p for p in universe}
    r = _BitReader(bits)
    count = r.read(LEN_WIDTH)
    boundary: list[Point] = []
    tokens: list[tuple] = []
    for _ in range(count):
        kind = r.read(2)
        if kind == 0:
            pid = rev[r.read(width)]
            vi = r.read(VB_WIDTH)
            boundary.append(by_id[pid].vertices[vi])
            tokens.append(("P", pid, vi))
        elif kind == 1:
            ci = r.read(2)
            fr = frame.square
            corner = ((fr.x1, fr.y1), (fr.x2, fr.y1),
                      (fr.x2, fr.y2), (fr.x1, fr.y2))[ci]
            boundary.append(Point(Fraction(corner[0]), Fraction(corner[1])))
            tokens.append(("F", ci))
        else:
            raw = [r.read(width) for _ in range(4)]
            sites = tuple(rev[v] for v in raw if v != none_code)
            idx = r.read(IDX_WIDTH)
            table = _axis_vertex_table(sites, by_id, frame)
            sq = table[idx]
            if kind == 2:
                boundary.append(sq.center)
                tokens.append(("A", sites))
            else:
                site = rev[r.read(width)]
                boundary.append(dict(sq.contacts)[site])
                tokens.append(("C", sites, site))
    parts = classify_against(universe, boundary)
    wsum = lambda ps: sum(p.weight for p in ps)
    return SeparatingPolygon(
        boundary=tuple(boundary), tokens=tuple(tokens), frame=frame,
        inside_weight=Fraction(wsum(parts[INSIDE])),
        outside_weight=Fraction(wsum(parts[OUTSIDE])),
        cut_weight=Fraction(wsum(parts[INTERSECTING])),
        encoding=bits)


# ---------------------------------------------------------------------------
# Cheap balanced cut


@dataclass(frozen=True)
class HeavyPolygon:
    polygon: WeightedPolygon


MU = 1
DEFAULT_CUT_RETRIES = 8


def cut_r(m: int, eps: Fraction) -> int:
    return max(2, math.ceil((math.log2(max(2, m)) / float(eps)) ** (2 + MU)))


def cheap_balanced_cut(polys: Sequence[WeightedPolygon], eps, seed: int,
                       frame: Optional[Frame] = None,
                       retries: int = DEFAULT_CUT_RETRIES):
    """Either a >= (2/3)W HeavyPolygon or a SeparatingPolygon with
    cut weight <= (eps/log2 m) W and both sides <= (2/3) W."""
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise ValueError("eps in (0,1) required")
    polys = list(polys)
    m = len(polys)
    W = total_weight(polys)
    for p in polys:
        if Fraction(p.weight) >= Fraction(2, 3) * W:
            return HeavyPolygon(p)
    if frame is None:
        from .cuttings import _bounding_frame
        frame = _bounding_frame(polys)
    r = cut_r(m, eps)
    cut_cap = eps / Fraction(math.log2(max(2, m))).limit_denominator(10 ** 9) * W
    side_cap = Fraction(2, 3) * W
    rng = random.Random(seed)
    achieved = []
    for attempt in range(retries):
        cutting = build_cutting(polys, r, rng.randrange(2 ** 63), frame=frame)
        dual = dual_graph(cutting, polys)
        tri = fix_and_triangulate(dual)
        if tri.graph.number_of_nodes() <= 3:
            continue
        for cycle, _, _ in candidate_cycles(tri, limit=40):
            keys = splice_cycle(cycle, tri)
            if keys is None:
                keys = list(cycle)
            try:
                gamma = trace_separating_polygon(keys, cutting, polys)
            except SeparatorError:
                continue
            if (gamma.cut_weight <= cut_cap
                    and gamma.inside_weight <= side_cap
                    and gamma.outside_weight <= side_cap):
                bits = encode(gamma, polys)
                return SeparatingPolygon(
                    gamma.boundary, gamma.tokens, gamma.frame,
                    gamma.inside_weight, gamma.outside_weight,
                    gamma.cut_weight, encoding=bits,
                    diagnostics=gamma.diagnostics)
            achieved.append((float(gamma.cut_weight), float(gamma.inside_weight),
                             float(gamma.outside_weight)))
    raise SeparatorError(
        "cut construction failed after %d attempts; achieved "
        "(cut, inside, outside) triples: %s" % (retries, achieved[:5]))
