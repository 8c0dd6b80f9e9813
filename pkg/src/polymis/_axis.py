"""Exact L-infinity distance machinery for the medial-axis builder.

The distance from a point to a convex site (polygon, or one axis-parallel
frame edge) is a maximum of affine "pieces" whose gradients have L1 norm 1:
one piece per edge (signed distance to the supporting line) and one per
extreme vertex in each axis direction.  This makes every diagram question a
question about maxima of affine functions, decidable exactly over rationals.

Discovery needs no float guidance: bisector points are seeded exactly from
each polygon and arcs are traced through exact breakpoint/triple-point
events; floats appear only as conservative prefilters on exact tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .geom import Point, Rect, WeightedPolygon

FRAME_LEFT = -1
FRAME_RIGHT = -2
FRAME_BOTTOM = -3
FRAME_TOP = -4
FRAME_IDS = (FRAME_LEFT, FRAME_RIGHT, FRAME_BOTTOM, FRAME_TOP)

FREE_END = -1  # arc endpoint marker: frame corner / dangling tendril


def is_frame(site_id: int) -> bool:
    return site_id < 0


def sgn(x) -> int:
    return (x > 0) - (x < 0)


class GeneralPositionError(ValueError):
    pass


@dataclass(frozen=True)
class Piece:
    """Affine lower bound g(x,y) = a*x + b*y + c of the site distance.

    kind 'edge': contact is the square corner center - r*(su, sv)
                 (perpendicular foot when the edge is axis-parallel, sv or su = 0),
                 which must land on the closed edge (pa, pb).
    kind 'vertex': contact is the fixed extreme vertex pv.
    """
    a: Fraction
    b: Fraction
    c: Fraction
    kind: str
    pa: Optional[Point] = None
    pb: Optional[Point] = None
    su: int = 0
    sv: int = 0
    pv: Optional[Point] = None

    def eval(self, p: Point) -> Fraction:
        return self.a * p.x + self.b * p.y + self.c

    def grad_dot(self, dx: Fraction, dy: Fraction) -> Fraction:
        return self.a * dx + self.b * dy

    def contact(self, center: Point, r: Fraction) -> Optional[Point]:
        if self.kind == "vertex":
            v = self.pv
            if max(abs(center.x - v.x), abs(center.y - v.y)) == r:
                return v
            return None
        q = Point(center.x - r * self.su, center.y - r * self.sv)
        pa, pb = self.pa, self.pb
        if min(pa.x, pb.x) <= q.x <= max(pa.x, pb.x) and min(pa.y, pb.y) <= q.y <= max(pa.y, pb.y):
            if (pb.x - pa.x) * (q.y - pa.y) == (pb.y - pa.y) * (q.x - pa.x):
                return q
        return None


@dataclass
class Site:
    sid: int
    pieces: list[Piece]
    bbox: tuple[Fraction, Fraction, Fraction, Fraction]

    def dist(self, p: Point) -> Fraction:
        return max(pc.eval(p) for pc in self.pieces)

    def attaining(self, p: Point) -> list[Piece]:
        vals = [(pc.eval(p), pc) for pc in self.pieces]
        m = max(v for v, _ in vals)
        return [pc for v, pc in vals if v == m]

    def bbox_float(self):
        return tuple(float(v) for v in self.bbox)


def _edge_piece(pa: Point, pb: Point) -> Piece:
    dx, dy = pb.x - pa.x, pb.y - pa.y
    u, v = dy, -dx  # outward normal for CCW boundary
    s = abs(u) + abs(v)
    w = u * pa.x + v * pa.y
    return Piece(u / s, v / s, -w / s, "edge", pa=pa, pb=pb, su=sgn(u), sv=sgn(v))


def polygon_site(poly: WeightedPolygon) -> Site:
    vs = poly.vertices
    n = len(vs)
    pieces: list[Piece] = []
    for i in range(n):
        pa, pb = vs[i], vs[(i + 1) % n]
        if pa.x == pb.x or pa.y == pb.y or abs(pb.x - pa.x) == abs(pb.y - pa.y):
            raise GeneralPositionError(
                "general position violated: polygon %d has an axis-parallel "
                "or slope +-1 edge" % poly.id)
        pieces.append(_edge_piece(pa, pb))
    xmax = max(vs, key=lambda p: (p.x, p.y))
    xmin = min(vs, key=lambda p: (p.x, p.y))
    ymax = max(vs, key=lambda p: (p.y, p.x))
    ymin = min(vs, key=lambda p: (p.y, p.x))
    pieces.append(Piece(Fraction(1), Fraction(0), -xmax.x, "vertex", pv=xmax))
    pieces.append(Piece(Fraction(-1), Fraction(0), xmin.x, "vertex", pv=xmin))
    pieces.append(Piece(Fraction(0), Fraction(1), -ymax.y, "vertex", pv=ymax))
    pieces.append(Piece(Fraction(0), Fraction(-1), ymin.y, "vertex", pv=ymin))
    return Site(poly.id, pieces, poly.bbox())


def frame_sites(frame: Rect) -> list[Site]:
    x1, x2, y1, y2 = frame.x1, frame.x2, frame.y1, frame.y2
    zero = Fraction(0)
    out = []
    specs = [
        (FRAME_LEFT, Point(x1, y1), Point(x1, y2),
         [Piece(Fraction(1), zero, -x1, "edge", pa=Point(x1, y1), pb=Point(x1, y2), su=1, sv=0)]),
        (FRAME_RIGHT, Point(x2, y1), Point(x2, y2),
         [Piece(Fraction(-1), zero, x2, "edge", pa=Point(x2, y1), pb=Point(x2, y2), su=-1, sv=0)]),
        (FRAME_BOTTOM, Point(x1, y1), Point(x2, y1),
         [Piece(zero, Fraction(1), -y1, "edge", pa=Point(x1, y1), pb=Point(x2, y1), su=0, sv=1)]),
        (FRAME_TOP, Point(x1, y2), Point(x2, y2),
         [Piece(zero, Fraction(-1), y2, "edge", pa=Point(x1, y2), pb=Point(x2, y2), su=0, sv=-1)]),
    ]
    for sid, pa, pb, pieces in specs:
        # endpoint pieces keep the max-representation exact beyond the edge span
        if pa.x == pb.x:  # vertical edge: y-direction endpoints
            pieces = pieces + [Piece(zero, Fraction(-1), pa.y, "vertex", pv=pa),
                               Piece(zero, Fraction(1), -pb.y, "vertex", pv=pb)]
        else:
            pieces = pieces + [Piece(Fraction(-1), zero, pa.x, "vertex", pv=pa),
                               Piece(Fraction(1), zero, -pb.x, "vertex", pv=pb)]
        bb = (min(pa.x, pb.x), max(pa.x, pb.x), min(pa.y, pb.y), max(pa.y, pb.y))
        out.append(Site(sid, pieces, bb))
    return out


# ---------------------------------------------------------------------------
# Exact solving / certification


@dataclass
class AxisVertex:
    point: Point
    radius: Fraction
    sites: tuple[int, ...]            # site indices (into builder site list)
    piece_at: dict[int, Piece]        # site index -> attaining piece
    contacts: dict[int, Point]        # site index -> contact point


class AxisBuilder:
    def __init__(self, polys: Sequence[WeightedPolygon], frame: Rect,
                 margin: float | None = None):
        self.polys = list(polys)
        self.frame = frame
        self.sites: list[Site] = [polygon_site(p) for p in self.polys] + frame_sites(frame)
        self.margin = margin if margin is not None else float(frame.x2 - frame.x1) * 1e-9
        self.debug_checks = False
        self.vertices: list[AxisVertex] = []
        self._vert_by_point: dict[Point, int] = {}

    def site_id(self, k: int) -> int:
        return self.sites[k].sid

    # -- exact distance queries ------------------------------------------

    def dist(self, k: int, p: Point) -> Fraction:
        return self.sites[k].dist(p)

    def nearer_site(self, p: Point, r: Fraction, exclude: frozenset[int]) -> Optional[int]:
        """Any site strictly nearer than r at p (bbox prefiltered)."""
        pf = (float(p.x), float(p.y))
        rf = float(r) + self.margin
        for k, site in enumerate(self.sites):
            if k in exclude:
                continue
            bx1, bx2, by1, by2 = site.bbox_float()
            d = max(bx1 - pf[0], pf[0] - bx2, by1 - pf[1], pf[1] - by2, 0.0)
            if d > rf:
                continue
            if site.dist(p) < r:
                return k
        return None

    # -- vertex certification --------------------------------------------

    def _check_vertex(self, ks: Sequence[int], pt: Point) -> Optional[AxisVertex]:
        rs = [self.dist(k, pt) for k in ks]
        if rs[0] != rs[1] or rs[0] != rs[2] or rs[0] <= 0:
            return None
        r = rs[0]
        if self.nearer_site(pt, r, frozenset(ks)) is not None:
            return None
        piece_at: dict[int, Piece] = {}
        contacts: dict[int, Point] = {}
        for k in ks:
            att = self.sites[k].attaining(pt)
            found = []
            for pc in att:
                q = pc.contact(pt, r)
                if q is not None:
                    found.append((pc, q))
            qs = {q for _, q in found}
            if len(qs) != 1:
                raise GeneralPositionError(
                    "general position violated: %d contact points on one site "
                    "at an axis vertex" % len(qs))
            piece_at[k] = found[0][0]
            contacts[k] = found[0][1]
        return AxisVertex(pt, r, tuple(ks), piece_at, contacts)

    def add_vertex(self, v: AxisVertex) -> int:
        if v.point in self._vert_by_point:
            return self._vert_by_point[v.point]
        self.vertices.append(v)
        idx = len(self.vertices) - 1
        self._vert_by_point[v.point] = idx
        return idx

    def lookup_vertex(self, pt: Point) -> Optional[int]:
        return self._vert_by_point.get(pt)

    # -- arc tracing ------------------------------------------------------

    def trace_arc(self, k1: int, k2: int, p0: Point, g1: Piece, g2: Piece,
                  dx: Fraction, dy: Fraction, start_vertex: int,
                  max_steps: int = 10000):
        """Follow the bisector of sites k1,k2 from p0 in direction (dx,dy).

        Returns (points, end_kind, end_data):
          end_kind 'vertex'  -> end_data = vertex index (possibly newly added)
          end_kind 'free'    -> end_data = None (radius hit zero: frame corner)
          end_kind 'closed'  -> end_data = None (returned to p0: vertex-free loop)
        """
        pts = [p0]
        p = p0
        first = True
        for _ in range(max_steps):
            # events within the two active sites: another piece catches up
            t_piece = None
            piece_change = None
            for k, g in ((k1, g1), (k2, g2)):
                base = g.eval(p)
                bslope = g.grad_dot(dx, dy)
                for pc in self.sites[k].pieces:
                    if pc is g:
                        continue
                    slope = pc.grad_dot(dx, dy)
                    rel = slope - bslope
                    if rel <= 0:
                        continue
                    gap = base - pc.eval(p)
                    if gap < 0:
                        continue  # should not happen: g attains the max
                    t = gap / rel
                    if t == 0:
                        continue
                    if t_piece is None or t < t_piece:
                        t_piece, piece_change = t, (k, pc)
            # radius-to-zero event (frame corners)
            rslope = g1.grad_dot(dx, dy)
            t_zero = None
            if rslope < 0:
                t_zero = g1.eval(p) / (-rslope)
            # third-site events up to current horizon
            horizon = t_piece
            if t_zero is not None and (horizon is None or t_zero < horizon):
                horizon = t_zero
            t_third, third_k = self._third_site_event(k1, k2, g1, p, dx, dy, horizon)
            # closure event: start point lies ahead on this segment
            t_close = None
            if not first and dx * (p0.y - p.y) == dy * (p0.x - p.x):
                t_cand = ((p0.x - p.x) / dx) if dx != 0 else ((p0.y - p.y) / dy)
                if t_cand > 0:
                    t_close = t_cand
            events = [(t, kind, data) for t, kind, data in (
                (t_piece, "piece", piece_change),
                (t_zero, "zero", None),
                (t_third, "third", third_k),
                (t_close, "close", None)) if t is not None]
            if not events:
                raise RuntimeError("bisector trace ran out of events")
            tmin = min(t for t, _, _ in events)
            hits = [e for e in events if e[0] == tmin]
            order = {"close": 0, "third": 1, "zero": 2, "piece": 3}
            hits.sort(key=lambda e: order[e[1]])
            t, kind, data = hits[0]
            q = Point(p.x + t * dx, p.y + t * dy)
            if kind == "close" or (q == p0 and kind != "piece"):
                pts.append(p0)
                return pts, "closed", None
            if kind == "zero":
                pts.append(q)
                return pts, "free", None
            if kind == "third":
                if self.debug_checks:
                    m1, m2 = self.sites[k1].dist(q), self.sites[k2].dist(q)
                    if g1.eval(q) != m1 or g2.eval(q) != m2:
                        raise AssertionError(
                            "trace inconsistency at third event: k1=%r k2=%r "
                            "g1=%r d1=%r g2=%r d2=%r q=(%s,%s)" % (
                                k1, k2, float(g1.eval(q)), float(m1),
                                float(g2.eval(q)), float(m2), float(q.x), float(q.y)))
                pts.append(q)
                idx = self.lookup_vertex(q)
                if idx is None:
                    v = self._check_vertex((k1, k2, data), q)
                    if v is None:
                        raise RuntimeError("third-site event failed certification")
                    idx = self.add_vertex(v)
                return pts, "vertex", idx
            # piece change: re-select the forward branch from scratch (both
            # sites may change pieces at the same exact parameter)
            if self.debug_checks:
                m1, m2 = self.sites[k1].dist(q), self.sites[k2].dist(q)
                if g1.eval(q) != m1 or g2.eval(q) != m2:
                    raise AssertionError(
                        "trace inconsistency at piece event: k1=%r k2=%r "
                        "g1=%r d1=%r g2=%r d2=%r q=(%s,%s)" % (
                            k1, k2, float(g1.eval(q)), float(m1),
                            float(g2.eval(q)), float(m2), float(q.x), float(q.y)))
            pts.append(q)
            cands = self._branch_candidates(k1, k2, q,
                                            backward=(g1, g2, dx, dy))
            if len(cands) != 1:
                raise GeneralPositionError(
                    "%d bisector continuations at breakpoint" % len(cands))
            g1, g2, dx, dy = cands[0]
            p = q
            first = False
        raise RuntimeError("bisector trace exceeded step cap")

    def _branch_candidates(self, k1: int, k2: int, p: Point, backward=None,
                           recede: Sequence[int] = ()):
        """Directions in which the (k1,k2) bisector leaves p.

        A branch is a pair of pieces, one attaining per site, with each piece
        strictly slope-dominant within its site's attaining set along the
        branch direction; `backward` excludes the branch we arrived on, and
        every site in `recede` must grow strictly faster than the radius.
        """
        att1 = self.sites[k1].attaining(p)
        att2 = self.sites[k2].attaining(p)
        out = []
        for pa in att1:
            for pb in att2:
                ndx, ndy = (pa.b - pb.b), -(pa.a - pb.a)
                if ndx == 0 and ndy == 0:
                    continue
                for s in (1, -1):
                    d = (s * ndx, s * ndy)
                    if backward is not None:
                        bg1, bg2, bdx, bdy = backward
                        if pa == bg1 and pb == bg2 and d[0] * bdx + d[1] * bdy < 0:
                            continue
                    sl = pa.grad_dot(*d)
                    if any(pc.grad_dot(*d) >= sl for pc in att1 if pc != pa):
                        continue
                    if any(pc.grad_dot(*d) >= pb.grad_dot(*d)
                           for pc in att2 if pc != pb):
                        continue
                    ok = True
                    for k in recede:
                        am = max(pc.grad_dot(*d)
                                 for pc in self.sites[k].attaining(p))
                        if am - sl <= 0:
                            ok = False
                            break
                    if ok:
                        out.append((pa, pb, d[0], d[1]))
        return out

    def _third_site_event(self, k1: int, k2: int, g1: Piece, p: Point,
                          dx: Fraction, dy: Fraction, horizon):
        """Smallest t>0 with d_T(p+t*dir) = g1(p+t*dir) for some other site T."""
        pf = (float(p.x), float(p.y))
        df = (float(dx), float(dy))
        r0 = float(g1.eval(p))
        rs = float(g1.grad_dot(dx, dy))
        # a finite parameter cap always exists: arcs stay inside the frame
        # (a frame-site event fires before the segment could leave it)
        fx1, fx2 = float(self.frame.x1) - 1.0, float(self.frame.x2) + 1.0
        fy1, fy2 = float(self.frame.y1) - 1.0, float(self.frame.y2) + 1.0
        tcap0 = math.inf if horizon is None else float(horizon) * 1.001 + 1e-12
        for q0, d0, lo_, hi_ in ((pf[0], df[0], fx1, fx2), (pf[1], df[1], fy1, fy2)):
            if d0 > 0:
                tcap0 = min(tcap0, (hi_ - q0) / d0)
            elif d0 < 0:
                tcap0 = min(tcap0, (lo_ - q0) / d0)

        def seg_box(tcap):
            qx, qy = pf[0] + tcap * df[0], pf[1] + tcap * df[1]
            return (min(pf[0], qx), max(pf[0], qx), min(pf[1], qy), max(pf[1], qy))

        sx1, sx2, sy1, sy2 = seg_box(tcap0)
        order = []
        for k, site in enumerate(self.sites):
            if k == k1 or k == k2:
                continue
            bx1, bx2, by1, by2 = site.bbox_float()
            d = max(bx1 - sx2, sx1 - bx2, by1 - sy2, sy1 - by2, 0.0)
            order.append((d, k))
        order.sort()
        best_t = None
        best_k = None
        for d, k in order:
            tcap = tcap0 if best_t is None else min(tcap0, float(best_t) * 1.001)
            rmax = max(r0, r0 + tcap * rs)
            slack = self.margin + 1e-7 * (1.0 + abs(rmax))
            if d > rmax + slack:
                break  # sorted: no remaining site can come close enough
            bx1, bx2, by1, by2 = self.sites[k].bbox_float()
            sx1, sx2, sy1, sy2 = seg_box(tcap)
            d2 = max(bx1 - sx2, sx1 - bx2, by1 - sy2, sy1 - by2, 0.0)
            if d2 > rmax + slack:
                continue
            ev = self._site_meet(self.sites[k], g1, p, dx, dy)
            if ev is None:
                continue
            if horizon is not None and ev > horizon:
                continue
            if best_t is None or ev < best_t:
                best_t, best_k = ev, k
        return best_t, best_k

    def _site_meet(self, site: Site, g1: Piece, p: Point,
                   dx: Fraction, dy: Fraction):
        """Infimum t>0 of the interval where d_site <= g1 along the ray."""
        lo = Fraction(0)
        hi = None
        base1 = g1.eval(p)
        slope1 = g1.grad_dot(dx, dy)
        for pc in site.pieces:
            v0 = pc.eval(p) - base1
            s = pc.grad_dot(dx, dy) - slope1
            if s == 0:
                if v0 > 0:
                    return None
                continue
            root = -v0 / s
            if s > 0:
                if hi is None or root < hi:
                    hi = root
            else:
                if root > lo:
                    lo = root
        if hi is not None and lo > hi:
            return None
        if lo <= 0:
            return None
        return lo

    def start_direction(self, vidx: int, k1: int, k2: int):
        """Initial pieces and direction for the (k1,k2) arc leaving vertex vidx.

        The direction is the one along which every other site of the vertex
        triple strictly recedes (one-sided derivative test, exact).
        """
        v = self.vertices[vidx]
        others = [k for k in v.sites if k not in (k1, k2)]
        cands = self._branch_candidates(k1, k2, v.point, recede=others)
        if len(cands) != 1:
            return None
        return cands[0]
