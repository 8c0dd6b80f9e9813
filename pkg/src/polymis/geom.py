"""Exact geometric primitives over rational coordinates.

Shared kernel for the whole package.  Every predicate is decided in exact
rational arithmetic (fractions.Fraction); floats appear only in helper
accessors used for plotting / numeric guidance, never in decisions.

Conventions: polygons and rectangles are open sets, segments are closed.
Two polygons touching only along boundaries are independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction


def rat(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to Fraction (exact)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not allowed in exact coordinates: %r" % (x,))
    return Fraction(x)


@dataclass(frozen=True, order=True)
class Point:
    x: Fraction
    y: Fraction

    def __iter__(self):
        yield self.x
        yield self.y

    def as_float(self):
        return (float(self.x), float(self.y))


def P(x, y) -> Point:
    return Point(rat(x), rat(y))


HORIZONTAL = "horizontal"
VERTICAL = "vertical"
GENERAL = "general"


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point
    closed: bool = True

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("degenerate segment")

    @property
    def orientation(self) -> str:
        if self.a.x == self.b.x:
            return VERTICAL
        if self.a.y == self.b.y:
            return HORIZONTAL
        return GENERAL

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a, self.closed)


@dataclass(frozen=True)
class Rect:
    x1: Fraction
    x2: Fraction
    y1: Fraction
    y2: Fraction
    weight: int = 1
    open: bool = True

    def __post_init__(self):
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError("empty rectangle")

    @property
    def width(self) -> Fraction:
        return self.x2 - self.x1

    @property
    def height(self) -> Fraction:
        return self.y2 - self.y1

    def corners(self) -> list[Point]:
        return [Point(self.x1, self.y1), Point(self.x2, self.y1),
                Point(self.x2, self.y2), Point(self.x1, self.y2)]

    def contains_point(self, p: Point, strict: bool = True) -> bool:
        if strict:
            return self.x1 < p.x < self.x2 and self.y1 < p.y < self.y2
        return self.x1 <= p.x <= self.x2 and self.y1 <= p.y <= self.y2


def make_rect(x1, x2, y1, y2, weight: int = 1) -> Rect:
    return Rect(rat(x1), rat(x2), rat(y1), rat(y2), weight)


@dataclass(frozen=True)
class WeightedPolygon:
    vertices: tuple[Point, ...]
    weight: int
    id: int

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("polygon needs >= 3 vertices")
        if self.weight < 1:
            raise ValueError("weight must be a positive integer")
        if polygon_signed_area(self.vertices) <= 0:
            raise ValueError("vertices must be counterclockwise and non-degenerate")
        if not is_simple_polygon(self.vertices):
            raise ValueError("polygon is not simple")

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple[Point, Point]]:
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def area(self) -> Fraction:
        return polygon_signed_area(self.vertices)

    def bbox(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return (min(xs), max(xs), min(ys), max(ys))

    def is_convex(self) -> bool:
        v = self.vertices
        n = len(v)
        for i in range(n):
            if orient(v[i], v[(i + 1) % n], v[(i + 2) % n]) <= 0:
                return False
        return True

    def leftmost_vertex(self) -> Point:
        return min(self.vertices, key=lambda p: (p.x, p.y))


def polygon(coords: Iterable[tuple], weight: int = 1, pid: int = 0) -> WeightedPolygon:
    return WeightedPolygon(tuple(P(x, y) for x, y in coords), weight, pid)


@dataclass(frozen=True)
class Frame:
    square: Rect

    def contains_polygon(self, poly: WeightedPolygon) -> bool:
        return all(self.square.contains_point(v, strict=True) for v in poly.vertices)


# ---------------------------------------------------------------------------
# Basic predicates


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the cross product (b-a) x (c-a): +1 left turn, -1 right, 0 collinear."""
    d = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    return (d > 0) - (d < 0)


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """Point p lies on the closed segment ab."""
    if orient(a, b, p) != 0:
        return False
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed segments ab and cd share at least one point."""
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    return (on_segment(c, a, b) or on_segment(d, a, b)
            or on_segment(a, c, d) or on_segment(b, c, d))


def segments_properly_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Transversal crossing at a point interior to both segments."""
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def segment_intersection_point(a: Point, b: Point, c: Point, d: Point) -> Point | None:
    """Intersection point of the supporting lines (None if parallel)."""
    r = (b.x - a.x, b.y - a.y)
    s = (d.x - c.x, d.y - c.y)
    den = r[0] * s[1] - r[1] * s[0]
    if den == 0:
        return None
    t = ((c.x - a.x) * s[1] - (c.y - a.y) * s[0]) / den
    return Point(a.x + t * r[0], a.y + t * r[1])


def polygon_signed_area(vs: Sequence[Point]) -> Fraction:
    s = Fraction(0)
    n = len(vs)
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        s += a.x * b.y - b.x * a.y
    return s / 2


def is_simple_polygon(vs: Sequence[Point]) -> bool:
    n = len(vs)
    edges = [(vs[i], vs[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        if a == b:
            return False
        for j in range(i + 1, n):
            c, d = edges[j]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                if segments_properly_cross(a, b, c, d):
                    return False
                # adjacent edges may only share the single common endpoint
                shared = b if j == i + 1 else a
                other = (c, d) if j == i + 1 else (c, d)
                for p in other:
                    if p != shared and on_segment(p, a, b):
                        return False
            else:
                if segments_intersect(a, b, c, d):
                    return False
    return True


def point_in_polygon(p: Point, vs: Sequence[Point]) -> int:
    """1 strictly inside, 0 on boundary, -1 strictly outside (exact ray cast)."""
    n = len(vs)
    for i in range(n):
        if on_segment(p, vs[i], vs[(i + 1) % n]):
            return 0
    inside = False
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        if (a.y > p.y) != (b.y > p.y):
            # x coordinate of edge at height p.y
            xs = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if xs > p.x:
                inside = not inside
    return 1 if inside else -1


def interior_point(vs: Sequence[Point]) -> Point:
    """Some point strictly inside a simple CCW polygon (ear midpoint method)."""
    n = len(vs)
    for i in range(n):
        a, b, c = vs[(i - 1) % n], vs[i], vs[(i + 1) % n]
        if orient(a, b, c) <= 0:
            continue  # reflex or flat corner
        # candidate: midpoint of the ear diagonal, pulled toward b
        q = Point((a.x + c.x) / 2, (a.y + c.y) / 2)
        for t in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 64)):
            cand = Point(b.x + (q.x - b.x) * t, b.y + (q.y - b.y) * t)
            if point_in_polygon(cand, vs) == 1:
                return cand
    raise ValueError("could not find interior point (degenerate polygon?)")


# ---------------------------------------------------------------------------
# Convex clipping (used for exact interior-intersection tests)


def clip_polygon_halfplane(vs: list[Point], a: Point, b: Point) -> list[Point]:
    """Keep the part of polygon vs on the left of directed line a->b."""
    out: list[Point] = []
    n = len(vs)
    for i in range(n):
        cur, nxt = vs[i], vs[(i + 1) % n]
        oc, on_ = orient(a, b, cur), orient(a, b, nxt)
        if oc >= 0:
            out.append(cur)
        if (oc > 0 and on_ < 0) or (oc < 0 and on_ > 0):
            ip = segment_intersection_point(cur, nxt, a, b)
            assert ip is not None
            out.append(ip)
    return out


def clip_area(subject: Sequence[Point], convex_clip: Sequence[Point]) -> Fraction:
    """Exact area of subject ∩ convex_clip (subject simple CCW, clip convex CCW)."""
    vs = list(subject)
    m = len(convex_clip)
    for i in range(m):
        if not vs:
            return Fraction(0)
        vs = clip_polygon_halfplane(vs, convex_clip[i], convex_clip[(i + 1) % m])
    if len(vs) < 3:
        return Fraction(0)
    return polygon_signed_area(vs)


def convex_interiors_intersect(p: Sequence[Point], q: Sequence[Point]) -> bool:
    """Open interiors of two convex CCW polygons intersect."""
    return clip_area(list(p), list(q)) > 0


def interiors_intersect(p: WeightedPolygon, q: WeightedPolygon) -> bool:
    """Open interiors of two simple polygons intersect (exact).

    Convex/convex and simple/convex pairs go through exact clipping; the
    general simple/simple case falls back to crossing + containment tests.
    """
    bx = p.bbox()
    by = q.bbox()
    if bx[1] <= by[0] or by[1] <= bx[0] or bx[3] <= by[2] or by[3] <= bx[2]:
        return False
    if q.is_convex():
        return clip_area(p.vertices, q.vertices) > 0
    if p.is_convex():
        return clip_area(q.vertices, p.vertices) > 0
    for a, b in p.edges():
        for c, d in q.edges():
            if segments_properly_cross(a, b, c, d):
                return True
    if point_in_polygon(interior_point(p.vertices), q.vertices) == 1:
        return True
    if point_in_polygon(interior_point(q.vertices), p.vertices) == 1:
        return True
    return False


def rect_to_vertices(r: Rect) -> tuple[Point, ...]:
    return tuple(r.corners())


def rects_interiors_intersect(r: Rect, s: Rect) -> bool:
    return (max(r.x1, s.x1) < min(r.x2, s.x2)) and (max(r.y1, s.y1) < min(r.y2, s.y2))


# ---------------------------------------------------------------------------
# The paper-facing predicates


def _clip_segment_to_rect(pa: Point, pb: Point, r: Rect) -> tuple[Fraction, Fraction] | None:
    """Liang-Barsky: parameter range [t0,t1] of segment a+t(b-a) inside closure(r)."""
    dx, dy = pb.x - pa.x, pb.y - pa.y
    t0, t1 = Fraction(0), Fraction(1)
    for pcoef, qcoef in ((-dx, pa.x - r.x1), (dx, r.x2 - pa.x),
                         (-dy, pa.y - r.y1), (dy, r.y2 - pa.y)):
        if pcoef == 0:
            if qcoef < 0:
                return None
        else:
            t = qcoef / pcoef
            if pcoef < 0:
                if t > t1:
                    return None
                if t > t0:
                    t0 = t
            else:
                if t < t0:
                    return None
                if t < t1:
                    t1 = t
    return (t0, t1)


def _segment_meets_open_rect(s: Segment, r: Rect) -> bool:
    rng = _clip_segment_to_rect(s.a, s.b, r)
    if rng is None or rng[0] == rng[1]:
        return False
    t0, t1 = rng
    tm = (t0 + t1) / 2
    mid = Point(s.a.x + tm * (s.b.x - s.a.x), s.a.y + tm * (s.b.y - s.a.y))
    return r.contains_point(mid, strict=True)


def _line_cuts_rect(pa: Point, pb: Point, r: Rect) -> bool:
    """The full line through pa,pb passes through the open rectangle."""
    corners = r.corners()
    signs = {orient(pa, pb, c) for c in corners}
    return 1 in signs and -1 in signs


def cuts(s: Segment, r: Rect) -> bool:
    """True iff r \\ s has exactly two connected components.

    Equivalently: s passes through the interior of r and neither endpoint of s
    lies inside the open rectangle (so the chord goes boundary to boundary).
    """
    if not _segment_meets_open_rect(s, r):
        return False
    return not (r.contains_point(s.a, strict=True) or r.contains_point(s.b, strict=True))


def hits_rect(s: Segment, r: Rect) -> bool:
    """s touches closure(r) without entering the open set, and span(s) cuts r."""
    if _segment_meets_open_rect(s, r):
        return False
    if _clip_segment_to_rect(s.a, s.b, r) is None:
        return False
    return _line_cuts_rect(s.a, s.b, r)


def hits_segment(s: Segment, t: Segment) -> bool:
    """s perpendicular to t with an endpoint of s interior to t (asymmetric)."""
    so, to = s.orientation, t.orientation
    if so == GENERAL or to == GENERAL:
        raise ValueError("hits_segment requires axis-parallel segments")
    if so == to:
        return False
    for p in (s.a, s.b):
        if on_segment(p, t.a, t.b) and p != t.a and p != t.b:
            return True
    return False


INSIDE = "inside"
OUTSIDE = "outside"
INTERSECTING = "intersecting"


def _segment_meets_polygon_interior(a: Point, b: Point, vs: Sequence[Point]) -> bool:
    """Closed segment ab has a point strictly inside simple polygon vs."""
    cut_ts = [Fraction(0), Fraction(1)]
    n = len(vs)
    dx, dy = b.x - a.x, b.y - a.y
    for i in range(n):
        c, d = vs[i], vs[(i + 1) % n]
        ip = segment_intersection_point(a, b, c, d)
        if ip is None:
            continue
        if not (on_segment(ip, a, b) and on_segment(ip, c, d)):
            continue
        if dx != 0:
            t = (ip.x - a.x) / dx
        else:
            t = (ip.y - a.y) / dy
        cut_ts.append(t)
    cut_ts = sorted(set(cut_ts))
    for t0, t1 in zip(cut_ts, cut_ts[1:]):
        tm = (t0 + t1) / 2
        mid = Point(a.x + tm * dx, a.y + tm * dy)
        if point_in_polygon(mid, vs) == 1:
            return True
    # also endpoints themselves
    return point_in_polygon(a, vs) == 1 or point_in_polygon(b, vs) == 1


def classify_against(polygons: Sequence[WeightedPolygon],
                     gamma: Sequence[Point]) -> dict[str, list[WeightedPolygon]]:
    """Partition polygons into inside / outside / intersecting w.r.t. a closed
    simple boundary gamma.

    A polygon is intersecting iff gamma's boundary passes through the
    polygon's open interior; otherwise the (connected) interior lies fully on
    one side, decided by an interior-point test.  Running along the polygon's
    own boundary does not count as crossing (open-set semantics).
    """
    gvs = list(gamma)
    if len(gvs) < 3 or polygon_signed_area(gvs) == 0:
        raise ValueError("degenerate separator")
    if polygon_signed_area(gvs) < 0:
        gvs = gvs[::-1]
    out: dict[str, list[WeightedPolygon]] = {INSIDE: [], OUTSIDE: [], INTERSECTING: []}
    m = len(gvs)
    for poly in polygons:
        crossing = False
        pb = poly.bbox()
        for i in range(m):
            a, b = gvs[i], gvs[(i + 1) % m]
            if max(a.x, b.x) <= pb[0] or min(a.x, b.x) >= pb[1]:
                continue
            if max(a.y, b.y) <= pb[2] or min(a.y, b.y) >= pb[3]:
                continue
            if _segment_meets_polygon_interior(a, b, poly.vertices):
                crossing = True
                break
        if crossing:
            out[INTERSECTING].append(poly)
            continue
        probe = interior_point(poly.vertices)
        side = point_in_polygon(probe, gvs)
        if side == 0:
            # interior point on gamma would mean a crossing was missed
            raise AssertionError("ambiguous classification: probe on separator")
        out[INSIDE if side == 1 else OUTSIDE].append(poly)
    return out


# ---------------------------------------------------------------------------
# General position


@dataclass(frozen=True)
class Shear:
    """Invertible shear taking axis-parallel edges to general position.

    forward: (x,y) -> (x + (y + x/K)/K, y + x/K)   (vertical then horizontal shear)
    """
    K: int

    def apply(self, p: Point) -> Point:
        y2 = p.y + p.x / self.K
        return Point(p.x + y2 / self.K, y2)

    def invert(self, p: Point) -> Point:
        # forward: y' = y + x/K ; x' = x + y'/K  =>  x = x' - y'/K ; y = y' - x/K
        x = p.x - p.y / self.K
        return Point(x, p.y - x / self.K)

    def apply_polygon(self, poly: WeightedPolygon) -> WeightedPolygon:
        return WeightedPolygon(tuple(self.apply(v) for v in poly.vertices),
                               poly.weight, poly.id)

    def invert_polygon(self, poly: WeightedPolygon) -> WeightedPolygon:
        return WeightedPolygon(tuple(self.invert(v) for v in poly.vertices),
                               poly.weight, poly.id)


def _has_degenerate_edges(polys: Sequence[WeightedPolygon]) -> bool:
    for poly in polys:
        for a, b in poly.edges():
            dx, dy = b.x - a.x, b.y - a.y
            if dx == 0 or dy == 0 or dx == dy or dx == -dy:
                return True
    return False


def general_position(polys: Sequence[WeightedPolygon]) -> tuple[list[WeightedPolygon], Shear]:
    """Shear all polygons so no edge is horizontal, vertical, or at slope +-1.

    Deterministic: K is the smallest adequate power of two; doubled until no
    degenerate edge remains (always terminates since slopes are fixed
    rationals).  Disjointness and intersection structure are preserved by any
    invertible affine map.
    """
    coords = [abs(c) for poly in polys for v in poly.vertices for c in (v.x, v.y)]
    spread = max(coords) if coords else Fraction(1)
    size = max(1, sum(p.n for p in polys))
    K = 1
    target = 4 * spread * size
    while K <= target:
        K *= 2
    while True:
        shear = Shear(K)
        out = [shear.apply_polygon(p) for p in polys]
        if not _has_degenerate_edges(out):
            return out, shear
        K *= 2


def polygons_disjoint(polys: Sequence[WeightedPolygon]) -> bool:
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if interiors_intersect(polys[i], polys[j]):
                return False
    return True
