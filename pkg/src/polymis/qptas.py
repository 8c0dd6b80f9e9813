"""Recursive independent-set scheme over cheap balanced cuts.

Three desk-scale modes share the same skeleton:

* normalize_weights rescales to small integer weights with a bounded loss
  of optimum.
* solve_oracle_guided verifies the recursion's accounting: it receives a
  reference independent set, constructs a cheap balanced cut for the
  reference restricted to each subproblem, discards what the cut crosses,
  and recurses, auditing the lost weight per level.
* solve_heuristic is a branch-and-bound over axis-parallel rectangle cuts
  drawn from the input coordinate grid, with exact leaves.
* solve_enumerated exhausts every rectangle cut on a small integer grid;
  it is capped hard and exists for demonstration only.
"""

from __future__ import annotations

import dataclasses
import math
import random
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .geom import (INSIDE, INTERSECTING, OUTSIDE, Frame, WeightedPolygon,
                   classify_against, interiors_intersect, polygons_disjoint)
from .oracle import build_conflict_graph, is_independent, mwis_exact
from .separator import (HeavyPolygon, SeparatingPolygon, SeparatorError,
                        cheap_balanced_cut)

LEAF_SIZE = 12
DEPTH_CONST = 4
ENUM_MAX_M = 8
ENUM_MAX_COORD = 16


class QptasError(RuntimeError):
    pass


def depth_cap(m: int, eps: Fraction) -> int:
    return math.ceil(DEPTH_CONST * math.log2(max(2.0, m / float(eps))))


def normalize_weights(polys: Sequence[WeightedPolygon],
                      eps) -> list[WeightedPolygon]:
    """Rescale so the maximum weight is m/eps, floor to integers, drop zeros.

    The optimum of the rescaled instance is within an eps fraction of the
    original optimum (each kept polygon loses < 1 unit out of >= 1, and at
    most m units total against a maximum of m/eps)."""
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise ValueError("eps in (0,1) required")
    polys = list(polys)
    if not polys:
        return []
    m = len(polys)
    target = Fraction(m) / eps
    wmax = max(Fraction(p.weight) for p in polys)
    out = []
    for p in polys:
        w = int(Fraction(p.weight) * target / wmax)  # floor
        if w > 0:
            out.append(dataclasses.replace(p, weight=w))
    return out


@dataclass(frozen=True)
class AuditNode:
    encoding: str                    # path of (cut hex, side bit) prefixes
    depth: int
    active: int                      # polygons alive at this node
    reference_weight: int
    kind: str                        # "cut" | "heavy" | "leaf" | "fallback"
    cut_hex: str                     # hex of the cut's bit string, "" if none
    lost_weight: int                 # reference weight crossed by the cut


@dataclass(frozen=True)
class QptasResult:
    chosen: tuple[int, ...]
    weight: int
    audit: tuple[AuditNode, ...]
    max_depth: int

    @property
    def total_lost(self) -> int:
        return sum(a.lost_weight for a in self.audit)

    def audit_json(self) -> dict:
        return {
            "chosen": list(self.chosen),
            "weight": self.weight,
            "max_depth": self.max_depth,
            "total_lost": self.total_lost,
            "nodes": [dataclasses.asdict(a) for a in self.audit],
        }


def _bits_to_hex(bits: str) -> str:
    if not bits:
        return "0:"
    return "%d:%x" % (len(bits), int(bits, 2))


def _node_seed(seed: int, encoding: str) -> int:
    return seed ^ zlib.crc32(encoding.encode("ascii"))


def _exact_ids(polys: Sequence[WeightedPolygon]) -> tuple[int, list[int]]:
    if not polys:
        return 0, []
    w, ids = mwis_exact(build_conflict_graph(polys))
    return w, sorted(ids)


def solve_oracle_guided(polys: Sequence[WeightedPolygon], eps,
                        reference: Sequence[WeightedPolygon],
                        seed: int = 0,
                        frame: Optional[Frame] = None) -> QptasResult:
    """Recurse on cheap balanced cuts of the reference independent set.

    Each node builds the cut for the reference polygons still alive there,
    drops every polygon the cut crosses, and recurses on the two sides.
    Leaves (<= LEAF_SIZE active polygons or the depth cap) are solved by the
    exact oracle.  A failed cut construction falls back to the exact oracle
    and is flagged in the audit trail.  Subproblems are memoized on their
    cut-path encoding."""
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise ValueError("eps in (0,1) required")
    polys = list(polys)
    reference = list(reference)
    if not polygons_disjoint(reference):
        raise ValueError("reference must be an independent set")
    ref_ids = {p.id for p in reference}
    if not ref_ids <= {p.id for p in polys}:
        raise ValueError("reference polygons must come from the instance")
    cap = depth_cap(len(polys), eps)
    audit: list[AuditNode] = []
    memo: dict[str, tuple[int, list[int]]] = {}
    max_depth = [0]

    def leaf(active, ref, depth, enc, kind) -> tuple[int, list[int]]:
        w, ids = _exact_ids(active)
        audit.append(AuditNode(enc, depth, len(active),
                               sum(p.weight for p in ref), kind, "", 0))
        return w, ids

    def rec(active, ref, depth, enc) -> tuple[int, list[int]]:
        max_depth[0] = max(max_depth[0], depth)
        if enc in memo:
            return memo[enc]
        if len(active) <= LEAF_SIZE or depth >= cap or len(ref) <= 1:
            out = leaf(active, ref, depth, enc, "leaf")
            memo[enc] = out
            return out
        try:
            cut = cheap_balanced_cut(ref, eps, _node_seed(seed, enc),
                                     frame=frame)
        except SeparatorError:
            out = leaf(active, ref, depth, enc, "fallback")
            memo[enc] = out
            return out
        if isinstance(cut, HeavyPolygon):
            sigma = cut.polygon
            rest = [p for p in active if p.id != sigma.id
                    and not interiors_intersect(p, sigma)]
            ref_rest = [p for p in ref if p.id != sigma.id]
            audit.append(AuditNode(enc, depth, len(active),
                                   sum(p.weight for p in ref), "heavy",
                                   "", 0))
            w, ids = rec(rest, ref_rest, depth + 1, enc + "H%d." % sigma.id)
            out = (w + sigma.weight, sorted(ids + [sigma.id]))
            memo[enc] = out
            return out
        boundary = list(cut.boundary)
        parts = classify_against(active, boundary)
        ref_parts = classify_against(ref, boundary)
        lost = sum(p.weight for p in ref_parts[INTERSECTING])
        cut_hex = _bits_to_hex(cut.encoding)
        audit.append(AuditNode(enc, depth, len(active),
                               sum(p.weight for p in ref), "cut",
                               cut_hex, lost))
        wi, ii = rec(parts[INSIDE], ref_parts[INSIDE], depth + 1,
                     enc + cut_hex + "|0.")
        wo, io = rec(parts[OUTSIDE], ref_parts[OUTSIDE], depth + 1,
                     enc + cut_hex + "|1.")
        out = (wi + wo, sorted(ii + io))
        memo[enc] = out
        return out

    w, ids = rec(polys, reference, 0, "")
    by_id = {p.id: p for p in polys}
    chosen = [by_id[i] for i in ids]
    if not polygons_disjoint(chosen):
        raise QptasError("internal error: output is not independent")
    return QptasResult(tuple(ids), w, tuple(audit), max_depth[0])


def _greedy(polys: Sequence[WeightedPolygon]) -> tuple[int, list[int]]:
    chosen: list[WeightedPolygon] = []
    for p in sorted(polys, key=lambda q: (-q.weight, q.id)):
        if all(not interiors_intersect(p, c) for c in chosen):
            chosen.append(p)
    return sum(p.weight for p in chosen), sorted(p.id for p in chosen)


def _rect_split(active, x1, x2, y1, y2):
    inside, outside = [], []
    for p in active:
        bx1, bx2, by1, by2 = p.bbox()
        if x1 <= bx1 and bx2 <= x2 and y1 <= by1 and by2 <= y2:
            inside.append(p)
        elif bx2 <= x1 or bx1 >= x2 or by2 <= y1 or by1 >= y2:
            outside.append(p)
        # else: crossed by the rectangle boundary, discarded
    return inside, outside


def solve_heuristic(polys: Sequence[WeightedPolygon], eps,
                    budget: int = 50, seed: int = 0) -> QptasResult:
    """Branch-and-bound over axis-parallel rectangle cuts.

    Candidate rectangles take their coordinates from the grid of input
    bounding-box corners; at most `budget` candidates are scored per node,
    leaves are solved exactly, and a greedy packing provides the baseline.
    Output is always a feasible independent set; no approximation ratio is
    claimed."""
    eps = Fraction(eps)
    polys = list(polys)
    if budget < 0:
        raise ValueError("budget must be non-negative")
    audit: list[AuditNode] = []
    if budget == 0 or len(polys) <= LEAF_SIZE:
        w, ids = _exact_ids(polys)
        audit.append(AuditNode("", 0, len(polys), 0, "leaf", "", 0))
        return QptasResult(tuple(ids), w, tuple(audit), 0)
    rng = random.Random(seed)
    max_depth = [0]
    nodes_left = [40 * budget]    # global work cap keeps the tree bounded
    memo: dict[frozenset, tuple[int, list[int]]] = {}

    def rec(active, depth) -> tuple[int, list[int]]:
        max_depth[0] = max(max_depth[0], depth)
        if len(active) <= LEAF_SIZE:
            return _exact_ids(active)
        key = frozenset(p.id for p in active)
        if key in memo:
            return memo[key]
        best = _greedy(active)
        if nodes_left[0] <= 0:
            return best
        nodes_left[0] -= 1
        xs = sorted({c for p in active for c in (p.bbox()[0], p.bbox()[1])})
        ys = sorted({c for p in active for c in (p.bbox()[2], p.bbox()[3])})
        # score candidates cheaply, recurse only on the most promising two
        scored = []
        for _ in range(budget):
            x1, x2 = sorted(rng.sample(range(len(xs)), 2))
            y1, y2 = sorted(rng.sample(range(len(ys)), 2))
            inside, outside = _rect_split(active, xs[x1], xs[x2],
                                          ys[y1], ys[y2])
            if not inside or not outside:
                continue
            if len(inside) >= len(active) or len(outside) >= len(active):
                continue
            kept = sum(p.weight for p in inside) + \
                sum(p.weight for p in outside)
            balance = abs(len(inside) - len(outside))
            scored.append((-kept, balance, len(scored), inside, outside))
        scored.sort(key=lambda t: t[:3])
        for _, _, _, inside, outside in scored[:2]:
            wi, ii = rec(inside, depth + 1)
            wo, io = rec(outside, depth + 1)
            if wi + wo > best[0]:
                best = (wi + wo, sorted(ii + io))
        memo[key] = best
        return best

    w, ids = rec(polys, 0)
    by_id = {p.id: p for p in polys}
    if not polygons_disjoint([by_id[i] for i in ids]):
        raise QptasError("internal error: output is not independent")
    audit.append(AuditNode("", 0, len(polys), 0, "cut", "", 0))
    return QptasResult(tuple(ids), w, tuple(audit), max_depth[0])


def solve_enumerated(polys: Sequence[WeightedPolygon], eps,
                     allow: bool = False) -> QptasResult:
    """Exhaustive rectangle-cut enumeration on a small integer grid.

    Demonstration of the full enumeration scheme; refuses without the
    explicit flag or beyond m <= 8 and coordinates within [0, 16]."""
    eps = Fraction(eps)
    polys = list(polys)
    if not allow:
        raise QptasError("exhaustive enumeration must be explicitly enabled")
    if len(polys) > ENUM_MAX_M:
        raise QptasError(
            "exhaustive enumeration capped at m <= %d (got %d; "
            "state space ~ coords^4 * 2^m)" % (ENUM_MAX_M, len(polys)))
    for p in polys:
        bx1, bx2, by1, by2 = p.bbox()
        if bx1 < 0 or by1 < 0 or bx2 > ENUM_MAX_COORD or by2 > ENUM_MAX_COORD:
            raise QptasError("exhaustive enumeration requires coordinates "
                             "within [0, %d]" % ENUM_MAX_COORD)
    coords = list(range(ENUM_MAX_COORD + 1))
    memo: dict[frozenset, tuple[int, list[int]]] = {}

    def rec(active) -> tuple[int, list[int]]:
        key = frozenset(p.id for p in active)
        if key in memo:
            return memo[key]
        # leaves: a few polygons solved directly; larger nodes start from a
        # greedy packing and improve through enumerated cuts
        best = _exact_ids(active) if len(active) <= 3 else _greedy(active)
        if len(active) > 3:
            for i in range(len(coords)):
                for j in range(i + 1, len(coords)):
                    for k in range(len(coords)):
                        for l in range(k + 1, len(coords)):
                            inside, outside = _rect_split(
                                active, coords[i], coords[j],
                                coords[k], coords[l])
                            if not inside or not outside:
                                continue
                            wi, ii = rec(inside)
                            wo, io = rec(outside)
                            if wi + wo > best[0]:
                                best = (wi + wo, sorted(ii + io))
        memo[key] = best
        return best

    w, ids = rec(polys)
    audit = (AuditNode("", 0, len(polys), 0, "leaf", "", 0),)
    return QptasResult(tuple(ids), w, audit, 0)
