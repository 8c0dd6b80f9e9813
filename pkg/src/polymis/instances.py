"""Instance files and seeded generators.

JSON on disk, rational coordinates as "p/q" strings (bare integers allowed),
explicit version field.  Generators are deterministic given the master seed;
per-item randomness is derived from a single random.Random stream.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .geom import (Frame, Point, Rect, WeightedPolygon, general_position,
                   make_rect, polygons_disjoint, rat)

FORMAT_VERSION = 1

KIND_POLYGONS = "polygons"
KIND_RECTANGLES = "rectangles"
KIND_BLOCKS = "blocks"


@dataclass(frozen=True)
class Instance:
    kind: str
    n: int
    items: tuple
    delta: Fraction | None = None
    eps: Fraction | None = None

    @property
    def frame(self) -> Frame:
        return Frame(make_rect(0, self.n, 0, self.n))

    def polygons(self) -> list[WeightedPolygon]:
        if self.kind != KIND_POLYGONS:
            raise ValueError("not a polygon instance")
        return list(self.items)

    def rects(self) -> list[tuple[int, Rect]]:
        if self.kind not in (KIND_RECTANGLES, KIND_BLOCKS):
            raise ValueError("not a rectangle instance")
        return list(self.items)


def _rat_str(x: Fraction) -> str:
    return str(x)


def write_instance(inst: Instance, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(inst), fh, indent=1, sort_keys=True)
        fh.write("\n")


def instance_to_dict(inst: Instance) -> dict:
    doc = {
        "version": FORMAT_VERSION,
        "kind": inst.kind,
        "n": inst.n,
        "delta": _rat_str(inst.delta) if inst.delta is not None else None,
        "eps": _rat_str(inst.eps) if inst.eps is not None else None,
    }
    items = []
    if inst.kind == KIND_POLYGONS:
        for p in inst.items:
            items.append({
                "id": p.id,
                "weight": p.weight,
                "vertices": [[_rat_str(v.x), _rat_str(v.y)] for v in p.vertices],
            })
    else:
        for pid, r in inst.items:
            items.append({
                "id": pid,
                "weight": r.weight,
                "x1": _rat_str(r.x1), "x2": _rat_str(r.x2),
                "y1": _rat_str(r.y1), "y2": _rat_str(r.y2),
            })
    doc["items"] = items
    return doc


def instance_from_dict(doc: dict) -> Instance:
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError("unsupported instance version: %r" % (doc.get("version"),))
    kind = doc["kind"]
    if kind not in (KIND_POLYGONS, KIND_RECTANGLES, KIND_BLOCKS):
        raise ValueError("unknown instance kind: %r" % (kind,))
    delta = rat(doc["delta"]) if doc.get("delta") else None
    eps = rat(doc["eps"]) if doc.get("eps") else None
    items: list = []
    if kind == KIND_POLYGONS:
        for it in doc["items"]:
            verts = tuple(Point(rat(x), rat(y)) for x, y in it["vertices"])
            items.append(WeightedPolygon(verts, int(it["weight"]), int(it["id"])))
    else:
        for it in doc["items"]:
            items.append((int(it["id"]),
                          Rect(rat(it["x1"]), rat(it["x2"]), rat(it["y1"]), rat(it["y2"]),
                               int(it["weight"]))))
    return Instance(kind, int(doc["n"]), tuple(items), delta, eps)


def read_instance(path: str) -> Instance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Generators


class PlacementError(RuntimeError):
    pass


def gen_disjoint_polygons(m: int, n: int, seed: int, shape: str = "squares",
                          weights: tuple[int, int] = (1, 1),
                          max_side: int | None = None) -> Instance:
    """m pairwise-disjoint polygons strictly inside [0,n]^2, sheared to
    general position.  Placement keeps an L-inf gap >= 1 between bounding
    boxes so downstream structure stays well separated.
    """
    if m < 1:
        raise ValueError("m >= 1 required")
    rng = random.Random(seed)
    smax = max_side if max_side is not None else 2
    boxes: list[tuple[int, int, int]] = []  # (x, y, side)
    attempts_cap = 500 * m
    attempts = 0
    while len(boxes) < m:
        attempts += 1
        if attempts > attempts_cap:
            raise PlacementError(
                "placement failed after %d attempts (m=%d, n=%d): frame too dense"
                % (attempts, m, n))
        side = rng.randint(1, smax)
        if n - 2 - side < 1:
            raise PlacementError("frame side %d too small for polygons of side %d" % (n, side))
        x = rng.randint(1, n - 2 - side)
        y = rng.randint(1, n - 2 - side)
        ok = True
        for (bx, by, bs) in boxes:
            if not (x + side + 1 <= bx or bx + bs + 1 <= x
                    or y + side + 1 <= by or by + bs + 1 <= y):
                ok = False
                break
        if ok:
            boxes.append((x, y, side))
    polys: list[WeightedPolygon] = []
    for pid, (x, y, side) in enumerate(boxes):
        w = rng.randint(weights[0], weights[1])
        if shape == "squares":
            coords = [(x, y), (x + side, y), (x + side, y + side), (x, y + side)]
        elif shape == "convex":
            coords = _random_convex_in_box(rng, x, y, side)
        else:
            raise ValueError("unknown shape %r" % (shape,))
        polys.append(WeightedPolygon(tuple(Point(rat(cx), rat(cy)) for cx, cy in coords),
                                     w, pid))
    sheared, _shear = general_position(polys)
    assert polygons_disjoint(sheared)
    frame = Frame(make_rect(0, n, 0, n))
    for p in sheared:
        assert frame.contains_polygon(p)
    return Instance(KIND_POLYGONS, n, tuple(sheared))


def _random_convex_in_box(rng: random.Random, x: int, y: int, side: int) -> list[tuple]:
    """Random convex polygon: convex hull of points on a fine grid in the box."""
    denom = 8
    pts = set()
    while len(pts) < 6:
        pts.add((Fraction(rng.randint(0, side * denom), denom) + x,
                 Fraction(rng.randint(0, side * denom), denom) + y))
    hull = _convex_hull(sorted(pts))
    if len(hull) < 3:
        # collinear degenerate draw: fall back to the box itself
        return [(x, y), (x + side, y), (x + side, y + side), (x, y + side)]
    return hull


def _convex_hull(pts: list[tuple]) -> list[tuple]:
    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def gen_delta_large(m: int, n: int, delta: Fraction, seed: int,
                    blocks_only: bool = False,
                    weights: tuple[int, int] = (1, 10)) -> Instance:
    """m delta-large rectangles (unit thickness if blocks_only), integer
    coordinates in [0,n]^2, possibly overlapping."""
    delta = rat(delta)
    if delta <= 0 or delta > 1:
        raise ValueError("delta in (0,1] required")
    if (1 / delta).denominator != 1 or (delta * n).denominator != 1:
        raise ValueError("parameters not grid-compatible: need 1/delta and delta*n integral")
    big = int(delta * n)  # long side must exceed this
    if big + 1 > n:
        raise ValueError("infeasible parameters: delta*n + 1 > n")
    rng = random.Random(seed)
    items: list[tuple[int, Rect]] = []
    for pid in range(m):
        w = rng.randint(weights[0], weights[1])
        horizontal = rng.random() < 0.5
        length = rng.randint(big + 1, n)
        thick = 1 if blocks_only else rng.randint(1, n)
        lo_l = rng.randint(0, n - length)
        lo_t = rng.randint(0, n - thick)
        if horizontal:
            r = Rect(rat(lo_l), rat(lo_l + length), rat(lo_t), rat(lo_t + thick), w)
        else:
            r = Rect(rat(lo_t), rat(lo_t + thick), rat(lo_l), rat(lo_l + length), w)
        items.append((pid, r))
    return Instance(KIND_BLOCKS if blocks_only else KIND_RECTANGLES, n, tuple(items),
                    delta=delta)
