"""Exact maximum-weight independent set over geometric intersection graphs.

Ground truth for tests and leaf solver for the recursive schemes.  Bitmask
DP per connected component up to 30 vertices, branch and bound up to 60;
isolated vertices are free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .geom import Rect, WeightedPolygon, interiors_intersect, rects_interiors_intersect

BITMASK_CAP = 30
BRANCH_CAP = 60


@dataclass(frozen=True)
class ConflictGraph:
    ids: tuple[int, ...]
    weights: dict[int, int]
    adj: dict[int, frozenset[int]]

    def degree(self, v: int) -> int:
        return len(self.adj[v])


def build_conflict_graph(polys: Sequence[WeightedPolygon]) -> ConflictGraph:
    ids = tuple(p.id for p in polys)
    if len(set(ids)) != len(ids):
        raise ValueError("polygon ids must be unique")
    weights = {p.id: p.weight for p in polys}
    adj: dict[int, set[int]] = {i: set() for i in ids}
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if interiors_intersect(polys[i], polys[j]):
                adj[polys[i].id].add(polys[j].id)
                adj[polys[j].id].add(polys[i].id)
    return ConflictGraph(ids, weights, {v: frozenset(s) for v, s in adj.items()})


def conflict_graph_of_rects(rects: Sequence[tuple[int, Rect]]) -> ConflictGraph:
    ids = tuple(i for i, _ in rects)
    if len(set(ids)) != len(ids):
        raise ValueError("ids must be unique")
    weights = {i: r.weight for i, r in rects}
    adj: dict[int, set[int]] = {i: set() for i in ids}
    for a in range(len(rects)):
        for b in range(a + 1, len(rects)):
            ia, ra = rects[a]
            ib, rb = rects[b]
            if rects_interiors_intersect(ra, rb):
                adj[ia].add(ib)
                adj[ib].add(ia)
    return ConflictGraph(ids, weights, {v: frozenset(s) for v, s in adj.items()})


def _components(g: ConflictGraph) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for v in g.ids:
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in g.adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _mwis_bitmask(verts: list[int], g: ConflictGraph) -> tuple[int, frozenset[int]]:
    n = len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    nbr = [0] * n
    for v in verts:
        m = 0
        for u in g.adj[v]:
            if u in idx:
                m |= 1 << idx[u]
        nbr[idx[v]] = m
    w = [g.weights[v] for v in verts]

    memo: dict[int, tuple[int, int]] = {}

    def best(mask: int) -> tuple[int, int]:
        if mask == 0:
            return (0, 0)
        if mask in memo:
            return memo[mask]
        i = mask.bit_length() - 1
        # skip i
        w0, s0 = best(mask & ~(1 << i))
        # take i
        w1, s1 = best(mask & ~(1 << i) & ~nbr[i])
        w1 += w[i]
        s1 |= 1 << i
        if w1 > w0 or (w1 == w0 and _ids_of(s1, verts) < _ids_of(s0, verts)):
            res = (w1, s1)
        else:
            res = (w0, s0)
        memo[mask] = res
        return res

    bw, bs = best((1 << n) - 1)
    return bw, frozenset(verts[i] for i in range(n) if bs >> i & 1)


def _ids_of(sel_mask: int, verts: list[int]) -> tuple[int, ...]:
    return tuple(sorted(verts[i] for i in range(len(verts)) if sel_mask >> i & 1))


def _mwis_branch(verts: list[int], g: ConflictGraph) -> tuple[int, frozenset[int]]:
    best = [0, frozenset()]

    def rec(active: frozenset[int], cur_w: int, cur_set: frozenset[int]):
        ub = cur_w + sum(g.weights[v] for v in active)
        if ub < best[0]:
            return
        if not active:
            cand = (cur_w, tuple(sorted(cur_set)))
            if cur_w > best[0] or (cur_w == best[0] and (not best[1] or tuple(sorted(cur_set)) < tuple(sorted(best[1])))):
                best[0], best[1] = cur_w, cur_set
            return
        # pick max-degree (within active) vertex
        v = max(active, key=lambda u: (len(g.adj[u] & active), g.weights[u], -u))
        # take v
        rec(active - {v} - g.adj[v], cur_w + g.weights[v], cur_set | {v})
        # skip v (only useful if v has neighbors; otherwise taking dominates)
        if g.adj[v] & active:
            rec(active - {v}, cur_w, cur_set)

    rec(frozenset(verts), 0, frozenset())
    return best[0], best[1]


def mwis_exact(g: ConflictGraph) -> tuple[int, frozenset[int]]:
    """Exact MWIS; deterministic lexicographic tie-break on the chosen id set."""
    total_w = 0
    chosen: set[int] = set()
    for comp in _components(g):
        if len(comp) == 1:
            total_w += g.weights[comp[0]]
            chosen.add(comp[0])
        elif len(comp) <= BITMASK_CAP:
            w, s = _mwis_bitmask(comp, g)
            total_w += w
            chosen |= s
        elif len(comp) <= BRANCH_CAP:
            w, s = _mwis_branch(comp, g)
            total_w += w
            chosen |= s
        else:
            raise ValueError(
                "component of size %d exceeds exact-solver cap (%d)" % (len(comp), BRANCH_CAP))
    return total_w, frozenset(chosen)


def is_independent(g: ConflictGraph, ids: Sequence[int]) -> bool:
    s = set(ids)
    return all(not (g.adj[v] & s) for v in s)
