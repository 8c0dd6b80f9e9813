"""Weighted random samples, heavy-corridor detection, the exponential-decay
experiment, and 1/r-cutting construction.

A rho-sample includes each polygon independently with probability
rho * w_i / W (clamped to 1).  A corridor is t-heavy when the total weight
of its conflict list reaches t * W / rho.  A 1/r-cutting is a corridor
decomposition of a sample union in which every corridor's conflict weight
is at most W / r; the sample polygons themselves are kept as island
regions of the cutting.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .corridors import CorridorDecomposition, build_corridors, conflict_list
from .geom import Frame, WeightedPolygon, interiors_intersect

DEFAULT_C = 2.0
U2 = 3  # corridor count of a two-polygon decomposition, |CD| <= 3m-3 = 3
DEFAULT_RETRY_CAP = 10


@dataclass(frozen=True)
class SampleParams:
    rho: Fraction
    seed: int

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative")


@dataclass(frozen=True)
class Cutting:
    decomposition: CorridorDecomposition
    islands: tuple[int, ...]              # sample polygon ids kept as regions
    r: int
    weights: dict                         # corridor cid -> conflict weight
    island_weights: dict                  # island polygon id -> conflict weight
    retries: int
    clamp_warnings: int

    @property
    def size(self) -> int:
        return len(self.decomposition.corridors) + len(self.islands)


def total_weight(polys: Sequence[WeightedPolygon]) -> int:
    return sum(p.weight for p in polys)


def rho_sample(polys: Sequence[WeightedPolygon],
               params: SampleParams) -> list[WeightedPolygon]:
    """Independent inclusion with probability rho*w_i/W, deterministic in seed.

    Returns the sampled subset in input order.  Probabilities above 1 are
    clamped (recorded by sample_with_warnings).
    """
    sample, _ = sample_with_warnings(polys, params)
    return sample


def sample_with_warnings(polys: Sequence[WeightedPolygon],
                         params: SampleParams
                         ) -> tuple[list[WeightedPolygon], int]:
    if params.rho > len(polys):
        raise ValueError("rho must not exceed the number of polygons")
    W = total_weight(polys)
    rng = random.Random(params.seed)
    out = []
    clamped = 0
    for p in polys:
        prob = Fraction(params.rho) * p.weight / W
        if prob > 1:
            prob = Fraction(1)
            clamped += 1
        if rng.random() < prob:
            out.append(p)
    return out, clamped


def conflict_weights(decomp: CorridorDecomposition,
                     universe: Sequence[WeightedPolygon]) -> dict:
    """Exact conflict-list weight per corridor cid."""
    by_id = {p.id: p.weight for p in universe}
    out = {}
    for c in decomp.corridors:
        ids = c.conflicts if c.conflicts is not None else \
            tuple(conflict_list(c, universe))
        out[c.cid] = sum(by_id[i] for i in ids)
    return out


def attach_conflicts(decomp: CorridorDecomposition,
                     universe: Sequence[WeightedPolygon]) -> None:
    for c in decomp.corridors:
        if c.conflicts is None:
            c.conflicts = tuple(conflict_list(c, universe))


def heavy_corridors(decomp: CorridorDecomposition,
                    universe: Sequence[WeightedPolygon],
                    t, rho) -> list:
    """Corridors whose conflict-list weight is >= t * W / rho."""
    if t < 0:
        raise ValueError("t must be non-negative")
    W = total_weight(universe)
    threshold = Fraction(t) * W / Fraction(rho)
    weights = conflict_weights(decomp, universe)
    return [c for c in decomp.corridors if weights[c.cid] >= threshold]


def _union_sample(polys: Sequence[WeightedPolygon], rho,
                  rng: random.Random) -> list[WeightedPolygon]:
    """S = S1 union S2 for two independent rho-samples."""
    s1 = rho_sample(polys, SampleParams(Fraction(rho), rng.randrange(2 ** 63)))
    s2 = rho_sample(polys, SampleParams(Fraction(rho), rng.randrange(2 ** 63)))
    ids = {p.id for p in s1} | {p.id for p in s2}
    return [p for p in polys if p.id in ids]


@dataclass(frozen=True)
class DecayRow:
    t: Fraction
    trials: int
    mean_heavy: float
    stderr: float


def decay_experiment(polys: Sequence[WeightedPolygon], rho,
                     t_values: Sequence, trials: int, seed: int,
                     frame: Optional[Frame] = None) -> list[DecayRow]:
    """Mean t-heavy corridor count of CD(S1 union S2) over seeded trials."""
    if trials < 1:
        raise ValueError("trials >= 1 required")
    if frame is None:
        frame = _bounding_frame(polys)
    rho = Fraction(rho)
    ts = [Fraction(t) for t in t_values]
    W = total_weight(polys)
    rng = random.Random(seed)
    counts = {t: [] for t in ts}
    for _ in range(trials):
        sample = _union_sample(polys, rho, rng)
        if len(sample) < 1:
            for t in ts:
                counts[t].append(0)
            continue
        decomp = build_corridors(sample, frame)
        weights = conflict_weights(decomp, polys)
        for t in ts:
            threshold = t * W / rho
            counts[t].append(sum(1 for w in weights.values() if w >= threshold))
    rows = []
    for t in ts:
        data = counts[t]
        mean = sum(data) / trials
        var = sum((x - mean) ** 2 for x in data) / max(1, trials - 1)
        rows.append(DecayRow(t, trials, mean, math.sqrt(var / trials)))
    return rows


def decay_csv(rows: Sequence[DecayRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["t", "trials", "mean_heavy", "stderr"])
    for row in rows:
        w.writerow([str(row.t), row.trials,
                    "%.6g" % row.mean_heavy, "%.6g" % row.stderr])
    return buf.getvalue()


def fitted_slope(rows: Sequence[DecayRow]) -> float:
    """Least-squares slope of log(mean_heavy) against t (zero means dropped)."""
    pts = [(float(r.t), math.log(r.mean_heavy)) for r in rows if r.mean_heavy > 0]
    if len(pts) < 2:
        raise ValueError("need at least two positive means to fit a slope")
    n = len(pts)
    sx = sum(x for x, _ in pts)
    sy = sum(y for _, y in pts)
    sxx = sum(x * x for x, _ in pts)
    sxy = sum(x * y for x, y in pts)
    return (n * sxy - sx * sy) / (n * sxx - sx * sx)


class CuttingError(RuntimeError):
    pass


def cutting_rho(r: int, c: float = DEFAULT_C) -> Fraction:
    return Fraction(r) * (Fraction(c * math.log(r)).limit_denominator(10 ** 6)
                          + Fraction(math.log(U2)).limit_denominator(10 ** 6))


def build_cutting(polys: Sequence[WeightedPolygon], r: int, seed: int,
                  c: float = DEFAULT_C,
                  retry_cap: int = DEFAULT_RETRY_CAP,
                  frame: Optional[Frame] = None) -> Cutting:
    """Draw samples until every corridor's conflict weight is <= W/r."""
    if r < 2:
        raise ValueError("r >= 2 required")
    if frame is None:
        frame = _bounding_frame(polys)
    W = total_weight(polys)
    rho = min(cutting_rho(r, c), Fraction(len(polys)))
    rng = random.Random(seed)
    threshold = Fraction(W, r)
    failures = []
    for attempt in range(retry_cap + 1):
        s1, cl1 = sample_with_warnings(
            polys, SampleParams(rho, rng.randrange(2 ** 63)))
        s2, cl2 = sample_with_warnings(
            polys, SampleParams(rho, rng.randrange(2 ** 63)))
        ids = {p.id for p in s1} | {p.id for p in s2}
        sample = [p for p in polys if p.id in ids]
        if len(sample) < 1:
            failures.append("empty sample")
            continue
        decomp = build_corridors(sample, frame)
        weights = conflict_weights(decomp, polys)
        worst = max(weights.values(), default=Fraction(0))
        if worst <= threshold:
            island_w = _island_weights(sample, polys)
            if all(w <= threshold for w in island_w.values()):
                return Cutting(decomp, tuple(p.id for p in sample), r,
                               weights, island_w, attempt, cl1 + cl2)
            failures.append("island conflict weight %s > W/r" %
                            max(island_w.values()))
        else:
            failures.append("corridor conflict weight %s > W/r = %s"
                            % (worst, threshold))
    raise CuttingError(
        "cutting construction failed after %d attempts (r=%d, rho=%s): %s"
        % (retry_cap + 1, r, rho, "; ".join(failures[-3:])))


def _island_weights(sample: Sequence[WeightedPolygon],
                    universe: Sequence[WeightedPolygon]) -> dict:
    """Conflict weight of each island region (zero for disjoint inputs)."""
    out = {}
    sids = {p.id for p in sample}
    for isl in sample:
        out[isl.id] = sum(q.weight for q in universe
                          if q.id not in sids and interiors_intersect(isl, q))
    return out


def _bounding_frame(polys: Sequence[WeightedPolygon]) -> Frame:
    from .geom import make_rect
    xs = [v.x for p in polys for v in p.vertices]
    ys = [v.y for p in polys for v in p.vertices]
    lo = min(min(xs), min(ys))
    hi = max(max(xs), max(ys))
    pad = max(Fraction(1), (hi - lo) / 8)
    return Frame(make_rect(lo - pad, hi + pad, lo - pad, hi + pad))
