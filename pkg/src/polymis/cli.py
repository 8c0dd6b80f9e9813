"""Command-line interface: generators, solvers, experiments, benchmarks.

Exit codes: 0 success, 2 invalid input, 3 caps exceeded, 4 internal
structural invariant violated.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction

from . import blocks as blocks_mod
from . import instances as inst_mod
from .blocks import (BlocksError, CapsExceeded, build_grid, build_partition,
                     solve_blocks, solve_rectangles, verify_partition)
from .corridors import build_corridors, verify_tiling
from .cuttings import (CuttingError, build_cutting, decay_csv,
                       decay_experiment, fitted_slope, total_weight)
from .geom import polygon, rect_to_vertices
from .instances import (Instance, PlacementError, gen_delta_large,
                        gen_disjoint_polygons, instance_to_dict,
                        read_instance, write_instance)
from .oracle import build_conflict_graph, mwis_exact
from .qptas import (QptasError, solve_enumerated, solve_heuristic,
                    solve_oracle_guided)
from .separator import (HeavyPolygon, SeparatorError, cheap_balanced_cut,
                        decode)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAPS = 3
EXIT_STRUCTURAL = 4

ORACLE_CAP_M = 16


class StructuralViolation(RuntimeError):
    pass


def _rect_polygons(items):
    return [polygon([(p.x, p.y) for p in rect_to_vertices(r)], r.weight, i)
            for i, r in items]


def _instance_polygons(inst: Instance):
    """Polygon view of any instance kind (rectangles become 4-gons)."""
    if inst.kind == inst_mod.KIND_POLYGONS:
        return inst.polygons()
    return _rect_polygons(inst.rects())


def _exact(inst: Instance):
    return mwis_exact(build_conflict_graph(_instance_polygons(inst)))


def instance_hash(inst: Instance) -> str:
    doc = json.dumps(instance_to_dict(inst), sort_keys=True)
    return hashlib.sha256(doc.encode()).hexdigest()[:16]


def _emit(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path: str | None) -> Instance:
    if not path:
        raise ValueError("--input is required")
    return read_instance(path)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_gen(args) -> int:
    if args.mode in ("squares", "convex"):
        inst = gen_disjoint_polygons(args.m, args.n, args.seed,
                                     shape=args.mode,
                                     weights=(1, args.max_weight))
    elif args.mode in ("rectangles", "blocks"):
        if args.delta is None:
            raise ValueError("--delta is required for %s" % args.mode)
        inst = gen_delta_large(args.m, args.n, Fraction(args.delta),
                               args.seed, blocks_only=args.mode == "blocks",
                               weights=(1, args.max_weight))
    else:
        raise ValueError("unknown --mode %r" % (args.mode,))
    if args.output:
        write_instance(inst, args.output)
    else:
        _emit(instance_to_dict(inst), None)
    return EXIT_OK


def cmd_solve_exact(args) -> int:
    inst = _load(args.input)
    if len(inst.items) > args.caps:
        raise CapsExceeded("exact oracle capped at m <= %d (got %d); raise "
                           "--caps explicitly to override"
                           % (args.caps, len(inst.items)))
    w, ids = _exact(inst)
    _emit({"algorithm": "exact", "weight": w, "chosen": sorted(ids)},
          args.output)
    return EXIT_OK


def cmd_solve_qptas(args) -> int:
    inst = _load(args.input)
    polys = inst.polygons()
    eps = Fraction(args.eps)
    if args.mode == "oracle-guided":
        if len(polys) > args.caps * 8:
            raise CapsExceeded("reference oracle capped at m <= %d"
                               % (args.caps * 8))
        _, ids = mwis_exact(build_conflict_graph(polys))
        ref = [p for p in polys if p.id in ids]
        res = solve_oracle_guided(polys, eps, ref, seed=args.seed,
                                  frame=inst.frame)
    elif args.mode == "heuristic":
        res = solve_heuristic(polys, eps, seed=args.seed)
    elif args.mode == "enumerated":
        res = solve_enumerated(polys, eps, allow=True)
    else:
        raise ValueError("unknown --mode %r" % (args.mode,))
    _emit({"algorithm": "qptas-" + args.mode, "weight": res.weight,
           "chosen": sorted(res.chosen), "max_depth": res.max_depth,
           "total_lost": res.total_lost,
           "audit_nodes": len(res.audit)}, args.output)
    return EXIT_OK


def cmd_solve_blocks(args) -> int:
    inst = _load(args.input)
    if inst.kind != inst_mod.KIND_BLOCKS:
        raise ValueError("solve-blocks needs a blocks instance")
    delta = Fraction(args.delta) if args.delta else inst.delta
    if delta is None:
        raise ValueError("--delta is required (instance carries none)")
    res = solve_blocks(inst.n, Fraction(args.eps), delta, inst.rects(),
                       cap_n=args.caps)
    _emit({"algorithm": "blocks", "weight": res.weight,
           "chosen": sorted(res.chosen), "candidates": res.candidates},
          args.output)
    return EXIT_OK


def cmd_solve_rects(args) -> int:
    inst = _load(args.input)
    if inst.kind not in (inst_mod.KIND_RECTANGLES, inst_mod.KIND_BLOCKS):
        raise ValueError("solve-rects needs a rectangle instance")
    delta = Fraction(args.delta) if args.delta else inst.delta
    if delta is None:
        raise ValueError("--delta is required (instance carries none)")
    res = solve_rectangles(inst.n, Fraction(args.eps), delta, inst.rects(),
                           cap_n=args.caps)
    _emit({"algorithm": "rects", "weight": res.weight,
           "chosen": sorted(res.chosen), "candidates": res.candidates},
          args.output)
    return EXIT_OK


def cmd_decompose(args) -> int:
    inst = _load(args.input)
    polys = inst.polygons()
    decomp = build_corridors(polys, inst.frame)
    got, want = verify_tiling(decomp, polys)
    if got != want:
        raise StructuralViolation("tiling identity failed: %s != %s"
                                  % (got, want))
    m = len(polys)
    count = len(decomp.corridors)
    doc = {
        "m": m,
        "corridors": count,
        "bound_3m_minus_3": max(0, 3 * m - 3),
        "within_bound": count <= max(0, 3 * m - 3) or m <= 1,
        "defining_set_sizes": sorted(len(c.defining_set)
                                     for c in decomp.corridors),
    }
    if m > 1 and not doc["within_bound"]:
        raise StructuralViolation("corridor count %d exceeds 3m-3" % count)
    _emit(doc, args.output)
    return EXIT_OK


def cmd_cut(args) -> int:
    inst = _load(args.input)
    polys = inst.polygons()
    out = cheap_balanced_cut(polys, Fraction(args.eps), args.seed,
                             frame=inst.frame)
    if isinstance(out, HeavyPolygon):
        _emit({"kind": "heavy", "polygon": out.polygon.id,
               "weight": out.polygon.weight}, args.output)
        return EXIT_OK
    back = decode(out.encoding, polys, inst.frame)
    if back.boundary != out.boundary:
        raise StructuralViolation("encode/decode round trip failed")
    _emit({"kind": "cut", "cut_weight": str(out.cut_weight),
           "inside_weight": str(out.inside_weight),
           "outside_weight": str(out.outside_weight),
           "boundary_vertices": len(out.boundary),
           "encoding_bits": len(out.encoding)}, args.output)
    return EXIT_OK


def cmd_cutting(args) -> int:
    inst = _load(args.input)
    polys = inst.polygons()
    cutting = build_cutting(polys, args.r, args.seed, frame=inst.frame)
    W = total_weight(polys)
    worst = max(list(cutting.weights.values())
                + list(cutting.island_weights.values()) + [Fraction(0)])
    if worst * args.r > W:
        raise StructuralViolation("conflict weight %s exceeds W/r" % worst)
    _emit({"r": args.r, "size": cutting.size, "retries": cutting.retries,
           "max_conflict_weight": str(worst), "total_weight": W},
          args.output)
    return EXIT_OK


def cmd_decay(args) -> int:
    inst = _load(args.input)
    polys = inst.polygons()
    ts = [Fraction(t) for t in args.t.split(",")]
    rows = decay_experiment(polys, Fraction(args.rho), ts, args.trials,
                            args.seed, frame=inst.frame)
    text = decay_csv(rows)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    sys.stderr.write("fitted slope: %.4f\n" % fitted_slope(rows))
    return EXIT_OK


def cmd_verify_partition(args) -> int:
    inst = _load(args.input)
    if inst.kind != inst_mod.KIND_BLOCKS:
        raise ValueError("verify-partition needs a blocks instance")
    items = inst.rects()
    if len(items) > ORACLE_CAP_M:
        raise CapsExceeded("reference oracle capped at m <= %d"
                           % ORACLE_CAP_M)
    delta = Fraction(args.delta) if args.delta else inst.delta
    if delta is None:
        raise ValueError("--delta is required (instance carries none)")
    eps = Fraction(args.eps)
    _, ids = _exact(inst)
    ref = [it for it in items if it[0] in ids]
    grid = build_grid(inst.n, delta)
    part = build_partition(ref, grid, eps / 4)
    report = verify_partition(part, ref, eps, delta)
    report["cut_weight"] = int(report["cut_weight"])
    _emit(report, args.output)
    if report["violations"]:
        return EXIT_STRUCTURAL
    return EXIT_OK


# ---------------------------------------------------------------------------
# Benchmarks

BENCH_ALGORITHMS = ("exact", "qptas-guided", "qptas-heuristic",
                    "blocks", "rects")

CSV_FIELDS = ("instance_hash", "algorithm", "seed", "params", "weight",
              "oracle_weight", "gap", "wall_time", "audit")


def _gen_from_plan(spec: dict) -> Instance:
    kind = spec.get("kind")
    if kind in ("squares", "convex"):
        return gen_disjoint_polygons(int(spec["m"]), int(spec["n"]),
                                     int(spec["seed"]), shape=kind,
                                     weights=(1, int(spec.get("max_weight",
                                                              1))))
    if kind in ("rectangles", "blocks"):
        return gen_delta_large(int(spec["m"]), int(spec["n"]),
                               Fraction(spec["delta"]), int(spec["seed"]),
                               blocks_only=kind == "blocks",
                               weights=(1, int(spec.get("max_weight", 10))))
    raise ValueError("unknown generator kind %r" % (kind,))


def _bench_row(run: dict) -> dict:
    inst = _gen_from_plan(run["generator"])
    algorithm = run["algorithm"]
    seed = int(run.get("seed", 0))
    params = dict(run.get("params", {}))
    eps = Fraction(params.get("eps", "1/2"))
    t0 = time.perf_counter()
    audit = ""
    if algorithm == "exact":
        weight, _ = _exact(inst)
    elif algorithm == "qptas-guided":
        polys = inst.polygons()
        _, ids = mwis_exact(build_conflict_graph(polys))
        ref = [p for p in polys if p.id in ids]
        res = solve_oracle_guided(polys, eps, ref, seed=seed,
                                  frame=inst.frame)
        weight = res.weight
        audit = "depth=%d lost=%d nodes=%d" % (res.max_depth,
                                               res.total_lost,
                                               len(res.audit))
    elif algorithm == "qptas-heuristic":
        res = solve_heuristic(inst.polygons(), eps, seed=seed)
        weight = res.weight
        audit = "depth=%d nodes=%d" % (res.max_depth, len(res.audit))
    elif algorithm == "blocks":
        res = solve_blocks(inst.n, eps, inst.delta, inst.rects())
        weight = res.weight
        audit = "candidates=%d" % res.candidates
    elif algorithm == "rects":
        res = solve_rectangles(inst.n, eps, inst.delta, inst.rects())
        weight = res.weight
        audit = "candidates=%d" % res.candidates
    else:   # pragma: no cover - validated before any run
        raise ValueError("unknown algorithm %r" % (algorithm,))
    wall = time.perf_counter() - t0
    row = {
        "instance_hash": instance_hash(inst),
        "algorithm": algorithm,
        "seed": seed,
        "params": json.dumps(params, sort_keys=True),
        "weight": weight,
        "oracle_weight": "",
        "gap": "",
        "wall_time": "%.6f" % wall,
        "audit": audit,
    }
    if run.get("oracle") and algorithm != "exact":
        ow, _ = _exact(inst)
        row["oracle_weight"] = ow
        row["gap"] = "%.6f" % (ow / weight if weight else float("inf"))
    return row


def bench(plan: dict, jobs: int = 4) -> str:
    runs = plan.get("runs")
    if not isinstance(runs, list) or not runs:
        raise ValueError("plan must contain a non-empty 'runs' list")
    for run in runs:
        if run.get("algorithm") not in BENCH_ALGORITHMS:
            raise ValueError("unknown algorithm %r (choose from %s)"
                             % (run.get("algorithm"),
                                ", ".join(BENCH_ALGORITHMS)))
        _gen_from_plan(dict(run["generator"]))   # validate before any run
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS)
    writer.writeheader()
    if jobs > 1 and len(runs) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_bench_row, runs))
    else:
        rows = [_bench_row(run) for run in runs]
    for row in rows:            # plan order
        writer.writerow(row)
    return buf.getvalue()


def cmd_bench(args) -> int:
    if not args.input:
        raise ValueError("--input plan file is required")
    with open(args.input) as fh:
        plan = json.load(fh)
    text = bench(plan, jobs=args.jobs)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polymis",
        description="MWIS of polygons and large rectangles: exact "
                    "decompositions and approximation schemes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, eps=False, delta=False):
        p.add_argument("--input", help="instance (or plan) JSON file")
        p.add_argument("--output", help="write result here (default stdout)")
        p.add_argument("--seed", type=int, default=0)
        if eps:
            p.add_argument("--eps", default="1/2",
                           help="accuracy parameter, a rational like 1/2")
        if delta:
            p.add_argument("--delta", default=None,
                           help="largeness parameter, a rational like 1/4")

    p = sub.add_parser("gen", help="generate an instance")
    common(p, delta=True)
    p.add_argument("--mode", default="squares",
                   choices=("squares", "convex", "rectangles", "blocks"))
    p.add_argument("--m", type=int, default=8, help="number of items")
    p.add_argument("--n", type=int, default=64, help="frame side")
    p.add_argument("--max-weight", type=int, default=10)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve-exact", help="exact optimum (small m)")
    common(p)
    p.add_argument("--caps", type=int, default=ORACLE_CAP_M,
                   help="refuse instances with more items than this")
    p.set_defaults(func=cmd_solve_exact)

    p = sub.add_parser("solve-qptas", help="recursive scheme on cuts")
    common(p, eps=True)
    p.add_argument("--mode", default="oracle-guided",
                   choices=("oracle-guided", "heuristic", "enumerated"))
    p.add_argument("--caps", type=int, default=ORACLE_CAP_M)
    p.set_defaults(func=cmd_solve_qptas)

    p = sub.add_parser("solve-blocks", help="PTAS for unit-thickness blocks")
    common(p, eps=True, delta=True)
    p.add_argument("--caps", type=int, default=blocks_mod.DEFAULT_CAP_N,
                   help="largest frame side accepted for full enumeration")
    p.set_defaults(func=cmd_solve_blocks)

    p = sub.add_parser("solve-rects", help="PTAS for delta-large rectangles")
    common(p, eps=True, delta=True)
    p.add_argument("--caps", type=int, default=blocks_mod.DEFAULT_CAP_N)
    p.set_defaults(func=cmd_solve_rects)

    p = sub.add_parser("decompose", help="corridor decomposition summary")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("cut", help="cheap balanced cut with round trip")
    common(p, eps=True)
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("cutting", help="build and check a 1/r-cutting")
    common(p)
    p.add_argument("--r", type=int, default=4)
    p.set_defaults(func=cmd_cutting)

    p = sub.add_parser("decay", help="heavy-corridor decay experiment")
    common(p)
    p.add_argument("--rho", default="40")
    p.add_argument("--t", default="1,2,4,8", help="comma-separated t values")
    p.add_argument("--trials", type=int, default=50)
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("verify-partition",
                       help="build and verify a grid partition")
    common(p, eps=True, delta=True)
    p.set_defaults(func=cmd_verify_partition)

    p = sub.add_parser("bench", help="run a benchmark plan, emit CSV")
    common(p)
    p.add_argument("--jobs", type=int, default=4)
    p.set_defaults(func=cmd_bench)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CapsExceeded, QptasError) as e:
        sys.stderr.write("caps exceeded: %s\n" % e)
        return EXIT_CAPS
    except (ValueError, KeyError, OSError, json.JSONDecodeError,
            PlacementError, ZeroDivisionError) as e:
        sys.stderr.write("invalid input: %s\n" % e)
        return EXIT_INVALID
    except (StructuralViolation, BlocksError, CuttingError, SeparatorError,
            RuntimeError) as e:
        sys.stderr.write("structural violation: %s\n" % e)
        return EXIT_STRUCTURAL


if __name__ == "__main__":      # pragma: no cover
    sys.exit(main())
