"""Command-line entry point: map/instance generation, oracle map emission,
single solves, benchmarking and boxplot data extraction.

Exit codes: 0 success, 1 validation failure, 2 I/O error, 3 internal
contract violation.  Errors are also written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import dataset, oracle
from .costs import ExactCost
from .errors import (ContractViolation, FormatError, GridPathError,
                     KindMismatchError, NoPathError, ParseError, RangeError)
from .grid import Cell, MovePolicy, load_map_file, to_internal
from .heuristics import HmapKind
from .hmap_io import read_hmap, write_hmap
from .search import PTask, SearchConfig, TieBreak, Variant, solve

ENV_SEED = "GRIDPATH_SEED"

KIND_TAGS = {HmapKind.CF: "cf", HmapKind.PP: "ppm", HmapKind.ABS: "hstar"}
TAG_KINDS = {v: k for k, v in KIND_TAGS.items()}

ALGO_VARIANTS = {
    "astar": Variant.ASTAR,
    "wastar": Variant.WASTAR,
    "wastar-cf": Variant.WASTAR_CF,
    "focal": Variant.FOCAL,
    "gbfs-ppm": Variant.GBFS_PPM,
    "astar-hl": Variant.ASTAR_HL,
}


def _policy(name: str) -> MovePolicy:
    return MovePolicy(name)


def _seed_arg(value, fallback_required=True):
    if value is not None:
        return int(value)
    env = os.environ.get(ENV_SEED)
    if env is not None:
        return int(env)
    if fallback_required:
        raise ValueError(f"--seed not given and {ENV_SEED} not set")
    return 0


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}) + "\n")
    return code


# --- instance records (one JSON object per line) -----------------------------

def record_to_json(rec: dataset.InstanceRecord, instance_id: str, map_file: str,
                   split: str) -> dict:
    return {
        "id": instance_id,
        "map": map_file,
        "base_map": dataset.base_map_id(rec.map_id),
        "start": [rec.task.start.row, rec.task.start.col],
        "goal": [rec.task.goal.row, rec.task.goal.col],
        "optimal_cost": rec.optimal_cost.as_dict(),
        "hardness": rec.hardness,
        "split": split,
    }


def load_instances(path: str, maps_dir=None) -> list[dict]:
    """Read instance records, attaching loaded grids under "grid"."""
    base = Path(maps_dir) if maps_dir else Path(path).parent
    grids = {}
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad instance JSON: {exc}", line=ln) from None
            map_file = rec["map"]
            if map_file not in grids:
                grids[map_file] = load_map_file(str(base / map_file))
            rec["grid"] = grids[map_file]
            out.append(rec)
    return out


def record_task(rec: dict) -> PTask:
    return PTask(rec["grid"], Cell(*rec["start"]), Cell(*rec["goal"]))


def record_bench_instance(rec: dict) -> bench_mod.BenchInstance:
    oc = rec["optimal_cost"]
    return bench_mod.BenchInstance(
        instance_id=rec["id"],
        task=record_task(rec),
        optimal_cost=ExactCost(oc["cardinals"], oc["diagonals"]),
        hardness=rec["hardness"],
    )


# --- subcommands -------------------------------------------------------------

def cmd_gen_maps(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    style = dataset.ObstacleStyle(args.style)
    seed = _seed_arg(args.seed)
    names = []
    for i in range(args.count):
        config = dataset.MapGenConfig(tile_size=args.tile_size,
                                      obstacle_style=style,
                                      density=args.density,
                                      seed=seed + i)
        grid = dataset.generate_map(config)
        base = f"m{i:05d}"
        if args.augment:
            for v, variant in enumerate(dataset.augment(grid)):
                name = f"{base}_a{v:02d}.grid"
                (out / name).write_text(to_internal(variant))
                names.append(name)
        else:
            name = f"{base}.grid"
            (out / name).write_text(to_internal(grid))
            names.append(name)
    meta = {
        "style": style.value,
        "style_note": "procedural approximation of motion-planning obstacle topologies",
        "density": args.density,
        "tile_size": args.tile_size,
        "seed": seed,
        "count": args.count,
        "augmented": bool(args.augment),
        "maps": names,
    }
    (out / "maps_meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"wrote {len(names)} maps to {out}")
    return 0


def cmd_gen_instances(args) -> int:
    maps_dir = Path(args.maps)
    map_files = sorted(p.name for p in maps_dir.iterdir()
                       if p.suffix in (".grid", ".map"))
    if not map_files:
        raise ValueError(f"no .grid/.map files in {maps_dir}")
    policy = _policy(args.policy)
    seed = _seed_arg(args.seed)
    kept = dropped = 0
    out_dir = Path(args.out).resolve().parent
    with open(args.out, "w", encoding="utf-8") as fh:
        for mi, name in enumerate(map_files):
            grid = load_map_file(str(maps_dir / name))
            map_id = Path(name).stem
            split = dataset.split_bucket(dataset.base_map_id(map_id))
            map_ref = os.path.relpath((maps_dir / name).resolve(), out_dir)
            for k in range(args.per_map):
                inst_seed = np.random.SeedSequence([seed, mi, k]).generate_state(1)[0]
                rec = dataset.sample_instance(grid, int(inst_seed), policy, map_id=map_id)
                if rec is None:
                    continue
                if args.filter_splits != "none":
                    applies = split == "test" or args.filter_splits == "all"
                    if applies and rec.hardness < args.min_hardness:
                        dropped += 1
                        continue
                instance_id = f"{map_id}__{k:02d}"
                fh.write(json.dumps(record_to_json(rec, instance_id, map_ref, split)) + "\n")
                kept += 1
    print(f"wrote {kept} instances to {args.out} "
          f"({dropped} dropped by hardness < {args.min_hardness})")
    return 0


def _oracle_one(rec: dict, emit: list[str], numerator: str, policy: MovePolicy,
                out_dir: str) -> list[str]:
    task = record_task(rec)
    written = []
    if "cf" in emit:
        hmap = oracle.cf_map(rec["grid"], task.goal, policy)
        path = str(Path(out_dir) / f"{rec['id']}.cf.hmap")
        write_hmap(hmap, path)
        written.append(path)
    if "hstar" in emit:
        hmap = oracle.hstar_map(rec["grid"], task.goal, policy)
        path = str(Path(out_dir) / f"{rec['id']}.hstar.hmap")
        write_hmap(hmap, path)
        written.append(path)
    if "ppm" in emit:
        hmap = oracle.make_ppm(task, policy, numerator=numerator)
        path = str(Path(out_dir) / f"{rec['id']}.ppm.hmap")
        write_hmap(hmap, path)
        written.append(path)
    return written


def cmd_oracle(args) -> int:
    emit = ["cf", "ppm", "hstar"] if args.emit == "all" else [args.emit]
    numerator = {"grid": oracle.PpmNumerator.GRID_OPTIMAL,
                 "theta": oracle.PpmNumerator.THETA_COST}[args.ppm_numerator]
    policy = _policy(args.policy)
    records = load_instances(args.instances, args.maps)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    count = 0
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futs = [pool.submit(_oracle_one, rec, emit, numerator, policy, args.out)
                    for rec in records]
            for f in futs:
                count += len(f.result())
    else:
        for rec in records:
            count += len(_oracle_one(rec, emit, numerator, policy, args.out))
    print(f"wrote {count} heuristic maps to {args.out}")
    return 0


def cmd_solve(args) -> int:
    records = load_instances(args.instances, args.maps)
    matches = [r for r in records if r["id"] == args.instance]
    if not matches:
        raise ValueError(f"instance {args.instance!r} not found in {args.instances}")
    rec = matches[0]
    task = record_task(rec)
    variant = ALGO_VARIANTS[args.algo]
    hmap = None
    if args.hmap is not None:
        hmap = read_hmap(args.hmap, raw_pp=args.raw_pp)
    config = SearchConfig(variant=variant, w=args.w, heuristic_map=hmap,
                          tie_break=TieBreak(args.tie_break),
                          expansion_limit=args.expansion_limit,
                          policy=_policy(args.policy))
    result = solve(task, config)
    payload = result.to_json_dict()
    payload["instance"] = rec["id"]
    payload["algo"] = args.algo
    if args.json:
        print(json.dumps(payload))
    else:
        cost = payload["cost"]["value"] if payload["cost"] else None
        print(f"{rec['id']} {args.algo}: status={payload['status']} "
              f"cost={cost} expansions={payload['expansions']}")
    return 0


class HmapDirProvider:
    """Loads per-instance heuristic maps written by the oracle subcommand."""

    def __init__(self, hmaps_dir: str, raw_pp: bool = False):
        self.hmaps_dir = hmaps_dir
        self.raw_pp = raw_pp

    def __call__(self, inst: bench_mod.BenchInstance, kind: HmapKind):
        tag = KIND_TAGS[kind]
        path = Path(self.hmaps_dir) / f"{inst.instance_id}.{tag}.hmap"
        if not path.exists():
            raise FileNotFoundError(f"missing heuristic map {path}")
        return read_hmap(str(path), raw_pp=self.raw_pp)


def parse_planner_spec(spec: str) -> list[bench_mod.PlannerSpec]:
    """Comma-separated ``name[:w][:hmap-kind]`` tokens, e.g.
    ``astar,wastar:2,focal:2:ppm``.  Kind defaults per algorithm."""
    out = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        parts = token.split(":")
        name = parts[0]
        if name not in ALGO_VARIANTS:
            raise ValueError(f"unknown planner {name!r} in spec")
        w = 2.0
        if len(parts) > 1 and parts[1]:
            w = float(parts[1])
        kind = None
        if len(parts) > 2 and parts[2]:
            if parts[2] not in TAG_KINDS:
                raise ValueError(f"unknown hmap kind {parts[2]!r} in spec")
            kind = TAG_KINDS[parts[2]]
        if len(parts) > 3:
            raise ValueError(f"malformed planner token {token!r}")
        out.append(bench_mod.PlannerSpec(planner_id=token,
                                         variant=ALGO_VARIANTS[name],
                                         w=w, map_kind=kind))
    if not out:
        raise ValueError("empty planner spec")
    return out


def cmd_bench(args) -> int:
    planners = parse_planner_spec(args.planners)
    records = load_instances(args.instances, args.maps)
    instances = [record_bench_instance(r) for r in records]
    provider = HmapDirProvider(args.hmaps, raw_pp=args.raw_pp) if args.hmaps else _no_maps
    metrics, report = bench_mod.evaluate(instances, planners, provider,
                                         policy=_policy(args.policy),
                                         jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bench_mod.write_results_csv(metrics, str(out / "results.csv"))
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'results.csv'} and {out / 'report.json'}")
    return 0


def _no_maps(inst, kind):
    raise ValueError(f"planner needs a {kind.name} map but --hmaps was not given")


def cmd_boxplot_data(args) -> int:
    metrics = bench_mod.read_results_csv(args.results)
    edges = [float(tok) for tok in args.buckets.split(",") if tok]
    if not edges:
        raise ValueError("empty --buckets")
    table = bench_mod.bucket_by_hardness(metrics, edges)
    Path(args.out).write_text(json.dumps(table, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.out}")
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridpath",
        description="Grid pathfinding workbench: generation, oracles, solving, benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-maps", help="generate procedural maps")
    p.add_argument("--style", choices=[s.value for s in dataset.ObstacleStyle],
                   default="random-rects")
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=None,
                   help=f"base seed (falls back to ${ENV_SEED})")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--tile-size", type=int, default=32)
    p.add_argument("--augment", action="store_true",
                   help="also write the 16 per-quadrant transform variants")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_maps)

    p = sub.add_parser("gen-instances", help="sample start/goal instances")
    p.add_argument("--maps", required=True)
    p.add_argument("--per-map", type=int, default=10)
    p.add_argument("--min-hardness", type=float, default=dataset.DEFAULT_MIN_HARDNESS)
    p.add_argument("--filter-splits", choices=["test", "all", "none"], default="test",
                   help="which splits the hardness filter applies to (default: test)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--policy", choices=[m.value for m in MovePolicy],
                   default=MovePolicy.PERMISSIVE.value)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_instances)

    p = sub.add_parser("oracle", help="emit ground-truth heuristic maps")
    p.add_argument("--instances", required=True)
    p.add_argument("--maps", default=None, help="map dir (default: instances file dir)")
    p.add_argument("--emit", choices=["cf", "ppm", "hstar", "all"], default="all")
    p.add_argument("--ppm-numerator", choices=["grid", "theta"], default="grid")
    p.add_argument("--policy", choices=[m.value for m in MovePolicy],
                   default=MovePolicy.PERMISSIVE.value)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("solve", help="run one planner on one stored instance")
    p.add_argument("--instances", required=True)
    p.add_argument("--instance", required=True, help="instance id")
    p.add_argument("--maps", default=None)
    p.add_argument("--algo", choices=sorted(ALGO_VARIANTS), required=True)
    p.add_argument("--w", type=float, default=2.0)
    p.add_argument("--hmap", default=None, help="heuristic map file for map-guided algos")
    p.add_argument("--raw-pp", action="store_true",
                   help="accept continuous predictor PP values verbatim")
    p.add_argument("--tie-break", choices=[t.value for t in TieBreak],
                   default=TieBreak.HIGH_G.value)
    p.add_argument("--expansion-limit", type=int, default=None)
    p.add_argument("--policy", choices=[m.value for m in MovePolicy],
                   default=MovePolicy.PERMISSIVE.value)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run planners over an instance file")
    p.add_argument("--instances", required=True)
    p.add_argument("--maps", default=None)
    p.add_argument("--planners", required=True,
                   help="comma-separated name[:w][:hmap-kind] tokens")
    p.add_argument("--hmaps", default=None, help="directory of oracle/predictor maps")
    p.add_argument("--raw-pp", action="store_true")
    p.add_argument("--policy", choices=[m.value for m in MovePolicy],
                   default=MovePolicy.PERMISSIVE.value)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("boxplot-data", help="bucketed quartile data from results.csv")
    p.add_argument("--results", required=True)
    p.add_argument("--buckets", default="1.05,1.25,1.5,2.0")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_boxplot_data)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        return _fail("validation", "invalid command line (see usage above)", 1)
    try:
        return args.func(args)
    except (ContractViolation, AssertionError) as exc:
        return _fail("contract-violation", str(exc), 3)
    except OSError as exc:
        return _fail("io-error", str(exc), 2)
    except (ValueError, KeyError, ParseError, FormatError, RangeError,
            KindMismatchError, NoPathError, GridPathError) as exc:
        return _fail("validation", str(exc), 1)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
