"""Benchmark metrics: per-instance ratios against an A* reference and their
aggregation, including hardness-bucketed five-number summaries.

Optimality is decided by exact cost equality, never by a float tolerance.
Planners that fail an instance (no path within the expansion limit) are
reported separately and excluded from the ratio means.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .costs import ExactCost
from .errors import ContractViolation
from .grid import MovePolicy
from .heuristics import HmapKind
from .search import (PTask, SearchConfig, Status, TieBreak,
                     Variant, solve)

DEFAULT_BUCKET_EDGES = (1.05, 1.25, 1.5, 2.0)

# variants that consume a heuristic map, and the kind they consume
MAP_KINDS = {
    Variant.WASTAR_CF: HmapKind.CF,
    Variant.FOCAL: HmapKind.PP,
    Variant.GBFS_PPM: HmapKind.PP,
    Variant.ASTAR_HL: HmapKind.ABS,
}


@dataclass(frozen=True)
class BenchInstance:
    instance_id: str
    task: PTask
    optimal_cost: ExactCost
    hardness: float


@dataclass(frozen=True)
class PlannerSpec:
    planner_id: str
    variant: Variant
    w: float = 2.0
    map_kind: Optional[HmapKind] = None
    tie_break: TieBreak = TieBreak.HIGH_G
    expansion_limit: Optional[int] = None

    def needs_map(self) -> Optional[HmapKind]:
        return self.map_kind if self.map_kind is not None else MAP_KINDS.get(self.variant)


@dataclass(frozen=True)
class RunMetrics:
    instance_id: str
    planner_id: str
    cost_ratio: float        # found / optimal, percent
    expansions_ratio: float  # planner / A*, percent
    optimal: bool            # exact cost equality with the oracle optimum
    hardness: float
    failed: bool = False     # NoPath / limit on a solvable instance

    def as_row(self) -> dict:
        # repr keeps the shortest exact float form, so the CSV round-trips
        return {
            "instance_id": self.instance_id,
            "planner_id": self.planner_id,
            "cost_ratio": "" if self.failed else repr(self.cost_ratio),
            "expansions_ratio": "" if self.failed else repr(self.expansions_ratio),
            "optimal": int(self.optimal),
            "hardness": repr(self.hardness),
            "status": "failed" if self.failed else "ok",
        }


CSV_FIELDS = ("instance_id", "planner_id", "cost_ratio", "expansions_ratio",
              "optimal", "hardness", "status")


def run_planner(inst: BenchInstance, spec: PlannerSpec, hmap,
                policy: MovePolicy, ref_expansions: int) -> RunMetrics:
    config = SearchConfig(variant=spec.variant, w=spec.w, heuristic_map=hmap,
                          tie_break=spec.tie_break,
                          expansion_limit=spec.expansion_limit, policy=policy)
    result = solve(inst.task, config)
    if result.status is not Status.FOUND:
        return RunMetrics(inst.instance_id, spec.planner_id, 0.0, 0.0,
                          optimal=False, hardness=inst.hardness, failed=True)
    cost_ratio = 100.0 * result.cost.to_float() / inst.optimal_cost.to_float()
    exp_ratio = 100.0 * result.expansions / ref_expansions
    return RunMetrics(inst.instance_id, spec.planner_id, cost_ratio, exp_ratio,
                      optimal=(result.cost.compare(inst.optimal_cost) == 0),
                      hardness=inst.hardness)


def evaluate(instances: Sequence[BenchInstance], planners: Sequence[PlannerSpec],
             map_provider: Callable[[BenchInstance, HmapKind], object],
             policy: MovePolicy = MovePolicy.PERMISSIVE,
             jobs: int = 1) -> tuple[list[RunMetrics], dict]:
    """Run every planner on every instance against the A* reference.

    ``map_provider(instance, kind)`` supplies the per-instance heuristic map
    a planner consumes (oracle output or predictor export).  Returns the
    per-run metrics in deterministic (instance, planner) order plus the
    aggregate report dict.
    """
    if jobs > 1:
        rows = _evaluate_parallel(instances, planners, map_provider, policy, jobs)
    else:
        rows = [_evaluate_instance(inst, planners, map_provider, policy)
                for inst in instances]
    metrics = [m for batch in rows for m in batch]
    return metrics, aggregate(metrics)


def _evaluate_instance(inst, planners, map_provider, policy):
    ref = solve(inst.task, SearchConfig(variant=Variant.ASTAR, policy=policy))
    if ref.status is not Status.FOUND:
        raise ContractViolation(f"reference A* failed on {inst.instance_id}")
    if ref.cost.compare(inst.optimal_cost) != 0:
        raise ContractViolation(
            f"stored optimal cost of {inst.instance_id} does not match A*")
    out = []
    for spec in planners:
        kind = spec.needs_map()
        hmap = map_provider(inst, kind) if kind is not None else None
        out.append(run_planner(inst, spec, hmap, policy, ref.expansions))
    return out


def _evaluate_parallel(instances, planners, map_provider, policy, jobs):
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_evaluate_instance, inst, planners, map_provider, policy)
                   for inst in instances]
        return [f.result() for f in futures]


def aggregate(metrics: Sequence[RunMetrics]) -> dict:
    """Per-planner means and population stds, bucketed quartiles, failures."""
    planners = []
    for m in metrics:
        if m.planner_id not in planners:
            planners.append(m.planner_id)
    report = {"planners": {}, "buckets": bucket_by_hardness(metrics),
              "conventions": {
                  "std": "population (ddof=0)",
                  "quantiles": "linear interpolation between order statistics",
                  "optimality": "exact cost equality",
              }}
    for pid in planners:
        rows = [m for m in metrics if m.planner_id == pid]
        ok = [m for m in rows if not m.failed]
        cost = np.array([m.cost_ratio for m in ok])
        exp = np.array([m.expansions_ratio for m in ok])
        report["planners"][pid] = {
            "instances": len(rows),
            "failures": len(rows) - len(ok),
            "optimal_found_ratio": 100.0 * sum(m.optimal for m in rows) / len(rows),
            "cost_ratio_mean": float(cost.mean()) if len(ok) else None,
            "cost_ratio_std": float(cost.std()) if len(ok) else None,
            "expansions_ratio_mean": float(exp.mean()) if len(ok) else None,
            "expansions_ratio_std": float(exp.std()) if len(ok) else None,
        }
    return report


def _five_number(values: np.ndarray) -> dict:
    qs = np.percentile(values, [0, 25, 50, 75, 100])
    return {"min": float(qs[0]), "q1": float(qs[1]), "median": float(qs[2]),
            "q3": float(qs[3]), "max": float(qs[4])}


def bucket_by_hardness(metrics: Sequence[RunMetrics],
                       edges: Sequence[float] = DEFAULT_BUCKET_EDGES) -> dict:
    """Five-number summaries of both ratios per hardness bucket per planner.

    Buckets are [e0, e1), ..., [e_last, inf); empty buckets appear with
    count 0.
    """
    edges = list(edges)
    bounds = list(zip(edges, edges[1:] + [None]))
    planners = []
    for m in metrics:
        if m.planner_id not in planners:
            planners.append(m.planner_id)
    out = {"edges": edges, "planners": {}}
    for pid in planners:
        rows = [m for m in metrics if m.planner_id == pid and not m.failed]
        buckets = []
        for lo, hi in bounds:
            sel = [m for m in rows if m.hardness >= lo and (hi is None or m.hardness < hi)]
            entry = {"hardness_min": lo, "hardness_max": hi, "count": len(sel)}
            if sel:
                entry["cost_ratio"] = _five_number(np.array([m.cost_ratio for m in sel]))
                entry["expansions_ratio"] = _five_number(
                    np.array([m.expansions_ratio for m in sel]))
            buckets.append(entry)
        out["planners"][pid] = buckets
    return out


def write_results_csv(metrics: Sequence[RunMetrics], sink) -> None:
    if isinstance(sink, str):
        with open(sink, "w", newline="") as fh:
            return write_results_csv(metrics, fh)
    writer = csv.DictWriter(sink, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for m in metrics:
        writer.writerow(m.as_row())


def read_results_csv(source) -> list[RunMetrics]:
    if isinstance(source, str):
        with open(source, "r", newline="") as fh:
            return read_results_csv(fh)
    out = []
    for row in csv.DictReader(source):
        failed = row["status"] == "failed"
        out.append(RunMetrics(
            instance_id=row["instance_id"],
            planner_id=row["planner_id"],
            cost_ratio=float(row["cost_ratio"]) if not failed else 0.0,
            expansions_ratio=float(row["expansions_ratio"]) if not failed else 0.0,
            optimal=bool(int(row["optimal"])),
            hardness=float(row["hardness"]),
            failed=failed,
        ))
    return out
