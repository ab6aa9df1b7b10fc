import io
import json

import numpy as np
import pytest

from gridpath.bench import (BenchInstance, PlannerSpec, RunMetrics,
                            bucket_by_hardness, evaluate, read_results_csv,
                            write_results_csv)
from gridpath.errors import ContractViolation
from gridpath.costs import ExactCost
from gridpath.grid import MovePolicy
from gridpath.heuristics import HmapKind
from gridpath.oracle import cf_map, hstar_map, make_ppm
from gridpath.search import PTask, Variant
from reference import bellman_distances, random_grid


def make_instances(seed, count, h=12, w=12, density=0.3):
    rng = np.random.default_rng(seed)
    out = []
    idx = 0
    while len(out) < count:
        g = random_grid(rng, h, w, density)
        free = g.free_cells()
        if len(free) < 2:
            continue
        a = free[int(rng.integers(len(free)))]
        b = free[int(rng.integers(len(free)))]
        if a == b:
            continue
        cards, diags, reach = bellman_distances(g, a, MovePolicy.PERMISSIVE)
        if not reach[b.row, b.col]:
            continue
        opt = ExactCost(int(cards[b.row, b.col]), int(diags[b.row, b.col]))
        from gridpath.heuristics import octile
        hardness = opt.to_float() / octile(a, b).to_float()
        out.append(BenchInstance(f"i{idx:03d}", PTask(g, a, b), opt, hardness))
        idx += 1
    return out


def oracle_provider(inst, kind):
    if kind is HmapKind.CF:
        return cf_map(inst.task.grid, inst.task.goal, MovePolicy.PERMISSIVE)
    if kind is HmapKind.PP:
        return make_ppm(inst.task)
    return hstar_map(inst.task.grid, inst.task.goal, MovePolicy.PERMISSIVE)


class TestEvaluate:
    def test_astar_reference_identity(self):
        instances = make_instances(40, 8)
        metrics, report = evaluate(instances, [PlannerSpec("astar", Variant.ASTAR)],
                                   oracle_provider)
        row = report["planners"]["astar"]
        assert row["optimal_found_ratio"] == 100.0
        assert row["cost_ratio_mean"] == pytest.approx(100.0, abs=1e-9)
        assert row["cost_ratio_std"] == pytest.approx(0.0, abs=1e-9)
        assert row["expansions_ratio_mean"] == pytest.approx(100.0, abs=1e-9)
        assert all(m.expansions_ratio == 100.0 for m in metrics)

    def test_wastar_bound_and_cf_optimality(self):
        instances = make_instances(41, 10)
        planners = [
            PlannerSpec("wastar:2", Variant.WASTAR, w=2.0),
            PlannerSpec("wastar-cf", Variant.WASTAR_CF),
        ]
        metrics, report = evaluate(instances, planners, oracle_provider)
        assert report["planners"]["wastar:2"]["cost_ratio_mean"] <= 200.0
        assert report["planners"]["wastar-cf"]["optimal_found_ratio"] == 100.0

    def test_cost_ratio_floor(self):
        instances = make_instances(42, 8)
        metrics, _ = evaluate(instances, [PlannerSpec("focal:2", Variant.FOCAL, w=2.0)],
                              oracle_provider)
        assert all(m.cost_ratio >= 100.0 - 1e-6 for m in metrics)
        for m in metrics:
            assert m.optimal == (abs(m.cost_ratio - 100.0) < 1e-9)

    def test_permutation_invariance(self):
        instances = make_instances(43, 6)
        planners = [PlannerSpec("astar", Variant.ASTAR),
                    PlannerSpec("wastar:1.5", Variant.WASTAR, w=1.5)]
        _, rep_a = evaluate(instances, planners, oracle_provider)
        _, rep_b = evaluate(list(reversed(instances)), planners, oracle_provider)
        assert rep_a["planners"] == rep_b["planners"]

    def test_failure_rows_excluded_from_means(self):
        instances = make_instances(44, 5)
        planners = [PlannerSpec("astar", Variant.ASTAR),
                    PlannerSpec("limited", Variant.WASTAR, w=2.0, expansion_limit=1)]
        metrics, report = evaluate(instances, planners, oracle_provider)
        lim = report["planners"]["limited"]
        failed = [m for m in metrics if m.planner_id == "limited" and m.failed]
        assert lim["failures"] == len(failed) > 0
        assert lim["optimal_found_ratio"] < 100.0

    def test_bad_stored_optimum_rejected(self):
        instances = make_instances(45, 1)
        bad = BenchInstance(instances[0].instance_id, instances[0].task,
                            instances[0].optimal_cost + ExactCost(1, 0),
                            instances[0].hardness)
        with pytest.raises(ContractViolation):
            evaluate([bad], [PlannerSpec("astar", Variant.ASTAR)], oracle_provider)


class TestBuckets:
    def _metrics(self, hardnesses, ratios):
        return [RunMetrics(f"i{k}", "p", cr, cr, cr == 100.0, h)
                for k, (h, cr) in enumerate(zip(hardnesses, ratios))]

    def test_single_bucket(self):
        table = bucket_by_hardness(self._metrics([1.1] * 4, [100, 110, 120, 130]))
        rows = table["planners"]["p"]
        assert rows[0]["count"] == 4
        assert all(r["count"] == 0 for r in rows[1:])

    def test_median_of_constant(self):
        table = bucket_by_hardness(self._metrics([1.3] * 5, [105] * 5))
        row = table["planners"]["p"][1]
        assert row["cost_ratio"]["median"] == 105.0
        assert row["cost_ratio"]["min"] == row["cost_ratio"]["max"] == 105.0

    def test_quartiles_match_reference(self):
        rng = np.random.default_rng(46)
        ratios = rng.uniform(100, 200, 25).tolist()
        table = bucket_by_hardness(self._metrics([1.1] * 25, ratios))
        row = table["planners"]["p"][0]["cost_ratio"]
        # independent sort-based computation, linear interpolation
        srt = sorted(ratios)
        def quantile(q):
            pos = q * (len(srt) - 1)
            lo = int(pos)
            frac = pos - lo
            return srt[lo] + frac * (srt[min(lo + 1, len(srt) - 1)] - srt[lo])
        assert row["q1"] == pytest.approx(quantile(0.25), abs=1e-9)
        assert row["median"] == pytest.approx(quantile(0.5), abs=1e-9)
        assert row["q3"] == pytest.approx(quantile(0.75), abs=1e-9)
        assert row["min"] == srt[0] and row["max"] == srt[-1]

    def test_bucket_edges(self):
        ms = self._metrics([1.05, 1.24999, 1.25, 1.5, 2.0, 5.0], [100] * 6)
        rows = bucket_by_hardness(ms)["planners"]["p"]
        assert [r["count"] for r in rows] == [2, 1, 1, 2]


class TestCsv:
    def test_roundtrip(self):
        instances = make_instances(47, 4)
        metrics, _ = evaluate(instances, [PlannerSpec("astar", Variant.ASTAR)],
                              oracle_provider)
        buf = io.StringIO()
        write_results_csv(metrics, buf)
        buf.seek(0)
        back = read_results_csv(buf)
        assert back == list(metrics)

    def test_failure_row_roundtrip(self):
        m = RunMetrics("i0", "p", 0.0, 0.0, False, 1.2, failed=True)
        buf = io.StringIO()
        write_results_csv([m], buf)
        buf.seek(0)
        assert read_results_csv(buf) == [m]


def test_report_json_serializable():
    instances = make_instances(48, 3)
    _, report = evaluate(instances, [PlannerSpec("astar", Variant.ASTAR)],
                         oracle_provider)
    json.dumps(report)
