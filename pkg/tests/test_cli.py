import json
import os

import numpy as np
import pytest

from gridpath.cli import parse_planner_spec, run
from gridpath.costs import ExactCost
from gridpath.grid import GridMap, load_map_file, to_internal
from gridpath.heuristics import HmapKind
from gridpath.search import Variant


def write_corridor_instance(tmp_path):
    """A stored 1x3 corridor instance mirroring the search corridor example."""
    (tmp_path / "corridor.grid").write_text(to_internal(GridMap(np.zeros((1, 3), bool))))
    rec = {
        "id": "corridor__00",
        "map": "corridor.grid",
        "base_map": "corridor",
        "start": [0, 0],
        "goal": [0, 2],
        "optimal_cost": ExactCost(2, 0).as_dict(),
        "hardness": 1.0,
        "split": "test",
    }
    path = tmp_path / "instances.jsonl"
    path.write_text(json.dumps(rec) + "\n")
    return str(path)


def gen_pipeline(tmp_path, count=6, per_map=3, seed=9, density=0.3):
    maps_dir = str(tmp_path / "maps")
    inst_file = str(tmp_path / "instances.jsonl")
    assert run(["gen-maps", "--style", "random-rects", "--density", str(density),
                "--seed", str(seed), "--count", str(count), "--tile-size", "8",
                "--out", maps_dir]) == 0
    assert run(["gen-instances", "--maps", maps_dir, "--per-map", str(per_map),
                "--seed", str(seed), "--filter-splits", "none",
                "--out", inst_file]) == 0
    return maps_dir, inst_file


class TestSolve:
    def test_corridor_json(self, tmp_path, capsys):
        inst = write_corridor_instance(tmp_path)
        code = run(["solve", "--instances", inst, "--instance", "corridor__00",
                    "--algo", "astar", "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "found"
        assert payload["cost"]["value"] == 2.0
        assert payload["expansions"] == 3

    def test_missing_instance_is_validation_error(self, tmp_path, capsys):
        inst = write_corridor_instance(tmp_path)
        code = run(["solve", "--instances", inst, "--instance", "nope",
                    "--algo", "astar", "--json"])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "validation"

    def test_missing_file_is_io_error(self, tmp_path, capsys):
        code = run(["solve", "--instances", str(tmp_path / "absent.jsonl"),
                    "--instance", "x", "--algo", "astar"])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "io-error"

    def test_bad_flag_exit_one(self, tmp_path, capsys):
        assert run(["solve", "--algo", "astar"]) == 1  # missing required flags
        capsys.readouterr()


class TestGenPipeline:
    def test_gen_maps_deterministic(self, tmp_path):
        out_a = str(tmp_path / "a")
        out_b = str(tmp_path / "b")
        for out in (out_a, out_b):
            assert run(["gen-maps", "--seed", "5", "--count", "3",
                        "--tile-size", "8", "--out", out]) == 0
        for name in ("m00000.grid", "m00001.grid", "m00002.grid"):
            assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()
        meta = json.loads((tmp_path / "a" / "maps_meta.json").read_text())
        assert meta["style_note"]

    def test_gen_maps_augment(self, tmp_path):
        out = tmp_path / "aug"
        assert run(["gen-maps", "--seed", "5", "--count", "1", "--tile-size", "8",
                    "--augment", "--out", str(out)]) == 0
        files = sorted(p.name for p in out.iterdir() if p.suffix == ".grid")
        assert len(files) == 16
        assert files[0] == "m00000_a00.grid"

    def test_gen_instances_records(self, tmp_path):
        maps_dir, inst_file = gen_pipeline(tmp_path)
        lines = [json.loads(ln) for ln in open(inst_file)]
        assert lines
        for rec in lines:
            assert set(rec) >= {"id", "map", "base_map", "start", "goal",
                                "optimal_cost", "hardness", "split"}
            assert rec["split"] in ("train", "val", "test")
            # map references resolve relative to the instances file
            grid = load_map_file(os.path.join(os.path.dirname(inst_file), rec["map"]))
            assert not grid.blocked[rec["start"][0], rec["start"][1]]

    def test_hardness_filter_on_test_split(self, tmp_path):
        maps_dir = str(tmp_path / "maps")
        inst_file = str(tmp_path / "inst.jsonl")
        assert run(["gen-maps", "--density", "0", "--seed", "1", "--count", "12",
                    "--tile-size", "8", "--out", maps_dir]) == 0
        assert run(["gen-instances", "--maps", maps_dir, "--per-map", "4",
                    "--seed", "2", "--out", inst_file]) == 0
        recs = [json.loads(ln) for ln in open(inst_file)]
        # empty maps: every instance has hardness exactly 1.0, so none may
        # survive in the test split
        assert all(r["split"] != "test" for r in recs)


class TestOracleAndBench:
    def test_oracle_emits_and_cf_solves_optimally(self, tmp_path, capsys):
        maps_dir, inst_file = gen_pipeline(tmp_path)
        hdir = str(tmp_path / "hmaps")
        assert run(["oracle", "--instances", inst_file, "--emit", "all",
                    "--out", hdir]) == 0
        recs = [json.loads(ln) for ln in open(inst_file)]
        for rec in recs:
            for tag in ("cf", "ppm", "hstar"):
                assert (tmp_path / "hmaps" / f"{rec['id']}.{tag}.hmap").exists()
        capsys.readouterr()
        # wastar-cf with the emitted cf map returns the stored optimal cost
        for rec in recs[:5]:
            code = run(["solve", "--instances", inst_file, "--instance", rec["id"],
                        "--algo", "wastar-cf",
                        "--hmap", str(tmp_path / "hmaps" / f"{rec['id']}.cf.hmap"),
                        "--json"])
            assert code == 0
            payload = json.loads(capsys.readouterr().out)
            assert payload["cost"]["cardinals"] == rec["optimal_cost"]["cardinals"]
            assert payload["cost"]["diagonals"] == rec["optimal_cost"]["diagonals"]

    def test_bench_reference_row_and_outputs(self, tmp_path):
        maps_dir, inst_file = gen_pipeline(tmp_path)
        out = tmp_path / "bench"
        assert run(["bench", "--instances", inst_file, "--planners",
                    "astar,wastar:2", "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        row = report["planners"]["astar"]
        assert row["optimal_found_ratio"] == 100.0
        assert row["cost_ratio_mean"] == pytest.approx(100.0)
        assert row["expansions_ratio_mean"] == pytest.approx(100.0)
        assert report["planners"]["wastar:2"]["cost_ratio_mean"] <= 200.0
        assert (out / "results.csv").exists()

    def test_bench_with_hmaps_and_boxplot(self, tmp_path):
        maps_dir, inst_file = gen_pipeline(tmp_path)
        hdir = str(tmp_path / "hmaps")
        assert run(["oracle", "--instances", inst_file, "--emit", "all",
                    "--out", hdir]) == 0
        out = tmp_path / "bench"
        assert run(["bench", "--instances", inst_file, "--planners",
                    "astar,wastar-cf,focal:2,gbfs-ppm,astar-hl",
                    "--hmaps", hdir, "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["planners"]["wastar-cf"]["optimal_found_ratio"] == 100.0
        box = tmp_path / "boxplot.json"
        assert run(["boxplot-data", "--results", str(out / "results.csv"),
                    "--buckets", "1.05,1.25,1.5,2.0", "--out", str(box)]) == 0
        table = json.loads(box.read_text())
        assert table["edges"] == [1.05, 1.25, 1.5, 2.0]
        assert "astar" in table["planners"]

    def test_report_schema_golden(self, tmp_path):
        # structure must stay stable: keys and row shapes, not float values
        maps_dir, inst_file = gen_pipeline(tmp_path, count=3, per_map=2)
        out = tmp_path / "bench"
        assert run(["bench", "--instances", inst_file, "--planners",
                    "astar,wastar:2", "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert sorted(report) == ["buckets", "conventions", "planners"]
        for row in report["planners"].values():
            assert sorted(row) == ["cost_ratio_mean", "cost_ratio_std",
                                   "expansions_ratio_mean", "expansions_ratio_std",
                                   "failures", "instances", "optimal_found_ratio"]
        assert sorted(report["buckets"]) == ["edges", "planners"]
        for rows in report["buckets"]["planners"].values():
            for bucket in rows:
                assert {"hardness_min", "hardness_max", "count"} <= set(bucket)
        with open(out / "results.csv") as fh:
            header = fh.readline().strip().split(",")
        assert header == ["instance_id", "planner_id", "cost_ratio",
                          "expansions_ratio", "optimal", "hardness", "status"]

    def test_bench_deterministic(self, tmp_path):
        maps_dir, inst_file = gen_pipeline(tmp_path, count=3, per_map=2)
        outs = []
        for name in ("b1", "b2"):
            out = tmp_path / name
            assert run(["bench", "--instances", inst_file, "--planners",
                        "astar,wastar:2", "--out", str(out)]) == 0
            outs.append((out / "results.csv").read_text())
        assert outs[0] == outs[1]


class TestPlannerSpec:
    def test_grammar(self):
        specs = parse_planner_spec("astar,wastar:2,focal:1.5:ppm,wastar-cf")
        assert [s.variant for s in specs] == [Variant.ASTAR, Variant.WASTAR,
                                              Variant.FOCAL, Variant.WASTAR_CF]
        assert specs[1].w == 2.0
        assert specs[2].w == 1.5
        assert specs[2].map_kind is HmapKind.PP
        assert specs[3].needs_map() is HmapKind.CF

    def test_bad_tokens(self):
        with pytest.raises(ValueError):
            parse_planner_spec("warp9")
        with pytest.raises(ValueError):
            parse_planner_spec("astar:1:bogus")
        with pytest.raises(ValueError):
            parse_planner_spec("")


def test_env_seed_fallback(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("GRIDPATH_SEED", "77")
    out = str(tmp_path / "maps")
    assert run(["gen-maps", "--count", "1", "--tile-size", "8", "--out", out]) == 0
    meta = json.loads((tmp_path / "maps" / "maps_meta.json").read_text())
    assert meta["seed"] == 77
    monkeypatch.delenv("GRIDPATH_SEED")
    out2 = str(tmp_path / "maps2")
    assert run(["gen-maps", "--count", "1", "--tile-size", "8", "--out", out2]) == 1
    capsys.readouterr()
