import json
import subprocess
import sys

import numpy as np
import pytest

from roadgen.cli import main, parse_size
from roadgen.grid import load_grid, mismatch_count, save_grid


def test_parse_size():
    assert parse_size("12x8") == (12, 8)
    for bad in ("12", "ax3", "0x4"):
        with pytest.raises(Exception):
            parse_size(bad)


def test_generate_wfc_to_stdout(capsys):
    assert main(["generate", "--method", "wfc", "--size", "6x7", "--seed", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["grid"]["height"] == 6 and doc["grid"]["width"] == 7
    assert doc["metrics"]["adjacent_crossing_violation_score"] == 0
    assert doc["attempts"] >= 1


def test_generate_hard_boundary(capsys):
    main(["generate", "--method", "wfc", "--size", "6x6", "--seed", "2", "--hard-boundary"])
    assert json.loads(capsys.readouterr().out)["metrics"]["boundary_violations"] == 0


def test_generate_map_elites_files(tmp_path, capsys):
    out = tmp_path / "me"
    rc = main(["generate", "--method", "map-elites", "--size", "5x5", "--seed", "1",
               "--generations", "3", "--mu", "5", "--lambda", "5", "--out", str(out)])
    assert rc == 0
    assert mismatch_count(load_grid(out / "grid.json")) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert "fitness" in metrics and "dead_ends" in metrics
    trace = (out / "trace.csv").read_text().splitlines()
    assert trace[0] == "generation,best_fitness" and len(trace) == 4
    archive = json.loads((out / "archive.json").read_text())
    assert archive and set(archive[0]) == {"niche", "descriptor", "fitness", "grid"}


def test_generate_pso_with_weights(tmp_path, capsys):
    wfile = tmp_path / "w.json"
    wfile.write_text(json.dumps({"weights": {"w_dead_ends": 0}}))
    rc = main(["generate", "--method", "pso", "--size", "4x4", "--seed", "0", "--generations", "2",
               "--population", "4", "--w", "0.5", "--c1", "1", "--c2", "1",
               "--weights", str(wfile), "--weight", "w_bridges=0"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    m = doc["metrics"]
    expected = (300 * (m["connected_components"] - 1) + 150 * m["boundary_violations"]
                + 100 * m["adjacent_crossing_violation_score"] + 80 * m["adjacent_turns"]
                - 2 * m["cyclomatic_complexity"] - 2 * m["straight_run_score"])
    assert doc["fitness"] == expected


def test_unknown_weight_is_an_error(capsys):
    rc = main(["generate", "--method", "wfc", "--size", "3x3", "--weight", "w_nope=1"])
    assert rc == 2
    assert "unknown fitness weights" in capsys.readouterr().err


def test_metrics_command(tmp_path, capsys, ring):
    p = tmp_path / "ring.json"
    save_grid(ring, p)
    assert main(["metrics", "--grid", str(p)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["fitness"] == 318 and doc["cyclomatic_complexity"] == 1


def test_metrics_bad_grid(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"height": 1, "width": 2, "cells": [3, 99]}))
    assert main(["metrics", "--grid", str(p)]) == 2
    assert "cell 1" in capsys.readouterr().err


def test_render_command(tmp_path, capsys, ring):
    p = tmp_path / "ring.json"
    save_grid(ring, p)
    out = tmp_path / "render"
    assert main(["render", "--grid", str(p), "--synthetic", "--tile-px", "32", "--out", str(out)]) == 0
    assert (out / "map_rgb.png").exists() and (out / "labels.png").exists()


def test_bench_command(tmp_path, capsys):
    out = tmp_path / "bench"
    rc = main(["bench", "--methods", "wfc,pso,gwo,ea,map-elites", "--size", "4x4", "--runs", "1",
               "--generations", "2", "--seed", "3", "--out", str(out)])
    assert rc == 0
    assert len(list((out / "records").glob("*.json"))) == 5
    for name in ("summary.csv", "summary.md", "verdicts.txt"):
        assert (out / name).exists()
    assert "(iii)" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "roadgen", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "generate" in res.stdout
