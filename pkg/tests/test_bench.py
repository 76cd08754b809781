import json
import math

import numpy as np
import pytest

from roadgen.bench import (
    METHODS, ExperimentSpec, RunRecord, Stat, StatTable, derive_seed, format_verdicts,
    load_records, rank_check, run_experiment, summarize, write_outputs,
)
from roadgen.metrics import full_report

FAST = {m: {"generations": 2, "population": 4} for m in ("pso", "gwo")}
FAST.update({m: {"generations": 2, "mu": 4, "lambda_": 4} for m in ("ea", "map-elites")})

# reference means, one tuple per method (CO DE CY / BV ACV CV / CR SR AT)
REFERENCE = {
    "ea": (1.25, 0.75, 25, 0, 81.25, 1, 40.5, 41.5, 30.25),
    "gwo": (1, 0.75, 37.75, 0, 341.8, 1, 62.5, 28.25, 16.5),
    "map-elites": (1.25, 4.5, 35.75, 0, 305.2, 1, 55.5, 30.75, 23.25),
    "pso": (2.25, 9.25, 37, 0, 334.5, 1, 59.75, 30.5, 18.25),
    "wfc": (4.75, 26.25, 9.5, 26.25, 0, 1, 30, 36, 87.75),
}
KEYS = ("connected_components", "dead_ends", "cyclomatic_complexity", "boundary_violations",
        "adjacent_crossing_violation_score", "coverage", "crossings", "straight_run_score",
        "adjacent_turns")


def fake_record(method, run, dead_ends=0, **over):
    report = full_report([[6, 3], [12, 9]])
    report = type(report)(**{**report.to_dict(), "dead_ends": dead_ends, **over})
    return RunRecord(method, (2, 2), run, run, True, np.array([[6, 3], [12, 9]]), report,
                     318.0, 0.01)


@pytest.fixture(scope="module")
def tiny(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench")
    spec = ExperimentSpec(methods=list(METHODS), sizes=[(5, 5)], runs=2, method_params=FAST,
                          master_seed=9)
    return spec, out, run_experiment(spec, out)


def test_record_count_and_persistence(tiny):
    spec, out, records = tiny
    assert len(records) == 10
    assert len(list((out / "records").glob("*.json"))) == 10


def test_same_master_seed_same_records(tiny):
    spec, _, records = tiny
    again = run_experiment(spec)
    for a, b in zip(records, again):
        assert (a.method, a.seed, a.fitness, a.report) == (b.method, b.seed, b.fitness, b.report)
        assert np.array_equal(a.grid, b.grid)


def test_stored_report_matches_grid(tiny):
    _, out, _ = tiny
    for rec in load_records(out):
        assert full_report(rec.grid) == rec.report


def test_table_round_trip(tiny):
    _, out, records = tiny
    table = write_outputs(records, out)
    assert summarize(load_records(out)).to_csv() == table.to_csv()
    assert (out / "summary.csv").read_text() == table.to_csv()
    md = (out / "summary.md").read_text()
    for abbr in ("CO", "DE", "CY", "BV", "ACV", "CV", "CR", "SR", "AT", "TIME"):
        assert f"{abbr} μ" in md
    assert "WARNING" in (out / "verdicts.txt").read_text()


def test_seed_derivation():
    s = derive_seed(0, "ea", (12, 12), 0)
    assert s == derive_seed(0, "ea", (12, 12), 0)
    assert len({s, derive_seed(0, "map-elites", (12, 12), 0), derive_seed(0, "ea", (12, 12), 1),
                derive_seed(1, "ea", (12, 12), 0)}) == 4


def test_two_methods_two_runs():
    spec = ExperimentSpec(methods=["wfc", "ea"], sizes=[(4, 4)], runs=2, method_params=FAST)
    assert len(run_experiment(spec)) == 4


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(runs=0)
    with pytest.raises(ValueError):
        ExperimentSpec(methods=[])
    with pytest.raises(ValueError):
        ExperimentSpec(methods=["sa"])


def test_summary_arithmetic():
    t = summarize([fake_record("ea", 0, dead_ends=0), fake_record("ea", 1, dead_ends=2)])
    s = t.get("ea", "dead_ends")
    assert s.mean == 1 and s.std == pytest.approx(math.sqrt(2))
    assert (s.q1, s.median, s.q3) == (0.5, 1.0, 1.5)


def test_single_record_has_zero_std_with_note():
    t = summarize([fake_record("ea", 0, dead_ends=3)])
    assert t.get("ea", "dead_ends").std == 0
    assert "(n=1)" in t.to_markdown()


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        summarize([])


def test_failed_runs_excluded_but_counted():
    failed = RunRecord("wfc", (2, 2), 1, 1, False, error="contradiction")
    t = summarize([fake_record("wfc", 0, dead_ends=4), failed])
    assert t.get("wfc", "dead_ends").n == 1
    assert t.success_rate("wfc") == 0.5
    assert "50%" in t.to_markdown()


def test_record_json_round_trip(tiny):
    rec = tiny[2][0]
    back = RunRecord.from_dict(json.loads(json.dumps(rec.to_dict())))
    assert back.report == rec.report and np.array_equal(back.grid, rec.grid)
    assert back.seed == rec.seed and back.fitness == rec.fitness


def test_reference_means_pass_applicable_claims():
    table = StatTable.from_means({m: dict(zip(KEYS, v)) for m, v in REFERENCE.items()})
    verdicts = rank_check(table)
    assert [v.status for v in verdicts] == ["pass", "pass", "pass", "pass", "n/a"]


def test_hard_boundary_claim_is_expected_fail():
    means = {m: dict(zip(KEYS, v)) for m, v in REFERENCE.items()}
    means["wfc"]["boundary_violations"] = 0
    verdicts = rank_check(StatTable.from_means(means), wfc_hard_boundary=True)
    assert verdicts[0].status == "expected-fail"
    assert rank_check(StatTable.from_means(means))[0].status == "fail"


def test_single_method_table_rejected():
    with pytest.raises(ValueError, match="all five"):
        rank_check(summarize([fake_record("ea", 0)]))


def test_iqr_claim_uses_quartiles():
    records = []
    for m in METHODS:
        for run, cyc in enumerate([1, 2, 3, 4] if m == "map-elites" else [2, 2, 2, 3]):
            records.append(fake_record(m, run, dead_ends=9 if m == "wfc" else 0,
                                       cyclomatic_complexity=cyc))
    verdicts = rank_check(summarize(records))
    assert verdicts[4].status == "pass"
    assert "WARNING" in format_verdicts(verdicts, summarize(records))


def test_stat_of_single_value():
    s = Stat.of([5])
    assert (s.n, s.mean, s.std, s.iqr) == (1, 5.0, 0.0, 0.0)
