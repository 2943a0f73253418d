import json

import pytest

from powerprov.cli import main


def invoke(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_synth_and_decompose(tmp_path, capsys):
    trace = tmp_path / "b.csv"
    code, _, _ = invoke(capsys, "synth", "--kind", "brick", "--n-jobs", "8", "--mean-load", "2",
                        "--seed", "1", "-o", str(trace))
    assert code == 0
    code, out, _ = invoke(capsys, "decompose", str(trace))
    assert code == 0
    doc = json.loads(out)
    assert doc["critical_times"][0] == 0.0
    assert all(seg["type"] in "I II III IV".split() for seg in doc["segments"])


def test_decompose_known_trace(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    trace.write_text(
        "# initial_jobs: 2\n# horizon: 5.0\ntime,event,job_id\n"
        "1.0,depart,a\n2.0,depart,b\n3.0,arrive,c\n4.0,arrive,d\n"
    )
    code, out, _ = invoke(capsys, "decompose", str(trace))
    assert code == 0
    doc = json.loads(out)
    assert doc["critical_times"] == [0.0, 1.0, 4.0, 5.0]
    assert [s["type"] for s in doc["segments"]] == ["I", "IV", "I"]


def test_decompose_constant_trace(tmp_path, capsys):
    trace = tmp_path / "flat.csv"
    trace.write_text("# initial_jobs: 3\n# horizon: 5.0\ntime,event,job_id\n")
    code, out, _ = invoke(capsys, "decompose", str(trace), "--format", "csv")
    assert code == 0
    rows = out.splitlines()
    assert rows == ["start,end,type,anchor_level", "0.0,5.0,I,3"]


def test_missing_file_exits_2(capsys):
    code, _, err = invoke(capsys, "decompose", "does-not-exist.csv")
    assert code == 2
    assert "does-not-exist.csv" in err


def test_offline_and_simulate_agree(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    trace.write_text(
        "# initial_jobs: 2\n# horizon: 5.0\ntime,event,job_id\n"
        "1.0,depart,a\n2.0,depart,b\n3.0,arrive,c\n4.0,arrive,d\n"
    )
    code, out, _ = invoke(capsys, "offline", str(trace), "--power", "1", "--beta-off", "0.5")
    assert code == 0
    total = json.loads(out)["total"]
    assert total == pytest.approx(7.0, abs=1e-9)
    code, out, _ = invoke(capsys, "simulate", str(trace), "--policy", "A0",
                          "--power", "1", "--beta-off", "0.5")
    assert code == 0
    assert json.loads(out)["breakdown"]["total"] == pytest.approx(7.0, abs=1e-9)


def test_simulate_fluid_with_log(tmp_path, capsys):
    trace = tmp_path / "f.csv"
    trace.write_text("slot,load\n0,2\n1,0\n2,0\n3,0\n4,0\n5,0\n6,0\n7,2\n")
    log = tmp_path / "log.csv"
    code, out, _ = invoke(capsys, "simulate", str(trace), "--policy", "A0",
                          "--beta-off", "6", "--log-csv", str(log))
    assert code == 0
    assert json.loads(out)["breakdown"]["total"] == pytest.approx(16.0)
    lines = log.read_text().splitlines()
    assert lines[0] == "record,server,what,t0,t1"
    assert any(line.startswith("decision") for line in lines[1:])


def test_ratio_table(capsys):
    code, out, _ = invoke(capsys, "ratio", "--b", "2", "--k", "0", "--probs")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["c"] == pytest.approx(4 / 3, abs=1e-12)
    assert row["P"] == [pytest.approx(1 / 3), pytest.approx(2 / 3)]
    code, out, _ = invoke(capsys, "ratio", "--b", "10000", "--k", "0", "--format", "csv")
    assert code == 0
    assert abs(float(out.splitlines()[1].split(",")[2]) - 1.5820) < 1e-3
    code, out, _ = invoke(capsys, "ratio", "--b", "4", "--k", "7")
    assert json.loads(out)["rows"][0]["c"] == 1.0


def test_rescale_round_trip(tmp_path, capsys):
    src = tmp_path / "f.csv"
    src.write_text("slot,load\n0,1\n1,2\n2,3\n")
    code, out, _ = invoke(capsys, "rescale", str(src), "--target-pmr", "2.0")
    assert code == 0
    loads = [float(line.split(",")[1]) for line in out.splitlines()[2:]]
    assert max(loads) / (sum(loads) / len(loads)) == pytest.approx(2.0, abs=1e-3)


def test_sweep_report_shape(tmp_path, capsys):
    trace = tmp_path / "f.csv"
    invoke(capsys, "synth", "--kind", "fluid", "--n-slots", "72", "--mean-load", "6",
           "--target-pmr", "3.0", "--seed", "3", "-o", str(trace))
    code, out, _ = invoke(capsys, "sweep", "--trace", str(trace), "--policies", "A1", "DELAYEDOFF",
                          "--windows", "0", "2", "5", "6", "--runs", "3", "--beta-off", "6")
    assert code == 0
    doc = json.loads(out)
    rows = {(r["policy"], r["window"]): r for r in doc["rows"]}
    a1 = [rows[("A1", w)]["cost_reduction"] for w in (0.0, 2.0, 5.0, 6.0)]
    assert all(x <= y + 1e-12 for x, y in zip(a1, a1[1:]))
    assert rows[("A1", 5.0)]["empirical_ratio"] == pytest.approx(1.0, abs=1e-9)
    assert rows[("A1", 6.0)]["empirical_ratio"] == pytest.approx(1.0, abs=1e-9)
    delayed = {rows[("DELAYEDOFF", w)]["mean_cost"] for w in (0.0, 2.0, 5.0, 6.0)}
    assert len(delayed) == 1
    for r in doc["rows"]:
        assert r["empirical_ratio"] >= 1.0 - 1e-9


def test_sweep_config_file(tmp_path, capsys):
    trace = tmp_path / "f.csv"
    trace.write_text("slot,load\n0,2\n1,1\n2,0\n3,2\n")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trace": str(trace), "policies": ["A1"], "alphas": [0.0, 1.0],
                               "runs": 2, "beta_off": 6.0}))
    code, out, _ = invoke(capsys, "sweep", "--config", str(cfg))
    assert code == 0
    assert len(json.loads(out)["rows"]) == 2


def test_config_unknown_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"traec": "x.csv"}))
    code, _, err = invoke(capsys, "sweep", "--config", str(cfg))
    assert code == 2
    assert "traec" in err


def test_infeasible_model_exits_1(tmp_path, capsys):
    trace = tmp_path / "f.csv"
    trace.write_text("slot,load\n0,2\n1,1\n")
    code, _, _ = invoke(capsys, "decompose", str(trace))
    assert code == 1  # fluid traces cannot be decomposed


def test_sweep_thread_count_does_not_change_rows(tmp_path, capsys, monkeypatch):
    trace = tmp_path / "f.csv"
    invoke(capsys, "synth", "--kind", "fluid", "--n-slots", "60", "--mean-load", "5",
           "--target-pmr", "2.5", "--seed", "4", "-o", str(trace))
    argv = ("sweep", "--trace", str(trace), "--policies", "A2", "A3", "--alphas", "0.0", "0.5",
            "--runs", "4", "--seed", "6", "--beta-off", "6")
    _, sequential, _ = invoke(capsys, *argv)
    monkeypatch.setenv("POWERPROV_THREADS", "4")
    _, threaded, _ = invoke(capsys, *argv)
    assert sequential == threaded


def test_commands_byte_identical(tmp_path, capsys):
    trace = tmp_path / "f.csv"
    invoke(capsys, "synth", "--kind", "fluid", "--n-slots", "48", "--mean-load", "5",
           "--target-pmr", "2.5", "--seed", "8", "-o", str(trace))
    cases = [
        ("synth", "--kind", "brick", "--n-jobs", "9", "--mean-load", "2", "--seed", "7"),
        ("simulate", str(trace), "--policy", "A2", "--alpha", "0.5", "--seed", "11", "--beta-off", "6"),
        ("sweep", "--trace", str(trace), "--policies", "A3", "--alphas", "0.25", "--runs", "3",
         "--seed", "5", "--beta-off", "6"),
        ("offline", str(trace), "--beta-off", "6"),
        ("ratio", "--b", "7", "--k", "2", "--probs"),
        ("rescale", str(trace), "--target-pmr", "3.5"),
    ]
    for argv in cases:
        code1, out1, _ = invoke(capsys, *argv)
        code2, out2, _ = invoke(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2, argv[0]
