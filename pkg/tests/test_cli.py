import json

import pytest

from radplan import cli
from radplan.reports import read_result, read_sweep

FAST = ["--particles", "6", "--iters", "5"]


def test_validate_builtin(capsys):
    assert cli.run_cli(["validate", "builtin:26bus"]) == 0
    assert capsys.readouterr().out.strip() == "27 buses, 26 sections, radial: ok"


def test_validate_case_flag(capsys):
    assert cli.run_cli(["validate", "--case", "builtin:toy5"]) == 0
    assert "5 buses, 4 sections" in capsys.readouterr().out


def test_missing_file(capsys):
    assert cli.run_cli(["plan", "--case", "missing.json"]) == 2
    assert "missing.json" in capsys.readouterr().err


def test_bad_case_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    assert cli.run_cli(["validate", str(path)]) == 2
    assert "syntax error" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["plan", "builtin:26bus", "--bogus"],
        ["frobnicate"],
        [],
        ["plan"],
        ["plan", "builtin:26bus", "--scenario", "all"],
        ["plan", "builtin:26bus", "--omega", "2"],
        ["sweep", "builtin:toy5", "--omega-grid", "1:0.1:0"],
        ["plan", "builtin:26bus", "--case", "builtin:toy5"],
    ],
)
def test_usage_errors(argv, capsys):
    assert cli.run_cli(argv) == 1
    assert capsys.readouterr().err


def test_parse_grid():
    assert cli.parse_grid("0:0.25:1") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert len(cli.parse_grid("0:0.1:1")) == 11


def test_pf_to_directory(tmp_path):
    assert cli.run_cli(["pf", "builtin:26bus", "--year", "10", "--out", str(tmp_path)]) == 0
    buses = (tmp_path / "buses.csv").read_text().splitlines()
    sections = (tmp_path / "sections.csv").read_text().splitlines()
    assert buses[0] == "bus,u_pu,delta_rad" and len(buses) == 28
    assert sections[0] == "section,i_amp,i_max_amp" and len(sections) == 26


def test_pf_bad_year(capsys):
    assert cli.run_cli(["pf", "builtin:26bus", "--year", "11"]) == 2


def test_plan_writes_readable_result(tmp_path):
    out = tmp_path / "run"
    assert cli.run_cli(["plan", "builtin:toy5", "--seed", "3", "--out", str(out)] + FAST) == 0
    doc = read_result(str(out / "result.json"))
    assert doc["feasible"] is True
    assert doc["config"] == {"seed": 3, "particles": 6, "iterations": 5}
    assert set(doc["best_design"].conductor) == {1, 2, 3, 4}
    assert len(doc["history"]) == 6
    assert doc["costs"]["obj"] == pytest.approx(doc["costs"]["cond_cost"] + doc["costs"]["loss_cost"])
    table = (out / "table.txt").read_text()
    assert "Conductor Cost" in table and "Seed = 3" in table

    # a result file doubles as a design file for pf
    assert cli.run_cli(["pf", "builtin:toy5", "--design", str(out / "result.json"), "--out", str(out)]) == 0


def test_plan_full_lists_equipment(tmp_path):
    out = tmp_path / "run"
    assert cli.run_cli(["plan", "builtin:toy5", "--scenario", "full", "--out", str(out),
                        "--particles", "20", "--iters", "30"]) == 0
    doc = json.loads((out / "result.json").read_text())
    assert doc["scenario"] == {"mode": "full", "omega": 0.5}
    assert set(doc["best_design"]) == {"conductor", "capacitor", "dg"}
    table = (out / "table.txt").read_text()
    assert "Capacitors:" in table and "DG units:" in table


def test_plan_infeasible_exit_code(tmp_path, toy5):
    import dataclasses

    from radplan.netmodel import serialize_case

    tight = dataclasses.replace(toy5, economics=dataclasses.replace(toy5.economics, v_min=0.999))
    path = tmp_path / "tight.json"
    path.write_text(serialize_case(tight))
    out = tmp_path / "run"
    assert cli.run_cli(["plan", str(path), "--out", str(out)] + FAST) == 3
    doc = json.loads((out / "result.json").read_text())
    assert doc["feasible"] is False
    assert all(h is None for h in doc["history"])


def test_plan_output_is_deterministic(tmp_path):
    for name in ("a", "b"):
        assert cli.run_cli(["plan", "builtin:toy5", "--seed", "5", "--out", str(tmp_path / name)] + FAST) == 0
    for f in ("result.json", "table.txt"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_sweep(tmp_path):
    out = tmp_path / "sw"
    argv = ["sweep", "builtin:toy5", "--omega-grid", "0:0.5:1", "--out", str(out), "--particles", "10", "--iters", "20"]
    assert cli.run_cli(argv) == 0
    text = (out / "sweep.csv").read_text()
    assert text.splitlines()[0] == "omega,cond_cost,loss_cost,total_ploss_kw,u_ind,profile"
    rows = read_sweep(str(out / "sweep.csv"))
    assert [r.omega for r in rows] == [0.0, 0.5, 1.0]
    assert all(len(r.profile) == 4 for r in rows)
    assert rows[0].profile == (1, 1, 1, 1)


def test_plan_full_26bus_seed_7(tmp_path):
    out = tmp_path / "run1"
    assert cli.run_cli(["plan", "builtin:26bus", "--scenario", "full", "--seed", "7", "--out", str(out)]) == 0
    doc = read_result(str(out / "result.json"))
    assert doc["feasible"]
    assert doc["costs"]["cap_cost"] <= 5000 and doc["costs"]["dg_cost"] <= 10000
    table = (out / "table.txt").read_text()
    assert "Section" in table and "DG units:" in table
