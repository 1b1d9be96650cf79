"""Command line harness: sweeps, certification, and tables."""

import json

from click.testing import CliRunner

from unilocal.cli import main

SPEC = """
[[experiment]]
name = "mis_cycle"
algorithm = "coloring_mis"
problem = "mis"
family = "cycle"
sizes = [8, 16]
seeds = 2
predictor = "add(log)"
"""


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_list_shows_registries():
    res = invoke("list")
    assert res.exit_code == 0
    assert "coloring_mis" in res.output
    assert "ruling1" in res.output


def test_run_writes_csv_and_summary(tmp_path):
    spec = tmp_path / "spec.toml"
    spec.write_text(SPEC)
    res = invoke("run", "--spec", str(spec), "--out", str(tmp_path / "rep"))
    assert res.exit_code == 0, res.output
    csv_text = (tmp_path / "rep" / "mis_cycle.csv").read_text()
    lines = csv_text.strip().splitlines()
    assert lines[0] == "family,n,seed,rounds,iterations,messages,valid"
    assert len(lines) == 1 + 4
    assert all(line.endswith("true") for line in lines[1:])
    summary = json.loads((tmp_path / "rep" / "mis_cycle.json").read_text())
    assert summary["all_valid"] and summary["runs"] == 4
    assert summary["fitted_C"] > 0


def test_run_is_reproducible(tmp_path):
    spec = tmp_path / "spec.toml"
    spec.write_text(SPEC)
    for d in ("a", "b"):
        res = invoke("run", "--spec", str(spec),
                     "--out", str(tmp_path / d))
        assert res.exit_code == 0
    assert (tmp_path / "a" / "mis_cycle.csv").read_bytes() == \
        (tmp_path / "b" / "mis_cycle.csv").read_bytes()


def test_run_empty_ladder_exits_zero(tmp_path):
    spec = tmp_path / "spec.toml"
    spec.write_text(SPEC.replace("sizes = [8, 16]", "sizes = []"))
    res = invoke("run", "--spec", str(spec), "--out", str(tmp_path / "rep"))
    assert res.exit_code == 0
    lines = (tmp_path / "rep" / "mis_cycle.csv").read_text().splitlines()
    assert len(lines) == 1  # header only


def test_run_failure_dumps_counterexample(tmp_path):
    spec = tmp_path / "spec.toml"
    # an MIS program verified as a matching must fail
    spec.write_text(SPEC.replace('algorithm = "coloring_mis"',
                                 'algorithm = "greedy_mis"')
                    .replace('problem = "mis"', 'problem = "matching"'))
    res = invoke("run", "--spec", str(spec), "--out", str(tmp_path / "rep"))
    assert res.exit_code == 1
    dump = json.loads(
        (tmp_path / "rep" / "mis_cycle_counterexample.json").read_text())
    assert dump["family"] == "cycle" and dump["outputs"]


def test_run_rejects_bad_spec(tmp_path):
    spec = tmp_path / "spec.toml"
    spec.write_text(SPEC.replace("coloring_mis", "made_up"))
    res = invoke("run", "--spec", str(spec), "--out", str(tmp_path / "rep"))
    assert res.exit_code != 0
    spec.write_text(SPEC.replace("[8, 16]", "[16, 8]"))
    res = invoke("run", "--spec", str(spec), "--out", str(tmp_path / "rep"))
    assert res.exit_code != 0


def test_certify_command(tmp_path):
    out = tmp_path / "cert.json"
    res = invoke("certify", "ruling1", "--max-n", "3", "--out", str(out))
    assert res.exit_code == 0, res.output
    assert json.loads(out.read_text())["ok"]


def test_certify_refuses_past_oracle_cap():
    res = invoke("certify", "mm", "--max-n", "11")
    assert res.exit_code != 0
    assert "cap" in res.output


def test_table_command(tmp_path):
    spec = tmp_path / "spec.toml"
    spec.write_text(SPEC)
    invoke("run", "--spec", str(spec), "--out", str(tmp_path / "rep"))
    res = invoke("table", str(tmp_path / "rep" / "mis_cycle.json"))
    assert res.exit_code == 0
    assert res.output.splitlines()[0] == \
        "problem,algorithm,family,rounds_by_size,fitted_C"
    assert "mis,coloring_mis,cycle" in res.output
    missing = invoke("table", str(tmp_path / "nope.json"))
    assert missing.exit_code != 0
