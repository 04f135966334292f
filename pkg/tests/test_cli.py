import json
from pathlib import Path

from pecbounds.cli import main
from pecbounds.jsonio import canonical_json

DATA = Path(__file__).resolve().parent.parent / "data"
CHANNEL = str(DATA / "channel_mixed_pair.json")
GRAPH = str(DATA / "relay_diamond.json")
CUT = str(DATA / "relay_diamond_cut.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_gap_reports_exact_values(capsys):
    payload = run_json(capsys, "gap", CHANNEL)
    assert payload["outer"]["exact"] == "18/25"
    assert payload["inner"]["exact"] == "7/10"
    assert payload["gap"]["exact"] == "1/50"
    assert payload["repair_fraction"]["exact"] == "1/12"
    assert payload["manifest"]["command"] == "gap"


def test_bound_value_and_witness(capsys):
    payload = run_json(capsys, "bound", CHANNEL)
    assert payload["value"]["exact"] == "18/25"
    assert payload["value"]["decimal"] == 0.72
    assert payload["witness"]["R[1]"]["exact"] == "9/25"
    assert payload["tuples_evaluated"] == 2


def test_bound_weighted_objective(capsys):
    payload = run_json(capsys, "bound", CHANNEL, "--mu", "1,0")
    assert payload["value"]["exact"] == "3/5"


def test_member(capsys):
    assert run_json(capsys, "member", CHANNEL, "9/25,9/25")["member"] is True
    assert run_json(capsys, "member", CHANNEL, "0.37,0.36")["member"] is False


def test_inner_and_k4_restriction(capsys, tmp_path):
    payload = run_json(capsys, "inner", CHANNEL)
    assert payload["value"]["exact"] == "7/10"
    big = tmp_path / "k4.json"
    big.write_text(canonical_json(
        {"k": 4, "subchannels": [{"model": "identical", "eps": "1/2"}]}))
    code, _, err = run(capsys, "inner", str(big))
    assert code == 3 and "time-sharing" in err
    payload = run_json(capsys, "inner", str(big), "--timeshare")
    assert payload["value"]["exact"] == "1/2"
    code, _, err = run(capsys, "gap", str(big))
    assert code == 3


def test_reduce_matches_data_channel(capsys):
    payload = run_json(capsys, "reduce", GRAPH, CUT)
    assert canonical_json(payload["channel"]) == (DATA / "channel_mixed_pair.json").read_text()
    assert [m["rates"] for m in payload["q_mapping"]] == [[1], [2]]
    assert payload["assumptions"]


def test_reduce_output_feeds_bound_unchanged(capsys, tmp_path):
    code, out, _ = run(capsys, "reduce", GRAPH, CUT)
    assert code == 0
    reduced = tmp_path / "reduced.json"
    reduced.write_text(out)
    payload = run_json(capsys, "bound", str(reduced))
    assert payload["value"]["exact"] == "18/25"
    payload = run_json(capsys, "gap", str(reduced))
    assert payload["gap"]["exact"] == "1/50"


def test_simulate_small(capsys):
    payload = run_json(capsys, "--seed", "3", "simulate", "--eps1", "1/2",
                       "--eps2", "9/10", "--n", "4000", "--trials", "3")
    assert payload["decode_failures"] == 0
    assert payload["closed_form"] == {"inner": "7/10", "outer": "18/25",
                                      "gap": "1/50", "repair_fraction": "1/12"}
    assert abs(payload["mean_rate"] - 0.72) < 0.02
    assert len(payload["trials"]) == 3
    base = run_json(capsys, "--seed", "3", "simulate", "--eps1", "1/2",
                    "--eps2", "9/10", "--n", "4000", "--trials", "3", "--baseline")
    assert abs(base["mean_rate"] - 0.70) < 0.02


def test_simulate_accepts_seed_after_subcommand(capsys):
    args = ["simulate", "--eps1", "1/2", "--eps2", "9/10", "--n", "500",
            "--trials", "2", "--seed", "11"]
    payload = run_json(capsys, *args)
    assert payload["manifest"]["seed"] == 11
    global_form = run_json(capsys, "--seed", "11", *args[:-2])
    assert payload == global_form


def test_simulate_precondition_exit(capsys):
    code, _, err = run(capsys, "simulate", "--eps1", "1/2", "--eps2", "0.87",
                       "--n", "100")
    assert code == 3
    assert "eps2 >= 1 - (1-eps1)*eps1/2" in err


def test_malformed_json_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"k": 2,\n  "subchannels": [}\n')
    code, _, err = run(capsys, "bound", str(bad))
    assert code == 2
    assert f"{bad}:2:" in err


def test_bad_values_exit_2(capsys, tmp_path):
    spec = tmp_path / "c.json"
    spec.write_text(canonical_json(
        {"k": 1, "subchannels": [{"model": "independent", "eps": ["3/2"]}]}))
    code, _, err = run(capsys, "bound", str(spec))
    assert code == 2 and "probability" in err
    code, _, err = run(capsys, "member", CHANNEL, "0.1")
    assert code == 2


def test_tuple_cap_exit_4(capsys, tmp_path):
    spec = tmp_path / "k3m2.json"
    spec.write_text(canonical_json({"k": 3, "subchannels": [
        {"model": "independent", "eps": ["1/5", "2/5", "3/5"]},
        {"model": "independent", "eps": ["1/7", "2/7", "3/7"]}]}))
    code, _, err = run(capsys, "--tuple-cap", "10", "bound", str(spec))
    assert code == 4 and "cap" in err


def test_byte_identical_reruns(capsys):
    _, first, _ = run(capsys, "gap", CHANNEL)
    _, second, _ = run(capsys, "gap", CHANNEL)
    assert first == second
    _, a, _ = run(capsys, "--seed", "9", "simulate", "--eps1", "1/2",
                  "--eps2", "9/10", "--n", "2000", "--trials", "2")
    _, b, _ = run(capsys, "--seed", "9", "simulate", "--eps1", "1/2",
                  "--eps2", "9/10", "--n", "2000", "--trials", "2")
    assert a == b


def test_emit_lp(capsys):
    payload = run_json(capsys, "--emit-lp", "bound", CHANNEL)
    assert len(payload["systems"]) == 2
    rows = payload["systems"][0]["rows"]
    assert any(r["rel"] == "=" for r in rows)


def test_float_mode(capsys):
    payload = run_json(capsys, "--mode", "float", "gap", CHANNEL)
    assert payload["outer"]["exact"] is None
    assert abs(payload["outer"]["decimal"] - 0.72) < 1e-9


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "gap", "--sweep", "--eps1", "1/2",
                       "--eps2", "9/10,19/20", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "eps1,eps2,outer,inner,gap,repair_fraction"
    assert lines[1].split(",") == ["1/2", "9/10", "18/25", "7/10", "1/50", "1/12"]
    assert len(lines) == 3


def test_sweep_json(capsys):
    payload = run_json(capsys, "gap", "--sweep", "--eps1", "1/2", "--eps2", "9/10")
    assert payload["sweep"][0]["gap"]["exact"] == "1/50"


def test_gap_requires_channel_or_sweep(capsys):
    code, _, err = run(capsys, "gap")
    assert code == 2
