import json
import pathlib

import pytest

from svdyn.cli import main

DATA = pathlib.Path(__file__).parent / "data"
GOLDEN = pathlib.Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_golden_files(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    for system, golden in (("folded.json", "check_folded.json"),
                           ("sym_tent.json", "check_sym_tent.json")):
        code, out, _ = run(capsys, "check", system)
        assert code == 0
        assert out == (GOLDEN / golden).read_text()


def test_check_predicates_for_presets(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    code, out, _ = run(capsys, "check", "folded.json")
    doc = json.loads(out)
    assert doc["predicates"] == {"usc": True, "lsc": False, "continuous": False,
                                 "open": True, "onto": True, "closed": True}
    code, out, _ = run(capsys, "check", "sym_tent.json")
    assert json.loads(out)["predicates"]["continuous"] is True


def test_shadow_exit_codes(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    code, out, _ = run(capsys, "shadow", "line.json",
                       "--orbit", "po_line.json", "--eps", "3/5")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "shadowed"
    assert doc["witness"] == ["p0", "p1", "p2"]
    assert "manifest" in doc
    code, _, _ = run(capsys, "shadow", "line.json",
                     "--orbit", "po_line.json", "--eps", "1/2")
    assert code == 2


def test_shadow_gen_reproducible(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    args = ("shadow", "sym_tent.json", "--gen", "0.01", "10", "9",
            "--eps", "0.08", "--seed", "9")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert (code1, out1) == (code2, out2)
    assert code1 == 0


def test_scan_delta_star(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    code, out, _ = run(capsys, "scan", "line.json",
                       "--eps-grid", "0.3,0.6,1.0", "--delta-star")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# manifest ")
    assert lines[1] == "eps,delta,verdict,witness_len,nodes,seed"
    values = [line.split(",")[1] for line in lines[2:]]
    assert values == ["0.5", "0.5", "0.5"]


def test_scan_grid_verdicts(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    code, out, _ = run(capsys, "scan", "line.json",
                       "--eps-grid", "0.6", "--delta-grid", "0.5,0.6")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[2:]]
    assert rows[0][2] == "property_holds"
    assert rows[1][2] == "property_fails"
    assert int(rows[1][3]) == 3  # counterexample length


def test_lift_modes(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    code, out, _ = run(capsys, "lift", "sym_tent.json",
                       "--gen", "0.000097", "12", "4",
                       "--delta", "0.1", "--mode", "shift")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    assert len(doc["beta"]) == 11

    code, out, _ = run(capsys, "lift", "folded.json",
                       "--gen", "0.0005", "8", "4",
                       "--delta", "0.1", "--mode", "inv")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_lift_nstep_mode(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    code, out, _ = run(capsys, "lift", "sym_tent.json",
                       "--gen", "0.0000001", "30", "5",
                       "--delta", "0.1", "--eps", "0.2",
                       "--mode", "nstep", "--steps", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["chain_ok"] is True
    assert set(doc["variants"]) == {"original", "tail", "chained"}


def test_expansive_and_quantize(monkeypatch, capsys, tmp_path):
    monkeypatch.chdir(DATA)
    out_path = tmp_path / "grid.json"
    code, _, _ = run(capsys, "quantize", "folded.json",
                     "--resolution", "2/64", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["map"]["kind"] == "relation"
    code, out, _ = run(capsys, "expansive", str(out_path), "--delta", "0.1",
                       "--lift-check", "--samples", "20", "--seed", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "expansive"
    assert rep["grid_evidence"] is True
    assert "caveat" in rep
    assert rep["lift_check"]["ok"] is True


def test_gen_requires_seed(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    code, _, err = run(capsys, "gen", "line.json", "--delta", "0.6",
                       "--length", "4")
    assert code == 1
    assert "seed" in err


def test_malformed_json_diagnostic(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 1
    assert err.startswith("error:")


def test_raw_units_echo(monkeypatch, capsys):
    monkeypatch.chdir(DATA)
    code, out, _ = run(capsys, "shadow", "sym_tent.json",
                       "--gen", "0.01", "6", "3", "--eps", "0.05",
                       "--raw-units")
    assert code == 0
    doc = json.loads(out)
    # carrier [-2, 2]: raw = normalized / scale = normalized * 4
    assert doc["raw_units"]["epsilon"] == pytest.approx(0.2)
