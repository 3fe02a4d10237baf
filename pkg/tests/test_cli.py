import json
import subprocess
import sys
from pathlib import Path

import pytest

from causalmark import cli

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def simulate(cfg, tmp_path, tag=""):
    prof, rep = tmp_path / f"profile{tag}.csv", tmp_path / f"report{tag}.json"
    code = cli.main(["simulate", "--config", str(cfg), "--out-profile", str(prof),
                     "--out-report", str(rep)])
    return code, prof, rep


def test_simulate_f1(tmp_path):
    code, prof, rep = simulate(SCENARIOS / "f1_sigma_y.json", tmp_path)
    assert code == 0
    report = json.loads(rep.read_text())
    assert report["classification"] == "CSIP"
    locs = [z["location"] for z in report["zeros"] if z["location"] > 1e-6]
    assert locs == pytest.approx([1.5707963267948966, 3.141592653589793], abs=1e-6)
    assert report["lemma_identity_max_residual"] <= 1e-8
    assert len(prof.read_text().splitlines()) == 4097


def test_simulate_lattice(tmp_path):
    code, _, rep = simulate(SCENARIOS / "lattice_shielding.json", tmp_path)
    assert code == 0
    report = json.loads(rep.read_text())
    assert report["first_contact_step"] == 3
    assert report["shielding_holds"]


def test_simulate_malformed_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "continuum", "dim": 2')
    assert simulate(bad, tmp_path)[0] == 2


def test_simulate_wrong_kind(tmp_path):
    assert simulate(SCENARIOS / "f2_smear.json", tmp_path)[0] == 2


def test_simulate_missing_output_dir(tmp_path):
    code = cli.main(["simulate", "--config", str(SCENARIOS / "f1_sigma_y.json"),
                     "--out-profile", str(tmp_path / "nope" / "p.csv"),
                     "--out-report", str(tmp_path / "r.json")])
    assert code == 3


def test_simulate_unreadable_config(tmp_path):
    assert simulate(tmp_path / "absent.json", tmp_path)[0] == 3


def test_simulate_byte_identical(tmp_path):
    for cfg in ("f1_sigma_y.json", "random_dim4.json", "lattice_shielding.json"):
        _, p1, r1 = simulate(SCENARIOS / cfg, tmp_path, "a")
        _, p2, r2 = simulate(SCENARIOS / cfg, tmp_path, "b")
        assert p1.read_bytes() == p2.read_bytes()
        assert r1.read_bytes() == r2.read_bytes()


def test_smear_f2(tmp_path):
    out = tmp_path / "conv.csv"
    assert cli.main(["smear", "--config", str(SCENARIOS / "f2_smear.json"),
                     "--n-list", "1,10,100", "--out", str(out)]) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    assert [round(float(e), 4) for _, e in rows] == [0.2212, 0.0247, 0.0025]


def test_smear_identity_observable(tmp_path):
    data = json.loads((SCENARIOS / "f2_smear.json").read_text())
    data["observable"] = {"matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}
    cfg = tmp_path / "id.json"
    cfg.write_text(json.dumps(data))
    out = tmp_path / "conv.csv"
    assert cli.main(["smear", "--config", str(cfg), "--out", str(out)]) == 0
    assert all(float(line.split(",")[1]) == 0 for line in out.read_text().splitlines()[1:])


@pytest.mark.parametrize("n_list", ["", " , ", "10,1", "a,b"])
def test_smear_bad_n_list(tmp_path, n_list):
    assert cli.main(["smear", "--config", str(SCENARIOS / "f2_smear.json"),
                     "--n-list", n_list, "--out", str(tmp_path / "c.csv")]) == 2


def test_verify_zero_trials(capsys):
    assert cli.main(["verify", "--trials", "0"]) == 2


def test_verify_deterministic(capsys):
    assert cli.main(["verify", "--seed", "42", "--trials", "20"]) == 0
    first = capsys.readouterr().out
    assert cli.main(["verify", "--seed", "42", "--trials", "20"]) == 0
    assert capsys.readouterr().out == first
    assert first.rstrip().endswith("30/30 suites passed (seed=42, trials=20)")


def test_module_entry_point_help():
    out = subprocess.run([sys.executable, "-m", "causalmark", "--help"],
                         capture_output=True, text=True, check=True).stdout
    assert "simulate" in out and "scenario.schema.json" in out
