import json

import pytest

from twistwave import io
from twistwave.cli import main
from twistwave.field import Grid, SampledField
import numpy as np


def reports(d):
    return {p.stem: json.loads(p.read_text()) for p in d.glob("*.json")}


def test_verify_ops(tmp_path, capsys):
    assert main(["verify", "ops", "--out", str(tmp_path)]) == 0
    reps = reports(tmp_path)
    assert len(reps) == 4
    for r in reps.values():
        assert set(r) == {"check_name", "parameters", "metrics", "tolerance", "pass", "runtime_ms"}
        assert r["pass"] is True
    assert "4/4 checks passed" in capsys.readouterr().out


def test_unknown_suite(tmp_path):
    assert main(["verify", "nope", "--out", str(tmp_path)]) == 2
    assert not any(tmp_path.iterdir())


@pytest.mark.parametrize("args", [["--grid.n", "1000"], ["--no.such", "1"], ["--format", "xml"],
                                  ["--tolerances.gram", "-1"], ["--zak.M"]])
def test_usage_errors(tmp_path, args):
    assert main(["verify", "ops", "--out", str(tmp_path), *args]) == 2
    assert not any(tmp_path.iterdir())


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"grid": {"n": 7}}')
    assert main(["gram", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"gram": {"j": [0], "k": [0, 0], "l": [0, 1]}}))
    out = tmp_path / "o"
    assert main(["gram", "--config", str(cfg), "--gram.l", "[0,0]", "--out", str(out), "--quiet"]) == 0
    summary = json.loads((out / "gram_summary.json").read_text())
    assert summary["size"] == 1 and summary["pass"] is True
    assert (out / "gram.csv").read_text().splitlines()[1].startswith("0,0,1")


def test_corrupted_family_fails(tmp_path):
    out = tmp_path / "o"
    code = main(["gram", "--family.corrupted", "true", "--gram.k", "[-1,1]", "--gram.l", "[-1,1]",
                 "--out", str(out), "--quiet"])
    assert code == 1
    rep = reports(out)["wavelet.gram"]
    assert rep["pass"] is False and rep["metrics"]["max_deviation"] > 0.1


def test_deterministic_json(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["verify", "ops", "--out", str(d), "--format", "json", "--quiet"]) == 0
    ra, rb = reports(a), reports(b)
    assert ra.keys() == rb.keys()
    for k in ra:
        ra[k].pop("runtime_ms"), rb[k].pop("runtime_ms")
        assert json.dumps(ra[k]) == json.dumps(rb[k])


def test_calderon_tiling(tmp_path):
    out = tmp_path / "o"
    assert main(["calderon", "--family.kind", "tiling", "--spectral.n_eta", "1024", "--out", str(out),
                 "--quiet"]) == 0
    s = json.loads((out / "calderon_summary.json").read_text())
    assert s["max_abs_total_minus_one"] < 1e-12 and s["covered_band"] == [0.125, 8.0]
    header = (out / "calderon.csv").read_text().splitlines()[0]
    assert header == "eta,total," + ",".join(f"term_{j}" for j in range(-3, 4))


def test_calderon_haar_regression(tmp_path):
    out = tmp_path / "o"
    assert main(["calderon", "--out", str(out), "--format", "json", "--quiet"]) == 0
    assert reports(out)["spectral.haar_regression"]["pass"] is True


def test_unreadable_family_file(tmp_path):
    assert main(["calderon", "--family.kind", "file", "--family.path", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path / "o")]) == 2


def test_family_file_calderon(tmp_path):
    g = SampledField(Grid(2.0, 32), np.zeros((32, 32), complex))
    io.write_field(tmp_path / "g.twf2", g)
    (tmp_path / "fam.json").write_text('{"0": "g.twf2"}')
    out = tmp_path / "o"
    code = main(["calderon", "--family.kind", "file", "--family.path", str(tmp_path / "fam.json"),
                 "--spectral.n_eta", "64", "--out", str(out), "--quiet"])
    # a zero generator cannot tile
    assert code == 1


def test_zak_and_bracket_and_sigma(tmp_path):
    out = tmp_path / "o"
    small = ["--zak.M", "8", "--zak.H", "4", "--zak.n_eta", "64", "--out", str(out), "--quiet"]
    assert main(["zak", "--field", "gaussian", *small]) == 0
    assert (out / "zak.twzk").exists()
    assert main(["bracket", "--field", "haar0", *small]) == 0
    assert (out / "bracket.csv").exists()
    assert main(["sigma", "--field", "gaussian", "--out", str(out), "--quiet"]) == 0
    assert reports(out)["spectral.sigma_l1"]["metrics"]["l1"] == pytest.approx(1.0, abs=1e-12)
