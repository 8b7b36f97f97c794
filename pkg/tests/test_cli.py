import json
import os

import pytest

from bergkern import serialization as S
from bergkern.cli import main


def test_kernel_exact_prints_inverse_pi(capsys):
    assert main(["kernel", "--domain", "disk", "--point", "0", "--method", "exact"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "0.3183099"


def test_kernel_json_and_csv(capsys, tmp_path):
    assert main(["kernel", "--domain", "ball:2", "--point", "0.3,0", "--out", "json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["method"] == "exact" and rec["density"] == pytest.approx(2 / 3.141592653589793 ** 2 / 0.91 ** 3)
    assert main(["kernel", "--domain", "disk", "--point", "0.5", "--method", "reinhardt", "--degree", "12",
                 "--out", "csv"]) == 0
    header, row = capsys.readouterr().out.strip().splitlines()
    assert header.split(",")[:2] == ["domain.kind", "domain.dim"] and "density" in header
    path = tmp_path / "k.json"
    assert main(["kernel", "--domain", '{"kind": "disk", "dim": 1}', "--point", "0.1", "--out", str(path)]) == 0
    assert json.loads(path.read_text())["density"] > 0


def test_kernel_usage_errors(capsys):
    assert main(["kernel", "--domain", "disk"]) == 2
    assert main(["kernel", "--domain", "nope", "--point", "0"]) == 2
    assert main(["kernel", "--domain", "disk", "--point", "2"]) == 2
    assert main(["kernel", "--domain", "disk", "--point", "0", "--out", "x.txt"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["kernel", "--domain", "disk", "--point", "0", "--bogus"]) == 2


def test_green_pole_policy(capsys):
    assert main(["green", "--domain", "disk", "--pole", "0", "--point", "0"]) == 2
    assert main(["green", "--domain", "disk", "--pole", "0", "--point", "0", "--allow-pole", "--out", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["green"] == "-inf"


def test_green_values_and_depths(capsys):
    assert main(["green", "--domain", "disk", "--pole", "0.3", "--point", "0.6", "--out", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["green"] == pytest.approx(-1.0055218656020977, abs=1e-12)
    assert main(["green", "--domain", "polydisc:1,1", "--depths", "1,2", "--out", "json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["scaled"] == pytest.approx([3.141592653589793 ** 2] * 2)
    assert main(["green", "--domain", "ball:2", "--pole", "0.1,0", "--point", "0,0"]) == 2
    assert main(["green", "--domain", "disk", "--point", "0.1", "--depths", "1,2"]) == 2


def test_metric_subcommand(capsys):
    assert main(["metric", "--model", "disk", "--point", "0.5", "--vector", "1"]) == 0
    assert float(capsys.readouterr().out.split()[0]) == pytest.approx(4 / 3)
    assert main(["metric", "--domain", "polydisc:1,1", "--busemann", "--out", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["busemann_density"] == pytest.approx(0.5)
    assert main(["metric", "--model", "euclidean", "--hausdorff", "--region", "rect:0,1,0,1", "--out", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["hausdorff"] == pytest.approx(1.0, rel=0.05)
    assert main(["metric", "--domain", "ball:2", "--point", "0.1,0", "--vector", "1,0"]) == 2
    assert main(["metric", "--model", "disk", "--vector", "1", "--busemann"]) == 2


def _suite(tmp_path, checks):
    p = tmp_path / "suite.json"
    p.write_text(json.dumps({"seed": 1, "checks": checks}))
    return str(p)


def test_verify_pass_and_outputs(tmp_path, capsys):
    suite = _suite(tmp_path, [{"name": "green_identity", "params": {"n_pairs": 10}},
                              {"name": "blocki", "params": {"domain": "disk"}}])
    out = tmp_path / "out"
    assert main(["verify", "--suite", suite, "--out", str(out), "--seed", "7"]) == 0
    files = sorted(os.listdir(out))
    assert files == ["00_green_identity.json", "01_blocki.json", "summary.csv", "summary.json"]
    doc = json.loads((out / "summary.json").read_text())
    S.validate_document(doc)
    assert doc["config"]["seed"] == 7


def test_verify_forced_failure_and_overrides(tmp_path, capsys):
    suite = _suite(tmp_path, [{"name": "volume_consistency", "params": {"samples": 50_000}}])
    assert main(["verify", "--suite", suite, "--out", str(tmp_path / "o"), "--tol-overrides",
                 "volume_consistency=0"]) == 1
    assert main(["verify", "--suite", suite, "--out", str(tmp_path / "o"), "--tol-overrides", "bogus=1"]) == 2
    assert main(["verify", "--suite", str(tmp_path / "missing.json")]) == 2


def test_verify_empty_suite(tmp_path, capsys):
    assert main(["verify", "--suite", _suite(tmp_path, []), "--out", str(tmp_path / "e")]) == 0


def test_env_seed(tmp_path, monkeypatch, capsys):
    suite = _suite(tmp_path, [{"name": "green_identity", "params": {"n_pairs": 3}}])
    monkeypatch.setenv("BERGKERN_SEED", "123")
    assert main(["verify", "--suite", suite, "--out", str(tmp_path / "s")]) == 0
    assert json.loads((tmp_path / "s" / "summary.json").read_text())["config"]["seed"] == 123
    monkeypatch.setenv("BERGKERN_SEED", "abc")
    assert main(["verify", "--suite", suite, "--out", str(tmp_path / "s")]) == 2


def test_idempotent_outputs(tmp_path, capsys):
    suite = _suite(tmp_path, [{"name": "azukawa", "params": {"n_directions": 4}}])
    out = tmp_path / "i"
    main(["verify", "--suite", suite, "--out", str(out)])
    first = {f: S.strip_timing(json.loads((out / f).read_text())) for f in os.listdir(out) if f.endswith(".json")}
    main(["verify", "--suite", suite, "--out", str(out), "--threads", "2"])
    second = {f: S.strip_timing(json.loads((out / f).read_text())) for f in os.listdir(out) if f.endswith(".json")}
    assert first == second


def test_report_writes_figures_and_csv(tmp_path, capsys):
    out = tmp_path / "r"
    assert main(["report", "--out", str(out), "--figures", "volume_growth,kernel_busemann,expansion"]) == 0
    names = sorted(os.listdir(out))
    assert names == ["expansion.csv", "expansion.png", "kernel_busemann.csv", "kernel_busemann.png",
                     "volume_growth.csv", "volume_growth.png"]
    assert (out / "volume_growth.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert (out / "kernel_busemann.csv").read_text().splitlines()[0] == \
        "radius,kernel,busemann_over_eps,ratio,upper_constant"
    assert main(["report", "--out", str(out), "--figures", "nope"]) == 2


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("bergkern ")
