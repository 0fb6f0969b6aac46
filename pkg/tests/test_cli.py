import json
import subprocess
import sys

import pytest

from vlt.cli import main
from vlt.svgio import parse_design
from conftest import ASSETS

PAIR = ASSETS / "pairs" / "pair2"


@pytest.fixture()
def pair_files(tmp_path):
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    a.write_text(PAIR.joinpath("a.svg").read_text())
    b.write_text(PAIR.joinpath("b.svg").read_text())
    return a, b


def test_transfer_auto(pair_files, tmp_path, capsys):
    a, b = pair_files
    out = tmp_path / "out.svg"
    rules = tmp_path / "rules.json"
    code = main(
        [
            "transfer",
            "--target", str(a),
            "--source", str(b),
            "--out", str(out),
            "--auto",
            "--dump-rules", str(rules),
        ]
    )
    assert code == 0
    d, _ = parse_design(out.read_bytes())
    assert d["p1"].geometry.x == 10.0  # scaled copy of s1
    doc = json.loads(rules.read_text())
    assert {"target", "source", "output"} <= set(doc)


def test_transfer_with_optimizer_is_deterministic(pair_files, tmp_path):
    a, b = pair_files
    outs = []
    for name in ("o1.svg", "o2.svg"):
        out = tmp_path / name
        assert main(
            ["transfer", "--target", str(a), "--source", str(b), "--out", str(out),
             "--auto", "--optimize", "50", "--seed", "11"]
        ) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_transfer_without_auto_roundtrips_target(pair_files, tmp_path):
    a, b = pair_files
    out = tmp_path / "plain.svg"
    assert main(["transfer", "--target", str(a), "--source", str(b), "--out", str(out)]) == 0
    d, _ = parse_design(out.read_bytes())
    base, _ = parse_design(a.read_bytes())
    assert d == base


def test_rules_json(pair_files, capsys):
    a, _ = pair_files
    assert main(["rules", str(a), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert any(r["variant"] == "HAlign" for r in doc["rules"])


def test_rules_human_readable(pair_files, capsys):
    a, _ = pair_files
    assert main(["rules", str(a)]) == 0
    assert "HAlign" in capsys.readouterr().out


def test_match_json(pair_files, capsys):
    a, b = pair_files
    assert main(["match", str(a), str(b), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert {p["a"]: p["b"] for p in doc["pairs"]}["p1"] == "s1"


def test_missing_input_exits_1(tmp_path, capsys):
    out = tmp_path / "x.svg"
    code = main(["transfer", "--target", "missing.svg", "--source", "missing2.svg", "--out", str(out)])
    assert code == 1


def test_malformed_input_exits_1(tmp_path):
    bad = tmp_path / "bad.svg"
    bad.write_text("<svg><oops")
    good = tmp_path / "good.svg"
    good.write_text('<svg width="10" height="10"><rect width="5" height="5"/></svg>')
    assert main(["transfer", "--target", str(bad), "--source", str(good), "--out", str(tmp_path / "o.svg")]) == 1


def test_weights_file(pair_files, tmp_path):
    a, b = pair_files
    weights = tmp_path / "w.json"
    weights.write_text(json.dumps({"off": 2.0, "con": 0.5, "sigma": 3.0, "rules": {}}))
    out = tmp_path / "out.svg"
    assert main(
        ["transfer", "--target", str(a), "--source", str(b), "--out", str(out),
         "--auto", "--optimize", "10", "--weights", str(weights)]
    ) == 0
    assert out.exists()


def test_console_script_entry_point(pair_files, tmp_path):
    a, b = pair_files
    out = tmp_path / "out.svg"
    proc = subprocess.run(
        [sys.executable, "-m", "vlt.cli", "transfer", "--target", str(a), "--source", str(b),
         "--out", str(out), "--auto"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
