import hashlib
import json
from pathlib import Path

import pytest

from wittenlab import cli

DATA = Path(__file__).parent / "data"


def run(*argv):
    return cli.main(list(argv))


def test_model_spectrum_table(capsys):
    code = run(
        "model", "spectrum", "--n", "2", "--index", "1", "--degree", "1",
        "--mu", "1",
    )
    out = capsys.readouterr().out
    assert code == 0
    values = [
        float(line.split()[0]) for line in out.splitlines()
        if line.startswith("  ") and line.split()[0][0].isdigit()
    ]
    assert values[:3] == [0.0, 2.0, 2.0]


def test_model_check_passes(capsys):
    assert run("model", "check", "--mu", "4") == 0


def test_missing_required_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        run("model", "check")
    assert exc.value.code == 2


def test_circle_zeta(tmp_path, capsys):
    out = tmp_path / "zeta.csv"
    code = run(
        "circle", "zeta", "--config", str(DATA / "two_zero_exact.json"),
        "--mu", "30", "--out", str(out),
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "zeta1=-1.98" in text
    assert out.exists() and out.with_suffix(".csv.json").exists()


def test_circle_gap(capsys):
    code = run(
        "circle", "gap", "--config", str(DATA / "tight.json"),
        "--mu", "5,10,20,40",
    )
    assert code == 0


def test_circle_identity(capsys):
    code = run(
        "circle", "identity", "--config", str(DATA / "two_zero_exact.json"),
        "--N", "64,128,256", "--mu", "10", "--t", "0.1",
    )
    assert code == 0


def test_circle_infeasible_config_exits_3(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "type": "standard_zeros",
        "zeros": [[0.0, 1.0, 1], [0.2, -1.0, 0]],
        "r": 0.4, "N": 64,
    }))
    assert run("circle", "zeta", "--config", str(bad), "--mu", "30") == 3


def test_morse_analyze(capsys):
    code = run("morse", "analyze", "--graph", str(DATA / "s1.graph"),
               "--mu", "20")
    out = capsys.readouterr().out
    assert code == 0
    assert "m1         = (0, 1)" in out
    assert "z_sm" in out


def test_prescribe_verify_roundtrip(tmp_path):
    out = tmp_path / "new.graph"
    cert = tmp_path / "cert.json"
    code = run(
        "prescribe", "--graph", str(DATA / "raw.graph"), "--targets", "4",
        "--out", str(out), "--cert", str(cert),
    )
    assert code == 0
    assert run(
        "verify", "--graph", str(DATA / "raw.graph"), "--targets", "4",
        "--result", str(out), "--cert", str(cert),
    ) == 0
    # tamper with one weight: the verifier must fail with exit 4
    lines = out.read_text().splitlines()
    for i, line in enumerate(lines):
        if line.startswith("e "):
            parts = line.split()
            parts[-1] = repr(float(parts[-1]) + 0.1)
            lines[i] = " ".join(parts)
            break
    out.write_text("\n".join(lines) + "\n")
    assert run(
        "verify", "--graph", str(DATA / "raw.graph"), "--targets", "4",
        "--result", str(out), "--cert", str(cert),
    ) == 4


def test_report_determinism(tmp_path):
    hashes = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.csv"
        run(
            "circle", "gap", "--config", str(DATA / "tight.json"),
            "--mu", "5,10", "--out", str(out),
        )
        hashes.append(hashlib.sha256(out.read_bytes()).hexdigest())
        hashes.append(
            hashlib.sha256(out.with_suffix(".csv.json").read_bytes()).hexdigest()
        )
    assert hashes[0] == hashes[2] and hashes[1] == hashes[3]
