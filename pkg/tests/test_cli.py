from fractions import Fraction
import json

import pytest

from madcantor.cli import main
from madcantor.serialize import config_to_dict, dumps

from conftest import unit_square_config

F = Fraction


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(dumps(config_to_dict(unit_square_config(gamma=(F(1, 3),)))))
    return path


@pytest.fixture
def cert_file(tmp_path, config_file):
    out = tmp_path / "cert.json"
    assert main(["construct", "--config", str(config_file), "--depth", "6", "--out", str(out)]) == 0
    return out


def test_construct_then_verify(cert_file, capsys):
    assert main(["verify", "--cert", str(cert_file)]) == 0
    assert capsys.readouterr().out.strip().endswith("accept")


def test_verify_tampered_prints_offending_point(cert_file, tmp_path, capsys):
    doc = json.loads(cert_file.read_text())
    doc["witness"] = [["1/3", "1/3"]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["verify", "--cert", str(bad)]) == 1
    out = capsys.readouterr().out
    assert out.startswith("reject")
    assert "offending P(p=" in out


@pytest.mark.parametrize(
    "field,value",
    [
        ("chain", [0, 0, 0, 0, 0, 0]),
        ("observed_removals", [1, 1, 1, 1, 1, 1]),
        ("c", "1/50"),
        ("R", 5),
        ("finite_range_bound", "1/2"),
        ("K", 5),
        ("edge", "1/3"),
    ],
)
def test_single_field_mutations_rejected(cert_file, tmp_path, field, value):
    doc = json.loads(cert_file.read_text())
    assert doc[field] != value
    doc[field] = value
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["verify", "--cert", str(bad)]) in (1, 2)


def test_m_plus_n_below_three_is_usage_error(tmp_path, capsys):
    doc = config_to_dict(unit_square_config())
    doc.update(n=1, cube_origin=[["1/4"]])
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    assert main(["construct", "--config", str(path), "--depth", "2", "--out", str(tmp_path / "o.json")]) == 2
    assert "m+n ≥ 3 required" in capsys.readouterr().err


def test_usage_errors(config_file, tmp_path):
    assert main(["construct", "--config", str(config_file)]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["verify", "--cert", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"matrix": [["3/0"]]}')
    assert main(["scan", "--matrix", str(bad), "--budget", "3"]) == 2


def test_exhausted_exit_code(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(dumps(config_to_dict(unit_square_config(c=1))))
    assert main(["construct", "--config", str(path), "--depth", "4", "--out", str(tmp_path / "o.json")]) == 1
    assert "exhausted" in capsys.readouterr().err


def test_scan(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"matrix": [["1/3", "1/3"]]}))
    assert main(["scan", "--matrix", str(path), "--budget", "3"]) == 0
    out = capsys.readouterr().out
    assert "min_lower_bound 0/1" in out
    assert "argmin 1 -1" in out


def test_sums(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"matrix": [["1/7", "3/11"]]}))
    out = tmp_path / "s.csv"
    assert main(["sums", "--matrix", str(path), "--q-list", "2,4", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3 and lines[0].startswith("Q,")
    path.write_text(json.dumps({"matrix": [["1/2", "1/2"]]}))
    assert main(["sums", "--matrix", str(path), "--q-list", "2"]) == 1


def test_oracle(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle", "--suite", "separation", "--trials", "10", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 11


def test_params(config_file, capsys):
    assert main(["params", "--config", str(config_file), "--horizon", "4"]) == 1
    out = capsys.readouterr().out
    assert "FAIL ii" in out
