import hashlib
import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heunsym.cli import (TABLE_HEADER, build_config, build_parser, format_complex, parse_complex,
                         run)
from heunsym.fuchsian import SymmetricHeunConfig
from heunsym.mobius import MobiusMap, transform_config

PHI = "1.0471975511965976"
BASE = ["--phi", PHI, "--chi", "0.3,0.5,0.7,0.9", "--lambda", "0.4+0.1i"]


def run_captured(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_pairs(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines())


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_format_roundtrip(z):
    back = parse_complex(format_complex(z))
    assert back == z or (back.real == z.real and back.imag == z.imag)


def test_parse_complex_forms():
    assert parse_complex("1.5-0.25i") == 1.5 - 0.25j
    assert parse_complex("2") == 2
    assert parse_complex("-3i") == -3j
    assert parse_complex("i") == 1j
    assert parse_complex("1e-3+2e2j") == 0.001 + 200j
    with pytest.raises(Exception):
        parse_complex("abc")


def test_format_drops_negative_zero():
    assert format_complex(complex(-0.0, -0.0)) == "0+0i"


def test_eval_normalization(capsys):
    code, out, _ = run_captured(capsys, ["eval", "--phi", "0.7853981633974483", "--chi", "0,0,0,0",
                                         "--lambda", "1+0i", "--z", "0"])
    assert code == 0
    vals = parse_pairs(out)
    assert vals["F1"] == "1+0i" and vals["F2"] == "0+0i" and vals["dF2"] == "1+0i"
    assert vals["dF1"] == "0+0i"


def test_eval_exterior_point_uses_laurent_pair(capsys):
    code, out, _ = run_captured(capsys, ["eval", *BASE, "--z", "2+0.5i"])
    assert code == 0
    assert set(parse_pairs(out)) == {"z", "F1", "dF1", "F2", "dF2"}


def test_eval_in_gap_annulus_is_numerical_failure(capsys):
    code, _, err = run_captured(capsys, ["eval", *BASE, "--z", "1"])
    assert code == 3 and "outside" in err


def test_table_is_deterministic(tmp_path):
    digests = []
    for k in range(2):
        path = tmp_path / f"t{k}.csv"
        assert run(["table", *BASE, "--grid", "0:0.7:4,0:3:5", "--output", str(path)]) == 0
        data = path.read_bytes()
        digests.append(hashlib.sha256(data).hexdigest())
    assert digests[0] == digests[1]
    lines = data.decode().split("\n")
    assert lines[0] == TABLE_HEADER
    assert len(lines) == 1 + 20 + 1 and lines[-1] == ""
    row = lines[5].split(",")
    assert len(row) == 8 and float(row[6]) < 1e-12 and float(row[7]) < 1e-10


def test_table_annulus_rows(tmp_path):
    path = tmp_path / "outer.csv"
    assert run(["table", *BASE, "--grid", "0.5:2:2,0:1:2", "--output", str(path)]) == 0
    rows = path.read_text().strip().split("\n")[1:]
    assert len(rows) == 4
    assert all(float(r.split(",")[7]) < 1e-8 for r in rows)


def test_fundamental_csv(capsys):
    code, out, _ = run_captured(capsys, ["fundamental", *BASE, "--terms", "20"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "n,re_f1,im_f1,re_f2,im_f2"
    assert lines[1] == "0,1,0,0,0" and lines[2] == "1,0,0,1,0"
    assert len(lines) == 22


def test_verify_constant_config(capsys):
    code, out, _ = run_captured(capsys, ["verify", "--phi", "0.6", "--chi", "0,0,0,0",
                                         "--lambda", "0"])
    assert code == 0
    for line in out.strip().split("\n"):
        assert "pass" in line
        assert float(line.split("max=")[1].split()[0]) < 1e-12


def test_verify_general_config(capsys):
    code, out, _ = run_captured(capsys, ["verify", *BASE])
    assert code == 0
    assert len(out.strip().split("\n")) == 4


def test_mobius_roundtrip(tmp_path, capsys):
    path = tmp_path / "moved.cfg"
    assert run(["mobius", *BASE, "--map", "1+0.2i,0.3,0.25i,1.1", "--output", str(path)]) == 0
    again = build_config(build_parser().parse_args(["eval", "--config", str(path)]))
    cfg = SymmetricHeunConfig.canonical(float(PHI), (0.3, 0.5, 0.7, 0.9), 0.4 + 0.1j)
    direct = transform_config(cfg, MobiusMap(1 + 0.2j, 0.3, 0.25j, 1.1))
    for a, b in zip(again.points + again.chis + (again.lam,),
                    direct.points + direct.chis + (direct.lam,)):
        assert abs(a - b) <= 1e-14 * max(1, abs(b))


def test_config_file_with_comments(tmp_path, capsys):
    path = tmp_path / "c.cfg"
    path.write_text("# symmetric example\nphi = 0.7853981633974483\nchis = 0,0,0,0  # free\n"
                    "lambda = 1+0i\n")
    code, out, _ = run_captured(capsys, ["eval", "--config", str(path), "--z", "0"])
    assert code == 0 and parse_pairs(out)["F1"] == "1+0i"


def test_connect_and_spectrum(capsys):
    code, out, _ = run_captured(capsys, ["connect", *BASE, "--j", "2"])
    assert code == 0 and out.startswith("j=2 gamma1=")
    gap = float(out.split("gap=")[1])
    assert gap < 1e-7
    code, out, _ = run_captured(capsys, ["spectrum", "--phi", "0.7853981633974483",
                                         "--chi", "0.3,0.6,0.2,0.6", "--window", "0:-8i",
                                         "--i", "1", "--j", "3"])
    assert code == 0
    roots = [parse_complex(line.split("=")[1]) for line in out.strip().split("\n")]
    assert len(roots) == 2 and abs(roots[0] + 1.5948238862180273j) < 1e-8


@pytest.mark.parametrize("argv", [
    ["eval", "--phi", "abc", "--z", "0"],
    ["eval", "--phi", "0.5"],
    ["eval", "--phi", "0.5", "--chi", "1,2", "--z", "0"],
    ["eval", "--phi", "0.5", "--z", "0", "--tol", "-1"],
    ["table", "--phi", "0.5", "--grid", "0:1"],
    ["bogus"],
    ["eval", "--config", "/nonexistent/file", "--z", "0"],
])
def test_config_errors_exit_2(argv, capsys):
    assert run(argv) == 2


def test_numerical_failure_exit_3(capsys):
    assert run(["eval", *BASE, "--z", "0.9", "--terms", "10"]) == 3


def test_max_terms_env_cap(monkeypatch, capsys):
    monkeypatch.setenv("HEUNSYM_MAX_TERMS", "64")
    assert run(["eval", *BASE, "--z", "0.95", "--tol", "1e-14"]) == 3


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "heunsym", "eval", "--phi", "0.5", "--z", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "F1=1+0i" in res.stdout


def test_verify_is_deterministic_for_fixed_seed(capsys):
    a = run_captured(capsys, ["verify", *BASE, "--seed", "1"])[1]
    b = run_captured(capsys, ["verify", *BASE, "--seed", "1"])[1]
    assert a == b
    assert math.isfinite(float(a.split("max=")[1].split()[0]))
