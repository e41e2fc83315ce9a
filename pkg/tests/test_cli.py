import csv
import io
import math
import subprocess
import sys

import pytest

from symplectic_simpson import __version__
from symplectic_simpson.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def read_manifest(path):
    pairs = (line.split("=", 1) for line in path.read_text().splitlines() if line)
    return dict(pairs)


# -- simulate ------------------------------------------------------------------


def test_simulate_exact_is_periodic(capsys):
    code, out, _ = run(["simulate", "--scheme", "exact", "--steps", "15", "--periods", "1"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 16
    assert list(rows[0]) == ["t", "p", "q", "H", "H_d"]
    assert float(rows[-1]["p"]) == pytest.approx(float(rows[0]["p"]), abs=1e-12)
    assert float(rows[-1]["q"]) == pytest.approx(float(rows[0]["q"]), abs=1e-12)


def test_simulate_simpson_tracks_sine(capsys):
    code, out, _ = run(["simulate", "--scheme", "simpson", "--steps", "15"], capsys)
    assert code == 0
    rows = read_csv(out)
    err = max(abs(float(r["q"]) - math.sin(2 * math.pi * float(r["t"]))) for r in rows)
    # between the N=10 and N=20 max-norm state errors of the Simpson scheme
    assert 2.55e-5 < err < 4.11e-4


def test_simulate_newmark_error_is_larger(capsys):
    _, out, _ = run(["simulate", "--scheme", "newmark", "--steps", "15"], capsys)
    err = max(abs(float(r["q"]) - math.sin(2 * math.pi * float(r["t"]))) for r in read_csv(out))
    assert err > 1e-2


def test_simulate_simpson_outside_window_exits_2(capsys):
    code, out, err = run(["simulate", "--scheme", "simpson", "--steps", "2"], capsys)
    assert code == 2
    assert out == ""
    assert "0 < ωh < 2√2" in err


def test_simulate_omega_h_three_exits_2(capsys):
    code, _, err = run(["simulate", "--scheme", "simpson", "--omega", "3", "--steps", "3",
                        "--periods", str(3 * 3 / (2 * math.pi))], capsys)
    assert code == 2
    assert "2√2" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["simulate", "--scheme", "rk4"],
        ["simulate", "--steps", "ten"],
        ["simulate", "--steps", "1"],
        ["simulate", "--mass", "-1"],
        ["simulate", "--omega", "0"],
        ["converge", "--scheme", "exact"],
        ["converge", "--meshes", "a,b"],
        ["converge", "--meshes", "20,10"],
        ["stability", "--s-min", "2", "--s-max", "1"],
        ["stability", "--points", "0"],
        ["stability", "--s-min", "-1"],
        ["stability", "--s-min", "1", "--s-max", "1", "--points", "3"],
    ],
)
def test_bad_flags_exit_64(argv, capsys):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 64


# -- converge ------------------------------------------------------------------


def test_converge_simpson_momentum_order_four(capsys):
    code, out, _ = run(["converge", "--scheme", "simpson"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["quantity", "N", "error", "order", "verdict"]
    assert len(rows) == 12
    momentum = [r for r in rows if r["quantity"] == "momentum"]
    assert [r["N"] for r in momentum] == ["10", "20", "40"]
    assert momentum[0]["order"] == ""
    assert [round(float(r["order"])) for r in momentum[1:]] == [4, 4]
    assert {r["verdict"] for r in momentum} == {"order-4"}


def test_converge_newmark_energy_exact(capsys):
    _, out, _ = run(["converge", "--scheme", "newmark"], capsys)
    energy = [r for r in read_csv(out) if r["quantity"] == "energy_H"]
    assert {r["verdict"] for r in energy} == {"exact"}
    assert all(r["order"] == "" for r in energy)


def test_converge_single_mesh(capsys):
    code, out, _ = run(["converge", "--meshes", "10"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 4
    assert all(r["order"] == "" for r in rows)
    assert all(float(r["error"]) >= 0 for r in rows)


def test_converge_errors_round_trip_exactly(capsys):
    from symplectic_simpson.analysis import ExperimentSpec, convergence_study

    _, out, _ = run(["converge"], capsys)
    report = convergence_study(ExperimentSpec())
    got = [float(r["error"]) for r in read_csv(out) if r["quantity"] == "state"]
    assert tuple(got) == report.errors["state"]


# -- stability -----------------------------------------------------------------


def test_stability_default_scan_all_stable(capsys):
    code, out, _ = run(["stability", "--s-min", "0.1", "--s-max", "2.8"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["s", "discriminant", "root_modulus", "stable"]
    assert len(rows) == 28
    assert all(r["stable"] == "1" for r in rows)
    assert all(float(r["discriminant"]) < 0 for r in rows)


def test_stability_scan_flags_three(capsys):
    _, out, _ = run(["stability", "--s-min", "2.5", "--s-max", "3.5", "--points", "11"], capsys)
    rows = {round(float(r["s"]), 6): r for r in read_csv(out)}
    assert rows[3.0]["stable"] == "0"
    assert rows[2.8]["stable"] == "1"
    assert rows[2.9]["stable"] == "0"


def test_stability_boundary_approach(capsys):
    s = 2 * math.sqrt(2) * (1 - 1e-12)
    _, out, _ = run(["stability", "--s-min", repr(s), "--s-max", repr(s), "--points", "1"], capsys)
    (row,) = read_csv(out)
    assert row["stable"] == "1"
    assert abs(float(row["discriminant"])) < 1e-9


# -- determinism and manifest --------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--scheme", "simpson", "--steps", "15"],
        ["converge", "--scheme", "newmark"],
        ["stability", "--points", "7"],
    ],
)
def test_rerun_is_byte_identical(argv, tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_manifest_reproduces_output(tmp_path, capsys):
    first = tmp_path / "run.csv"
    argv = ["simulate", "--scheme", "newmark", "--steps", "12", "--mass", "2.5",
            "--omega", "1.3", "--periods", "2", "--out", str(first)]
    assert main(argv) == 0
    manifest = read_manifest(tmp_path / "run.csv.manifest")
    assert manifest["command"] == "simulate"
    assert manifest["version"] == __version__
    assert "timestamp" in manifest

    flags = {"scheme": "--scheme", "steps": "--steps", "mass": "--mass",
             "omega": "--omega", "periods": "--periods"}
    second = tmp_path / "again.csv"
    replay = [manifest["command"]]
    for key, flag in flags.items():
        replay += [flag, manifest[key]]
    assert main(replay + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_no_manifest_without_out(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run(["stability", "--points", "2"], capsys)
    assert list(tmp_path.iterdir()) == []


def test_csv_uses_full_precision(capsys):
    _, out, _ = run(["simulate", "--scheme", "exact", "--steps", "3"], capsys)
    rows = read_csv(out)
    assert float(rows[1]["t"]) == 1 / 3
    assert rows[1]["t"] == format(1 / 3, ".17g")


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "symplectic_simpson", "stability", "--points", "3", "--out", str(out)],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().splitlines()[0] == "s,discriminant,root_modulus,stable"
    bad = subprocess.run(
        [sys.executable, "-m", "symplectic_simpson", "simulate", "--steps", "x"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert bad.returncode == 64
