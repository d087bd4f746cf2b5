import json
from pathlib import Path

import numpy as np
import pytest

import fractalent as fe
from fractalent.artifacts import (
    atomic_write_text,
    fmt,
    sha256_file,
    write_adjacency_csv,
    write_hamiltonian_csv,
    write_lattice_csv,
    write_manifest,
)
from fractalent.cli import main


def test_float_format():
    assert fmt(0.1) == "0.1"
    assert fmt(2) == "2"
    assert fmt(1.0 / 3.0) == "0.333333333333"
    assert fmt(np.sqrt(2)) == "1.41421356237"
    assert fmt(-1.5e-11) == "-1.5e-11"


def test_atomic_write(tmp_path):
    target = tmp_path / "sub" / "x.txt"
    atomic_write_text(target, "one\n")
    atomic_write_text(target, "two\n")
    assert target.read_text() == "two\n"
    assert list(tmp_path.rglob("*.tmp")) == []


def test_golden_lattice_tables(tmp_path):
    lat = fe.build_carpet(1)
    write_lattice_csv(tmp_path / "lattice.csv", lat)
    expected = (
        "index,x,y,outer_boundary\n"
        "0,0,0,1\n1,1,0,1\n2,2,0,1\n"
        "3,0,1,1\n4,2,1,1\n"
        "5,0,2,1\n6,1,2,1\n7,2,2,1\n"
    )
    assert (tmp_path / "lattice.csv").read_text() == expected

    write_adjacency_csv(tmp_path / "adjacency.csv", lat)
    expected_edges = "i,j\n0,1\n0,3\n1,2\n2,4\n3,5\n4,7\n5,6\n6,7\n"
    assert (tmp_path / "adjacency.csv").read_text() == expected_edges

    write_hamiltonian_csv(tmp_path / "h.csv", np.array([[0.0, -1.0], [-1.0, 0.0]]))
    assert (tmp_path / "h.csv").read_text() == "row,col,value\n0,1,-1\n"


def test_manifest_is_deterministic(tmp_path):
    (tmp_path / "a.csv").write_text("x\n1\n")
    (tmp_path / "nested").mkdir()
    (tmp_path / "nested" / "b.csv").write_text("y\n2\n")
    write_manifest(tmp_path, params={"p": 1})
    first = (tmp_path / "manifest.json").read_bytes()
    write_manifest(tmp_path, params={"p": 1})
    assert (tmp_path / "manifest.json").read_bytes() == first

    payload = json.loads(first)
    assert set(payload) == {"params", "conventions", "files"}
    assert set(payload["files"]) == {"a.csv", "nested/b.csv"}
    assert payload["files"]["a.csv"] == sha256_file(tmp_path / "a.csv")
    assert "time" not in first.decode().lower()


def test_error_exit_codes():
    assert fe.FractalentError("x").exit_code == 1
    assert fe.ValidationError("x").exit_code == 2
    assert fe.CapacityError("x").exit_code == 3
    assert fe.NumericalError("x").exit_code == 4


def test_cli_lattice_verb(tmp_path, capsys):
    rc = main(["lattice", "--order", "1", "--out", str(tmp_path / "lat")])
    assert rc == 0
    assert "8 sites" in capsys.readouterr().out
    for name in ("lattice.csv", "adjacency.csv", "manifest.json"):
        assert (tmp_path / "lat" / name).is_file()

    rc = main(["lattice", "--square", "5", "--out", str(tmp_path / "sq")])
    assert rc == 0
    lines = (tmp_path / "sq" / "lattice.csv").read_text().splitlines()
    assert len(lines) == 1 + 25


def test_cli_validate_and_errors(tmp_path, capsys):
    good = tmp_path / "good.ini"
    good.write_text("[lattice]\nkind = carpet\norder = 2\n[model]\nkind = h1\n")
    assert main(["validate", "--config", str(good)]) == 0
    assert "config OK" in capsys.readouterr().out

    bad = tmp_path / "bad.ini"
    bad.write_text("[model]\nkind = h7\n")
    assert main(["validate", "--config", str(bad)]) == 2
    assert "h7" in capsys.readouterr().err

    assert main(["validate", "--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["reproduce", "not-a-figure", "--out", str(tmp_path)]) == 2
    assert main(["nonsense"]) == 2


def test_cli_run_study(tmp_path, capsys):
    cfg = tmp_path / "study.ini"
    cfg.write_text(
        "[run]\nlabel = smoke\n"
        "[lattice]\nkind = carpet\norder = 2\n"
        "[model]\nkind = h1\nfilling = half\n"
        "[partition]\nkind = IV\n"
        "[ef]\nenabled = true\npermutations = 25\n"
        "[profile]\nenabled = true\n"
        "[dos]\nenabled = true\nmethod = exact\nbins = 16\n"
    )
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--seed", "3"]) == 0
    assert "smoke" in capsys.readouterr().out
    for name in (
        "lattice.csv",
        "adjacency.csv",
        "contour.csv",
        "spectrum.csv",
        "contour.png",
        "ef_mask.txt",
        "profiles.csv",
        "dos.csv",
        "summary.json",
        "manifest.json",
    ):
        assert (out / name).is_file(), name
    summary = json.loads((out / "summary.json").read_text())
    assert summary["partition"]["contour_sum_matches_entropy"] is True
    assert summary["dos"]["integral"] == pytest.approx(1.0, abs=1e-6)
    on_mask = fe.read_mask_file(out / "ef_mask.txt")
    assert on_mask.sum() > 0


def test_cli_capacity_guard(tmp_path, capsys):
    cfg = tmp_path / "big.ini"
    cfg.write_text("[lattice]\nkind = carpet\norder = 5\n[model]\nkind = h1\n")
    rc = main(["run", "--config", str(cfg), "--out", str(tmp_path / "big")])
    assert rc == 3
    assert "allow_large" in capsys.readouterr().err


def test_cli_reproduce_unit_cell_panel(tmp_path):
    out = tmp_path / "figs"
    assert main(["reproduce", "figA4", "--out", str(out)]) == 0
    made = {p.name for p in (out / "figA4").iterdir()}
    for tag in ("n3_s1", "n2_s2", "n2_s3"):
        assert f"contour_{tag}.csv" in made
        assert f"figA4_{tag}.png" in made
    summary = json.loads((out / "figA4" / "summary.json").read_text())
    assert set(summary["systems"]) == {"n3_s1", "n2_s2", "n2_s3"}
    assert all(v > 0 for v in summary["systems"].values())


def test_cli_reproduce_square_dos(tmp_path):
    out = tmp_path / "figs"
    assert main(["reproduce", "fig8c", "--out", str(out)]) == 0
    rows = (out / "fig8c" / "dos.csv").read_text().splitlines()
    assert rows[0] == "bin_center,density"
    centers = np.array([float(r.split(",")[0]) for r in rows[1:]])
    density = np.array([float(r.split(",")[1]) for r in rows[1:]])
    width = centers[1] - centers[0]
    assert (density * width).sum() == pytest.approx(1.0, abs=1e-6)


def test_cli_reproduce_gap_figure(tmp_path):
    out = tmp_path / "figs"
    rc = main(["reproduce", "fig8a", "--out", str(out)])
    assert rc == 0
    gaps = (out / "fig8a" / "gaps.csv").read_text().splitlines()
    assert gaps[0] == "n,max_gap"
    assert gaps[1] == "1,1.41421356237"
    values = [float(line.split(",")[1]) for line in gaps[1:]]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert (out / "fig8a" / "fig8a.png").is_file()
    assert (out / "fig8a" / "manifest.json").is_file()
