import csv

import numpy as np
import pytest

from hsirestore import io
from hsirestore.cli import main
from hsirestore.synthetic import make_cube


@pytest.fixture
def cube_file(tmp_path):
    path = tmp_path / "clean.ht3"
    io.save_ht3(path, make_cube((24, 24, 6), seed=0))
    return path


def test_synth(tmp_path):
    out = tmp_path / "c.ht3"
    assert main(["synth", "--out", str(out), "--shape", "16,12,5", "--seed", "3"]) == 0
    assert io.load_ht3(out).shape == (16, 12, 5)


def test_metrics_identity(tmp_path, cube_file, capsys):
    out = tmp_path / "m.csv"
    assert main(["metrics", "--x", str(cube_file), "--ref", str(cube_file), "--out", str(out), "--plot"]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["band", "psnr", "ssim"]
    assert len(rows) == 1 + 6 + 2
    assert rows[-2] == ["mpsnr", "mssim", "ergas", "msad"]
    mpsnr, mssim, ergas, msad = map(float, rows[-1])
    assert (mpsnr, mssim, ergas) == (99.0, 1.0, 0.0)
    assert msad == pytest.approx(0, abs=1e-6)
    assert out.with_suffix(".png").stat().st_size > 0
    assert "mpsnr=99.0000" in capsys.readouterr().out


def test_simulate_echoes_spec(tmp_path, cube_file, capsys):
    out = tmp_path / "noisy.ht3"
    assert main(["simulate", "--in", str(cube_file), "--case", "1", "--seed", "4", "--out", str(out)]) == 0
    echo = capsys.readouterr().out
    assert "sigma=0.1" in echo and "impulse=0.2" in echo and "seed=4" in echo
    assert (tmp_path / "noisy.ht3.spec").read_text() == echo
    assert not np.array_equal(io.load_ht3(out), io.load_ht3(cube_file))


def test_simulate_spec_override(tmp_path, cube_file, capsys):
    spec = tmp_path / "s.cfg"
    spec.write_text("sigma = 0.05\nimpulse = 0\n")
    out = tmp_path / "noisy.ht3"
    assert main(["simulate", "--in", str(cube_file), "--case", "1", "--out", str(out), "--spec", str(spec)]) == 0
    echo = capsys.readouterr().out
    assert "sigma=0.05" in echo and "impulse=0" in echo


def test_denoise_outputs(tmp_path, cube_file):
    noisy = tmp_path / "noisy.ht3"
    main(["simulate", "--in", str(cube_file), "--case", "2", "--out", str(noisy)])
    cfg = tmp_path / "solver.cfg"
    cfg.write_text("patch = 12,12\nstride = 6,6\nmax_iter = 10\n")
    paths = {k: tmp_path / f"{k}.ht3" for k in ("den", "S", "N")}
    trace = tmp_path / "trace.csv"
    rc = main([
        "denoise", "--in", str(noisy), "--out", str(paths["den"]), "--config", str(cfg),
        "--ref", str(cube_file), "--trace", str(trace), "--out-sparse", str(paths["S"]),
        "--out-gauss", str(paths["N"]), "--plot",
    ])
    assert rc == 0
    for p in paths.values():
        assert io.load_ht3(p).shape == (24, 24, 6)
    rows = list(csv.reader(trace.read_text().splitlines()))
    assert rows[0] == ["iter", "error1", "error2", "error3", "mpsnr", "mssim"]
    assert 1 <= len(rows) - 1 <= 10
    assert trace.with_suffix(".png").stat().st_size > 0


def test_denoise_normalize_round_trip(tmp_path):
    src = tmp_path / "scaled.ht3"
    io.save_ht3(src, 100.0 + 50.0 * make_cube((16, 16, 4), seed=2))
    cfg = tmp_path / "solver.cfg"
    cfg.write_text("patch = 8,8\nstride = 4,4\nmax_iter = 5\n")
    out = tmp_path / "den.ht3"
    assert main(["denoise", "--in", str(src), "--out", str(out), "--config", str(cfg), "--normalize"]) == 0
    den = io.load_ht3(out)
    assert 90 < den.mean() < 160


def test_failure_leaves_no_outputs(tmp_path, cube_file, capsys):
    bad = tmp_path / "bad.ht3"
    bad.write_bytes(b"XXXX" + bytes(12))
    before = set(tmp_path.iterdir())
    rc = main(["denoise", "--in", str(bad), "--out", str(tmp_path / "den.ht3"), "--trace", str(tmp_path / "t.csv")])
    assert rc == 1
    assert "magic" in capsys.readouterr().err.lower()
    assert set(tmp_path.iterdir()) == before

    cfg = tmp_path / "bad.cfg"
    cfg.write_text("lamda = 3\n")
    rc = main(["denoise", "--in", str(cube_file), "--out", str(tmp_path / "den.ht3"), "--config", str(cfg)])
    assert rc == 1 and "lamda" in capsys.readouterr().err
    assert not (tmp_path / "den.ht3").exists()


def test_bands_pgm(tmp_path, cube_file, capsys):
    out = tmp_path / "b.pgm"
    assert main(["bands", "--in", str(cube_file), "--band", "6", "--out", str(out)]) == 0
    data = out.read_bytes()
    assert data.startswith(b"P5\n24 24\n255\n") and len(data) == len(b"P5\n24 24\n255\n") + 576
    assert main(["bands", "--in", str(cube_file), "--band", "7", "--out", str(out)]) == 1


def test_unknown_case(tmp_path, cube_file):
    assert main(["simulate", "--in", str(cube_file), "--case", "9", "--out", str(tmp_path / "x.ht3")]) == 1
    assert not (tmp_path / "x.ht3").exists()


def test_csv_outputs_are_deterministic(tmp_path, cube_file):
    noisy = tmp_path / "noisy.ht3"
    main(["simulate", "--in", str(cube_file), "--case", "3", "--seed", "8", "--out", str(noisy)])
    cfg = tmp_path / "solver.cfg"
    cfg.write_text("patch = 12,12\nstride = 6,6\nmax_iter = 6\n")
    texts = []
    for k in range(2):
        trace = tmp_path / f"t{k}.csv"
        report = tmp_path / f"r{k}.csv"
        den = tmp_path / f"d{k}.ht3"
        main(["denoise", "--in", str(noisy), "--out", str(den), "--config", str(cfg), "--trace", str(trace)])
        main(["metrics", "--x", str(den), "--ref", str(cube_file), "--out", str(report)])
        texts.append((trace.read_text(), report.read_text()))
    assert texts[0] == texts[1]


@pytest.mark.slow
def test_denoise_trace_on_acceptance_synthetic(tmp_path):
    clean, noisy, den, trace = (str(tmp_path / f) for f in ("c.ht3", "n.ht3", "d.ht3", "trace.csv"))
    main(["synth", "--out", clean, "--shape", "64,64,20", "--seed", "0"])
    main(["simulate", "--in", clean, "--case", "1", "--seed", "0", "--out", noisy])
    assert main(["denoise", "--in", noisy, "--out", den, "--trace", trace]) == 0
    with open(trace) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) <= 60
    assert max(float(rows[-1][k]) for k in ("error1", "error2", "error3")) <= 1e-3
