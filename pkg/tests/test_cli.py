import subprocess
import sys

import numpy as np
import pytest

from flatmeans import formats
from flatmeans.cli import main


@pytest.fixture
def two_lines_csv(tmp_path, rng):
    x = rng.uniform(0, 1, size=40)
    X = np.r_[np.c_[x[:20], np.zeros(20)], np.c_[x[20:], np.ones(20)]]
    p = tmp_path / "lines.csv"
    formats.write_points_csv(p, X)
    return p


@pytest.fixture
def small_ppm(tmp_path, natural_image):
    p = tmp_path / "img.ppm"
    formats.write_ppm(p, natural_image[:24, :32])
    return p


def test_imgerror_same_file(small_ppm, capsys):
    assert main(["imgerror", "--a", str(small_ppm), "--b", str(small_ppm)]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_imgerror_six_digits(tmp_path, capsys):
    a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
    formats.write_ppm(a, np.zeros((1, 2, 3), np.uint8))
    img = np.zeros((1, 2, 3), np.uint8)
    img[0, 0, 0] = img[0, 1, 1] = 1
    formats.write_ppm(b, img)
    assert main(["imgerror", "--a", str(a), "--b", str(b)]) == 0
    assert capsys.readouterr().out.strip() == "1.41421"


def test_k_too_large_is_data_error(two_lines_csv, tmp_path, capsys):
    code = main(["cluster", "--input", str(two_lines_csv), "--k", "41", "--dim", "1",
                 "--model", str(tmp_path / "m.wkm")])
    assert code == 2
    assert "KTooLarge" in capsys.readouterr().err


def test_usage_errors(two_lines_csv, tmp_path, capsys):
    assert main([]) == 1
    assert main(["cluster", "--input", str(two_lines_csv)]) == 1
    assert main(["cluster", "--input", str(two_lines_csv), "--k", "two", "--dim", "1", "--model", "m"]) == 1
    assert main(["cluster", "--input", str(two_lines_csv), "--k", "2", "--dim", "1",
                 "--model", str(tmp_path / "m"), "--init", "bogus"]) == 1
    assert "--init" in capsys.readouterr().err


def test_data_errors_name_the_problem(two_lines_csv, tmp_path, capsys):
    assert main(["cluster", "--input", str(two_lines_csv), "--k", "2", "--dim", "1",
                 "--weights", "0.5,0.6", "--model", str(tmp_path / "m")]) == 2
    assert "--weights" in capsys.readouterr().err
    assert main(["imgerror", "--a", str(tmp_path / "missing.ppm"), "--b", "x"]) == 2
    assert "missing.ppm" in capsys.readouterr().err
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert main(["cluster", "--input", str(bad), "--k", "1", "--dim", "0", "--model", str(tmp_path / "m")]) == 2
    assert "line 2" in capsys.readouterr().err


def test_cluster_outputs(two_lines_csv, tmp_path):
    model, assign, trace = tmp_path / "m.wkm", tmp_path / "a.csv", tmp_path / "t.txt"
    code = main(["cluster", "--input", str(two_lines_csv), "--k", "2", "--dim", "1", "--weights", "0,1",
                 "--restarts", "8", "--model", str(model), "--assignments", str(assign), "--trace", str(trace)])
    assert code == 0
    c = formats.read_model(model)
    assert c.energy < 1e-9
    a = formats.read_assignments(assign)
    assert len(set(a[:20])) == 1 and len(set(a[20:])) == 1 and a[0] != a[20]
    lines = trace.read_text().splitlines()
    assert lines[0].startswith("best_restart ") and lines[1] == "restart iteration energy repaired"


def test_cluster_given_partition(two_lines_csv, tmp_path):
    init = tmp_path / "init.csv"
    formats.write_assignments(init, [0] * 20 + [1] * 20)
    model = tmp_path / "m.wkm"
    code = main(["cluster", "--input", str(two_lines_csv), "--k", "2", "--dim", "1",
                 "--init", f"file:{init}", "--model", str(model)])
    assert code == 0
    assert formats.read_model(model).assignments.tolist() == [0] * 20 + [1] * 20


def test_voronoi_command(tmp_path):
    flats = tmp_path / "f.txt"
    flats.write_text("2 1\n0 0\n0 1\n\n2 0\n0 1\n")
    labels, boundary = tmp_path / "l.pgm", tmp_path / "b.pgm"
    code = main(["voronoi", "--flats", str(flats), "--weights", "0,1", "--bounds", "-1,0,3,1",
                 "--size", "40x10", "--labels", str(labels), "--boundary", str(boundary)])
    assert code == 0
    L = formats.read_pgm(labels)
    assert L.shape == (10, 40) and set(np.unique(L)) == {0, 255}
    B = formats.read_pgm(boundary)
    assert np.all(B[:, 19:21] == 255) and B.sum() == 255 * 20


def test_voronoi_slice_command(tmp_path):
    flats = tmp_path / "f.txt"
    flats.write_text("3 1\n0 0 0\n0 0 1\n\n0 0 1\n1 0 0\n")
    labels = tmp_path / "l.pgm"
    code = main(["voronoi", "--flats", str(flats), "--bounds", "-1,-1,1,1", "--size", "8x8",
                 "--labels", str(labels), "--slice", "0,0,0.5;1,0,0;0,1,0"])
    assert code == 0
    assert formats.read_pgm(labels).shape == (8, 8)
    assert main(["voronoi", "--flats", str(flats), "--bounds", "-1,-1,1,1", "--size", "8x8",
                 "--labels", str(labels), "--slice", "0,0,0;1,1,0;0,1,0"]) == 2


def test_compress_decompress(small_ppm, tmp_path, capsys):
    wkc, out = tmp_path / "c.wkc", tmp_path / "out.ppm"
    assert main(["compress", "--image", str(small_ppm), "--k", "2", "--dim", "3",
                 "--restarts", "2", "--output", str(wkc)]) == 0
    reported = float(capsys.readouterr().out.split()[-1])
    assert main(["decompress", "--input", str(wkc), "--output", str(out)]) == 0
    assert main(["imgerror", "--a", str(small_ppm), "--b", str(out)]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(reported, rel=1e-5)


def test_errortable_grid(small_ppm, tmp_path, capsys):
    csv = tmp_path / "t.csv"
    assert main(["errortable", "--image", str(small_ppm), "--kmax", "5", "--nmax", "5",
                 "--restarts", "1", "--max-iters", "10", "--csv", str(csv)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 6
    assert lines[0].split() == ["k/n", "0", "1", "2", "3", "4", "5"]
    assert all(len(line.split()) == 7 for line in lines[1:])
    assert len(csv.read_text().splitlines()) == 31


def test_module_entry_point(small_ppm):
    r = subprocess.run([sys.executable, "-m", "flatmeans", "imgerror", "--a", str(small_ppm), "--b", str(small_ppm)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "0"
